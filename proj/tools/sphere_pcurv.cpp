// sphere-pcurv: batch front end for the spherical p-curvature experiments.
//
// Subcommands: converge, relax, bend-table, conformal-check, corner,
// counterexample, export-gamma, validate. Reports go to --out (or stdout)
// as CSV or JSON; identical inputs and seeds produce byte-identical files.
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pcurv/experiments.hpp"
#include "pcurv/io.hpp"

using namespace pcurv;

namespace {

struct CommonOpts {
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool degrees = false;
};

double to_radians(double v, bool degrees) { return degrees ? v * kPi / 180.0 : v; }

struct CurveSpec {
    std::string family;
    std::map<std::string, std::string> kv;
    std::string raw;
};

CurveSpec parse_curve_spec(const std::string& s) {
    CurveSpec spec;
    spec.raw = s;
    const auto colon = s.find(':');
    spec.family = s.substr(0, colon);
    if (colon == std::string::npos) return spec;
    const std::string rest = s.substr(colon + 1);
    if (spec.family == "csv" && rest.find('=') == std::string::npos) {
        spec.kv["path"] = rest;
        return spec;
    }
    std::istringstream is(rest);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("curve spec: expected key=value, got '" + item + "'");
        spec.kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return spec;
}

double kv_double(const CurveSpec& s, const std::string& key, std::optional<double> fallback = {}) {
    auto it = s.kv.find(key);
    if (it == s.kv.end()) {
        if (fallback) return *fallback;
        throw std::invalid_argument("curve spec '" + s.raw + "': missing " + key);
    }
    return std::strtod(it->second.c_str(), nullptr);
}

ParamCurve build_curve(const CurveSpec& spec, bool degrees) {
    if (spec.family == "parallel") {
        const double phi = to_radians(kv_double(spec, "phi"), degrees);
        if (!(phi > 1e-12 && phi < kPi - 1e-12))
            throw std::invalid_argument("degenerate colatitude");
        return make_parallel(phi, kv_double(spec, "turns", 1.0));
    }
    if (spec.family == "great-circle") return make_great_circle(kv_double(spec, "turns", 1.0));
    if (spec.family == "corner") {
        const double theta = to_radians(kv_double(spec, "theta"), degrees);
        return make_corner_curve(theta, kv_double(spec, "arm", 0.3));
    }
    if (spec.family == "csv") {
        auto it = spec.kv.find("path");
        if (it == spec.kv.end()) throw std::invalid_argument("csv curve spec: missing path");
        std::ifstream in(it->second);
        if (!in) throw std::invalid_argument("csv curve spec: cannot open " + it->second);
        ParamCurve raw = load_curve_csv(in);
        return arclength_reparam(raw);
    }
    throw std::invalid_argument("unknown curve family '" + spec.family + "'");
}

void emit(const std::string& text, const CommonOpts& opts) {
    if (opts.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output path " + opts.out);
    out << text;
}

template <typename Report>
void emit_report(const Report& r, const CommonOpts& opts) {
    emit(opts.format == "json" ? json_string(r) : csv_string(r), opts);
}

void report_error(const char* kind, const std::exception& e) {
    nlohmann::json j{{"error", kind}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical p-curvature experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--out", opts.out, "Output file (default: stdout)")->capture_default_str();
    app.add_option("--format", opts.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--seed", opts.seed, "Seed for randomized sweeps")->capture_default_str();
    app.add_flag("--degrees", opts.degrees, "Interpret phi/theta inputs as degrees");
    app.fallthrough();

    std::string curve_spec;
    double p_exp = 2.0;
    std::vector<double> ells, epss, thetas, ps;
    std::vector<std::int64_t> hs;
    double phi = kPi / 4, theta = kPi / 2, extra_time = -1.0;
    int n_gon = 6, samples = 50, quad_samples = 10000, gamma_samples = 2000, modulus_samples = 64;
    bool exact_close = false;

    auto* converge = app.add_subcommand("converge", "Convergence of k_p along an ell schedule");
    converge->add_option("--curve", curve_spec, "parallel:phi=..[,turns=..] | great-circle[:turns=..] | corner:theta=..[,arm=..] | csv:PATH")->required();
    converge->add_option("--p", p_exp, "Curvature exponent")->required();
    converge->add_option("--ell", ells, "Decreasing edge-length schedule")->required()->delimiter(',');
    converge->add_option("--modulus-samples", modulus_samples, "Samples per arc for the modulus");

    auto* relax = app.add_subcommand("relax", "Relaxation estimate over modulus schedule");
    relax->add_option("--curve", curve_spec)->required();
    relax->add_option("--p", p_exp)->required();
    relax->add_option("--eps", epss, "Decreasing modulus schedule")->required()->delimiter(',');

    auto* bend = app.add_subcommand("bend-table", "Closed form vs per-arc vs quadrature");
    bend->add_option("--ell", ells)->required()->delimiter(',');
    bend->add_option("--theta", thetas)->required()->delimiter(',');
    bend->add_option("--p", ps)->required()->delimiter(',');
    bend->add_option("--quad-samples", quad_samples, "Samples for the dense quadrature");

    auto* conf = app.add_subcommand("conformal-check", "Conformal curvature lemma check");
    conf->add_option("--samples", samples, "Sample points per curve family");

    auto* corner = app.add_subcommand("corner", "Corner blow-up study");
    corner->add_option("--theta", theta)->required();
    corner->add_option("--p", p_exp)->required();
    corner->add_option("--h-schedule", hs, "Increasing h schedule")->required()->delimiter(',');

    auto* cex = app.add_subcommand("counterexample", "Monotonicity counterexample on a parallel");
    cex->add_option("--phi", phi)->required();
    cex->add_option("--n", n_gon, "Regular n-gon size");
    cex->add_option("--extra-time", extra_time, "Time of the added vertex (default: edge midpoint)");

    auto* gamma = app.add_subcommand("export-gamma", "Dense CSV samples of gamma(P)");
    gamma->add_option("--curve", curve_spec)->required();
    gamma->add_option("--ell", ells, "Single equilateral edge length")->required()->delimiter(',');
    gamma->add_flag("--exact-close", exact_close, "Re-solve ell so the closing edge is exact");
    gamma->add_option("--samples", gamma_samples, "Number of exported samples");

    auto* validate = app.add_subcommand("validate", "Dry-run configuration checks");
    validate->add_option("--curve", curve_spec);
    validate->add_option("--p", p_exp);
    validate->add_option("--ell", ells)->delimiter(',');
    validate->add_option("--eps", epss)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        nlohmann::json j{{"error", "usage"}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return 1;
    }

    try {
        if (*converge) {
            const ParamCurve c = build_curve(parse_curve_spec(curve_spec), opts.degrees);
            emit_report(convergence_study(c, p_exp, ells, curve_spec, modulus_samples), opts);
        } else if (*relax) {
            const ParamCurve c = build_curve(parse_curve_spec(curve_spec), opts.degrees);
            emit_report(relaxation_estimate(c, p_exp, epss, curve_spec), opts);
        } else if (*bend) {
            if (opts.degrees)
                for (auto& t : thetas) t = to_radians(t, true);
            emit_report(bend_formula_table(ells, thetas, ps, quad_samples), opts);
        } else if (*conf) {
            emit_report(conformal_lemma_check(samples, opts.seed), opts);
        } else if (*corner) {
            emit_report(corner_blowup_study(to_radians(theta, opts.degrees), p_exp, hs), opts);
        } else if (*cex) {
            emit_report(monotonicity_counterexample(to_radians(phi, opts.degrees), n_gon,
                                                    extra_time),
                        opts);
        } else if (*gamma) {
            if (ells.size() != 1)
                throw std::invalid_argument("export-gamma expects a single --ell value");
            const ParamCurve c = build_curve(parse_curve_spec(curve_spec), opts.degrees);
            const Polygonal poly = inscribe_equilateral(c, ells[0], exact_close);
            std::ostringstream os;
            export_glued_csv(build_gamma(poly), os, gamma_samples);
            emit(os.str(), opts);
        } else if (*validate) {
            nlohmann::json diags = nlohmann::json::array();
            if (!curve_spec.empty()) {
                try {
                    const ParamCurve c = build_curve(parse_curve_spec(curve_spec), opts.degrees);
                    const double reach = std::min(kPi / 2.0, c.length());
                    for (double e : ells)
                        if (!(e > 0.0 && e < reach))
                            diags.push_back("ell " + std::to_string(e) +
                                            " outside (0, min(pi/2, length))");
                } catch (const std::exception& e) {
                    diags.push_back(std::string(e.what()));
                }
            }
            auto check_monotone = [&diags](const std::vector<double>& sched, const char* name) {
                for (std::size_t i = 1; i < sched.size(); ++i)
                    if (sched[i] >= sched[i - 1]) {
                        diags.push_back(std::string(name) + " schedule not monotone");
                        break;
                    }
            };
            check_monotone(ells, "ell");
            check_monotone(epss, "eps");
            if (p_exp < 1.0) diags.push_back("p must be >= 1");
            nlohmann::json out{{"ok", diags.empty()}, {"diagnostics", diags}};
            emit(out.dump(2) + "\n", opts);
            return diags.empty() ? 0 : 1;
        }
    } catch (const NumericalError& e) {
        report_error("numerical", e);
        return 2;
    } catch (const std::invalid_argument& e) {
        report_error("validation", e);
        return 1;
    } catch (const std::out_of_range& e) {
        report_error("validation", e);
        return 1;
    } catch (const std::exception& e) {
        report_error("internal", e);
        return 2;
    }
    return 0;
}
