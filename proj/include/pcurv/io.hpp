#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcurv/experiments.hpp"

// Report serialization. CSV is RFC-4180 flavored with '.' decimals and 17
// significant digits (metadata as leading '#' comment lines); JSON uses the
// same field names. Both formats re-parse losslessly, and identical reports
// serialize to identical bytes.

namespace pcurv {

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace detail

// --------------------------- ConvergenceReport ----------------------------

inline void write_csv(const ConvergenceReport& r, std::ostream& os) {
    os << "# report=converge\n";
    os << "# curve=" << r.curve << '\n';
    os << "# p=" << detail::fmt17(r.p) << '\n';
    os << "# reference=" << detail::fmt17(r.reference) << '\n';
    for (const auto& n : r.notes) os << "# note=" << n << '\n';
    os << "ell,h,mesh,modulus,k_p,reference,rel_error\n";
    for (const auto& row : r.rows)
        os << detail::fmt17(row.ell) << ',' << row.h << ',' << detail::fmt17(row.mesh) << ','
           << detail::fmt17(row.modulus) << ',' << detail::fmt17(row.k_p) << ','
           << detail::fmt17(row.reference) << ',' << detail::fmt17(row.rel_error) << '\n';
}

inline ConvergenceReport parse_convergence_csv(std::istream& in) {
    ConvergenceReport r;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "curve") r.curve = val;
            else if (key == "p") r.p = detail::parse_double(val);
            else if (key == "reference") r.reference = detail::parse_double(val);
            else if (key == "note") r.notes.push_back(val);
            continue;
        }
        if (!header_seen) {
            header_seen = true; // column header
            continue;
        }
        const auto f = detail::split_csv_line(line);
        ConvergenceRow row;
        row.ell = detail::parse_double(f.at(0));
        row.h = std::stoll(f.at(1));
        row.mesh = detail::parse_double(f.at(2));
        row.modulus = detail::parse_double(f.at(3));
        row.k_p = detail::parse_double(f.at(4));
        row.reference = detail::parse_double(f.at(5));
        row.rel_error = detail::parse_double(f.at(6));
        r.rows.push_back(row);
    }
    return r;
}

inline nlohmann::json to_json(const ConvergenceReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"ell", row.ell},
                        {"h", row.h},
                        {"mesh", row.mesh},
                        {"modulus", row.modulus},
                        {"k_p", row.k_p},
                        {"reference", row.reference},
                        {"rel_error", row.rel_error}});
    return {{"report", "converge"}, {"curve", r.curve},     {"p", r.p},
            {"reference", r.reference}, {"rows", rows},     {"notes", r.notes}};
}

inline ConvergenceReport convergence_from_json(const nlohmann::json& j) {
    ConvergenceReport r;
    r.curve = j.at("curve").get<std::string>();
    r.p = j.at("p").get<double>();
    r.reference = j.at("reference").get<double>();
    for (const auto& jr : j.at("rows")) {
        ConvergenceRow row;
        row.ell = jr.at("ell").get<double>();
        row.h = jr.at("h").get<std::int64_t>();
        row.mesh = jr.at("mesh").get<double>();
        row.modulus = jr.at("modulus").get<double>();
        row.k_p = jr.at("k_p").get<double>();
        row.reference = jr.at("reference").get<double>();
        row.rel_error = jr.at("rel_error").get<double>();
        r.rows.push_back(row);
    }
    for (const auto& n : j.at("notes")) r.notes.push_back(n.get<std::string>());
    return r;
}

// ----------------------------- BlowupReport -------------------------------

inline void write_csv(const BlowupReport& r, std::ostream& os) {
    os << "# report=corner\n";
    os << "# theta=" << detail::fmt17(r.theta) << '\n';
    os << "# p=" << detail::fmt17(r.p) << '\n';
    os << "h,theta_h,lower_bound,k_p\n";
    for (const auto& row : r.rows)
        os << row.h << ',' << detail::fmt17(row.theta_h) << ','
           << detail::fmt17(row.lower_bound) << ',' << detail::fmt17(row.k_p) << '\n';
}

inline BlowupReport parse_blowup_csv(std::istream& in) {
    BlowupReport r;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "theta") r.theta = detail::parse_double(val);
            else if (key == "p") r.p = detail::parse_double(val);
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        BlowupRow row;
        row.h = std::stoll(f.at(0));
        row.theta_h = detail::parse_double(f.at(1));
        row.lower_bound = detail::parse_double(f.at(2));
        row.k_p = detail::parse_double(f.at(3));
        r.rows.push_back(row);
    }
    return r;
}

inline nlohmann::json to_json(const BlowupReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"h", row.h},
                        {"theta_h", row.theta_h},
                        {"lower_bound", row.lower_bound},
                        {"k_p", row.k_p}});
    return {{"report", "corner"}, {"theta", r.theta}, {"p", r.p}, {"rows", rows}};
}

inline BlowupReport blowup_from_json(const nlohmann::json& j) {
    BlowupReport r;
    r.theta = j.at("theta").get<double>();
    r.p = j.at("p").get<double>();
    for (const auto& jr : j.at("rows"))
        r.rows.push_back({jr.at("h").get<std::int64_t>(), jr.at("theta_h").get<double>(),
                          jr.at("lower_bound").get<double>(), jr.at("k_p").get<double>()});
    return r;
}

// --------------------------- RelaxationReport -----------------------------

inline void write_csv(const RelaxationReport& r, std::ostream& os) {
    os << "# report=relax\n";
    os << "# curve=" << r.curve << '\n';
    os << "# p=" << detail::fmt17(r.p) << '\n';
    os << "# value=" << detail::fmt17(r.value) << '\n';
    os << "# diverging=" << (r.diverging ? 1 : 0) << '\n';
    os << "eps,candidates,min_k_p\n";
    for (const auto& row : r.rows)
        os << detail::fmt17(row.eps) << ',' << row.candidates << ','
           << detail::fmt17(row.min_k_p) << '\n';
}

inline RelaxationReport parse_relaxation_csv(std::istream& in) {
    RelaxationReport r;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "curve") r.curve = val;
            else if (key == "p") r.p = detail::parse_double(val);
            else if (key == "value") r.value = detail::parse_double(val);
            else if (key == "diverging") r.diverging = val == "1";
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        r.rows.push_back({detail::parse_double(f.at(0)), std::stoll(f.at(1)),
                          detail::parse_double(f.at(2))});
    }
    return r;
}

inline nlohmann::json to_json(const RelaxationReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back(
            {{"eps", row.eps}, {"candidates", row.candidates}, {"min_k_p", row.min_k_p}});
    return {{"report", "relax"},   {"curve", r.curve}, {"p", r.p},
            {"value", r.value},    {"diverging", r.diverging}, {"rows", rows}};
}

inline RelaxationReport relaxation_from_json(const nlohmann::json& j) {
    RelaxationReport r;
    r.curve = j.at("curve").get<std::string>();
    r.p = j.at("p").get<double>();
    r.value = j.at("value").get<double>();
    r.diverging = j.at("diverging").get<bool>();
    for (const auto& jr : j.at("rows"))
        r.rows.push_back({jr.at("eps").get<double>(), jr.at("candidates").get<std::int64_t>(),
                          jr.at("min_k_p").get<double>()});
    return r;
}

// ------------------------- CounterexampleResult ---------------------------

inline void write_csv(const CounterexampleResult& r, std::ostream& os) {
    os << "# report=counterexample\n";
    os << "# phi=" << detail::fmt17(r.phi) << '\n';
    os << "# n=" << r.n << '\n';
    os << "# extra_time=" << detail::fmt17(r.extra_time) << '\n';
    os << "k_star_P,k_star_P_prime,integral_k1,margin_vertex,margin_integral\n";
    os << detail::fmt17(r.k_star_P) << ',' << detail::fmt17(r.k_star_P_prime) << ','
       << detail::fmt17(r.integral_k1) << ',' << detail::fmt17(r.margin_vertex()) << ','
       << detail::fmt17(r.margin_integral()) << '\n';
}

inline CounterexampleResult parse_counterexample_csv(std::istream& in) {
    CounterexampleResult r;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "phi") r.phi = detail::parse_double(val);
            else if (key == "n") r.n = std::stoi(val);
            else if (key == "extra_time") r.extra_time = detail::parse_double(val);
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        r.k_star_P = detail::parse_double(f.at(0));
        r.k_star_P_prime = detail::parse_double(f.at(1));
        r.integral_k1 = detail::parse_double(f.at(2));
    }
    return r;
}

inline nlohmann::json to_json(const CounterexampleResult& r) {
    return {{"report", "counterexample"},
            {"phi", r.phi},
            {"n", r.n},
            {"extra_time", r.extra_time},
            {"k_star_P", r.k_star_P},
            {"k_star_P_prime", r.k_star_P_prime},
            {"integral_k1", r.integral_k1},
            {"margin_vertex", r.margin_vertex()},
            {"margin_integral", r.margin_integral()}};
}

inline CounterexampleResult counterexample_from_json(const nlohmann::json& j) {
    CounterexampleResult r;
    r.phi = j.at("phi").get<double>();
    r.n = j.at("n").get<int>();
    r.extra_time = j.at("extra_time").get<double>();
    r.k_star_P = j.at("k_star_P").get<double>();
    r.k_star_P_prime = j.at("k_star_P_prime").get<double>();
    r.integral_k1 = j.at("integral_k1").get<double>();
    return r;
}

// ------------------------------- BendTable --------------------------------

inline void write_csv(const BendTable& t, std::ostream& os) {
    os << "# report=bend-table\n";
    os << "ell,theta,p,closed_form,per_arc,quadrature\n";
    for (const auto& row : t.rows)
        os << detail::fmt17(row.ell) << ',' << detail::fmt17(row.theta) << ','
           << detail::fmt17(row.p) << ',' << detail::fmt17(row.closed_form) << ','
           << detail::fmt17(row.per_arc) << ',' << detail::fmt17(row.quadrature) << '\n';
}

inline BendTable parse_bend_table_csv(std::istream& in) {
    BendTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        t.rows.push_back({detail::parse_double(f.at(0)), detail::parse_double(f.at(1)),
                          detail::parse_double(f.at(2)), detail::parse_double(f.at(3)),
                          detail::parse_double(f.at(4)), detail::parse_double(f.at(5))});
    }
    return t;
}

inline nlohmann::json to_json(const BendTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows)
        rows.push_back({{"ell", row.ell},
                        {"theta", row.theta},
                        {"p", row.p},
                        {"closed_form", row.closed_form},
                        {"per_arc", row.per_arc},
                        {"quadrature", row.quadrature}});
    return {{"report", "bend-table"}, {"rows", rows}};
}

inline BendTable bend_table_from_json(const nlohmann::json& j) {
    BendTable t;
    for (const auto& jr : j.at("rows"))
        t.rows.push_back({jr.at("ell").get<double>(), jr.at("theta").get<double>(),
                          jr.at("p").get<double>(), jr.at("closed_form").get<double>(),
                          jr.at("per_arc").get<double>(), jr.at("quadrature").get<double>()});
    return t;
}

// --------------------------- ConformalCheckReport -------------------------

inline void write_csv(const ConformalCheckReport& r, std::ostream& os) {
    os << "# report=conformal-check\n";
    os << "# seed=" << r.seed << '\n';
    os << "# max_rel_diff=" << detail::fmt17(r.max_rel_diff) << '\n';
    os << "# equator_max_abs_k=" << detail::fmt17(r.equator_max_abs_k) << '\n';
    os << "family,t,k_formula,k_fd,rel_diff\n";
    for (const auto& row : r.rows)
        os << row.family << ',' << detail::fmt17(row.t) << ',' << detail::fmt17(row.k_formula)
           << ',' << detail::fmt17(row.k_fd) << ',' << detail::fmt17(row.rel_diff) << '\n';
}

inline ConformalCheckReport parse_conformal_check_csv(std::istream& in) {
    ConformalCheckReport r;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "seed") r.seed = std::stoull(val);
            else if (key == "max_rel_diff") r.max_rel_diff = detail::parse_double(val);
            else if (key == "equator_max_abs_k") r.equator_max_abs_k = detail::parse_double(val);
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        r.rows.push_back({f.at(0), detail::parse_double(f.at(1)), detail::parse_double(f.at(2)),
                          detail::parse_double(f.at(3)), detail::parse_double(f.at(4))});
    }
    return r;
}

inline nlohmann::json to_json(const ConformalCheckReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"family", row.family},
                        {"t", row.t},
                        {"k_formula", row.k_formula},
                        {"k_fd", row.k_fd},
                        {"rel_diff", row.rel_diff}});
    return {{"report", "conformal-check"},
            {"seed", r.seed},
            {"max_rel_diff", r.max_rel_diff},
            {"equator_max_abs_k", r.equator_max_abs_k},
            {"rows", rows}};
}

inline ConformalCheckReport conformal_check_from_json(const nlohmann::json& j) {
    ConformalCheckReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.max_rel_diff = j.at("max_rel_diff").get<double>();
    r.equator_max_abs_k = j.at("equator_max_abs_k").get<double>();
    for (const auto& jr : j.at("rows"))
        r.rows.push_back({jr.at("family").get<std::string>(), jr.at("t").get<double>(),
                          jr.at("k_formula").get<double>(), jr.at("k_fd").get<double>(),
                          jr.at("rel_diff").get<double>()});
    return r;
}

template <typename Report>
std::string csv_string(const Report& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

template <typename Report>
std::string json_string(const Report& r) {
    return to_json(r).dump(2) + "\n";
}

} // namespace pcurv
