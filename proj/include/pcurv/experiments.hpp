#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pcurv/bend.hpp"
#include "pcurv/conformal.hpp"
#include "pcurv/curve.hpp"
#include "pcurv/errors.hpp"
#include "pcurv/polygonal.hpp"

namespace pcurv {

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    double ell = 0.0;
    std::int64_t h = 0;
    double mesh = 0.0;
    double modulus = 0.0;
    double k_p = 0.0;
    double reference = 0.0;
    double rel_error = 0.0;
};

/// Numerical witness of k_p(P_h) -> integral of |k|^p as the scale shrinks.
struct ConvergenceReport {
    std::string curve;
    double p = 0.0;
    double reference = 0.0;
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> notes; // skipped-row diagnostics
};

struct BlowupRow {
    std::int64_t h = 0;
    double theta_h = 0.0;
    double lower_bound = 0.0; // h^(p-1) * theta_h^p
    double k_p = 0.0;
};

struct BlowupReport {
    double theta = 0.0;
    double p = 0.0;
    std::vector<BlowupRow> rows;
};

struct RelaxationRow {
    double eps = 0.0;
    std::int64_t candidates = 0;
    double min_k_p = 0.0;
};

/// One-sided estimate of the relaxed functional over the equilateral family.
/// Not the full infimum over all inscriptions; on W^{2,p} test curves the
/// equilateral sequence already attains the limit.
struct RelaxationReport {
    std::string curve;
    double p = 0.0;
    std::vector<RelaxationRow> rows;
    double value = 0.0; // min k_p at the smallest eps
    bool diverging = false;
};

struct CounterexampleResult {
    double phi = 0.0;
    int n = 0;
    double extra_time = 0.0;
    double k_star_P = 0.0;
    double k_star_P_prime = 0.0;
    double integral_k1 = 0.0; // over one full turn of the parallel
    double margin_vertex() const { return k_star_P - k_star_P_prime; }
    double margin_integral() const { return k_star_P - integral_k1; }
};

struct BendTableRow {
    double ell = 0.0;
    double theta = 0.0;
    double p = 0.0;
    double closed_form = 0.0;
    double per_arc = 0.0;    // exact |cot Phi|^p * arc length via build_gamma
    double quadrature = 0.0; // finite-difference quadrature along gamma(P)
};

struct BendTable {
    std::vector<BendTableRow> rows;
};

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

/// Convergence of the p-rotation along an equilateral schedule. Uses the
/// exactly closing marching variant so no irregular last edge pollutes the
/// error decay. Marching failures skip the row and leave a note.
inline ConvergenceReport convergence_study(const ParamCurve& c, double p,
                                           std::span<const double> ell_schedule,
                                           std::string curve_desc = "",
                                           int modulus_samples = 64) {
    if (ell_schedule.empty()) throw ScheduleError("convergence_study: empty schedule");
    for (std::size_t i = 1; i < ell_schedule.size(); ++i)
        if (ell_schedule[i] >= ell_schedule[i - 1])
            throw ScheduleError("convergence_study: schedule not strictly decreasing");
    if (p < 1.0) throw std::invalid_argument("convergence_study: p must be >= 1");

    ConvergenceReport rep;
    rep.curve = std::move(curve_desc);
    rep.p = p;
    rep.reference = integral_kp(c, p);
    for (double ell : ell_schedule) {
        try {
            const Polygonal poly = inscribe_equilateral(c, ell, /*exact_close=*/true);
            ConvergenceRow row;
            row.ell = ell;
            row.h = static_cast<std::int64_t>(poly.edge_count());
            row.mesh = poly.mesh();
            row.modulus = modulus(c, poly, modulus_samples);
            row.k_p = p_rotation(poly, p);
            row.reference = rep.reference;
            row.rel_error = rep.reference > 1e-14
                                ? std::abs(row.k_p - rep.reference) / rep.reference
                                : std::abs(row.k_p - rep.reference);
            rep.rows.push_back(row);
        } catch (const NumericalError& e) {
            rep.notes.push_back("ell=" + std::to_string(ell) + " skipped: " + e.what());
        }
    }
    return rep;
}

inline RelaxationReport relaxation_estimate(const ParamCurve& c, double p,
                                            std::span<const double> eps_schedule,
                                            std::string curve_desc = "",
                                            int modulus_samples = 64) {
    if (eps_schedule.empty()) throw ScheduleError("relaxation_estimate: empty schedule");
    for (std::size_t i = 1; i < eps_schedule.size(); ++i)
        if (eps_schedule[i] >= eps_schedule[i - 1])
            throw ScheduleError("relaxation_estimate: schedule not strictly decreasing");
    if (p < 1.0) throw std::invalid_argument("relaxation_estimate: p must be >= 1");

    const double total = c.unit_speed() ? c.t_end() - c.t_begin() : c.length();
    RelaxationReport rep;
    rep.curve = std::move(curve_desc);
    rep.p = p;
    for (double eps : eps_schedule) {
        RelaxationRow row;
        row.eps = eps;
        std::optional<double> best;
        for (int j = 1; j <= 4; ++j) {
            const double ell = eps / std::pow(2.0, j);
            if (!(ell > 0.0 && ell < std::min(kPi / 2.0, total))) continue;
            try {
                const Polygonal poly = inscribe_equilateral(c, ell, /*exact_close=*/true);
                if (modulus(c, poly, modulus_samples) >= eps) continue;
                const double kp = p_rotation(poly, p);
                if (!best || kp < *best) best = kp;
                ++row.candidates;
            } catch (const NumericalError&) {
                continue;
            }
        }
        if (!best)
            throw ScheduleError("relaxation_estimate: Sigma_eps empty at eps = " +
                                std::to_string(eps));
        row.min_k_p = *best;
        rep.rows.push_back(row);
    }
    rep.value = rep.rows.back().min_k_p;

    // Divergence heuristic: strictly increasing along the schedule and
    // growing by half again overall. The absolute floor keeps rounding
    // noise on curvature-free curves from tripping the flag.
    if (rep.rows.size() >= 3) {
        bool increasing = true;
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            if (rep.rows[i].min_k_p <= rep.rows[i - 1].min_k_p) increasing = false;
        rep.diverging = increasing && rep.rows.front().min_k_p > 1e-9 &&
                        rep.rows.back().min_k_p >= 1.5 * rep.rows.front().min_k_p;
    }
    return rep;
}

/// The NoCorners blow-up: for a corner of angle theta, the 3-point
/// inscription at parameter distance 1/h gives k_p >= h^(p-1) theta_h^p,
/// which explodes as h grows (p > 1).
inline BlowupReport corner_blowup_study(double theta, double p,
                                        std::span<const std::int64_t> h_schedule) {
    if (!(p > 1.0)) throw std::invalid_argument("corner_blowup_study: p must be > 1");
    if (h_schedule.empty()) throw ScheduleError("corner_blowup_study: empty schedule");
    std::int64_t h_min = h_schedule[0];
    for (std::int64_t h : h_schedule) {
        if (h < 2) throw ScheduleError("corner_blowup_study: h must be >= 2");
        h_min = std::min(h_min, h);
    }
    const double arm = std::min(1.25 / static_cast<double>(h_min), 1.5);
    const ParamCurve c = make_corner_curve(theta, arm);

    BlowupReport rep;
    rep.theta = theta;
    rep.p = p;
    for (std::int64_t h : h_schedule) {
        const double step = 1.0 / static_cast<double>(h);
        const Polygonal poly = inscribe_at_times(c, {arm - step, arm, arm + step});
        BlowupRow row;
        row.h = h;
        row.theta_h = poly.turning_angles().front();
        row.lower_bound = std::pow(static_cast<double>(h), p - 1.0) * std::pow(row.theta_h, p);
        row.k_p = p_rotation(poly, p);
        rep.rows.push_back(row);
    }
    return rep;
}

/// The positive-curvature monotonicity counterexample: a regular n-gon
/// inscribed in a parallel has larger rotation than both its one-vertex
/// refinement and the curvature integral of one turn.
///
/// All n corners of the closed n-gon must appear as interior vertices of an
/// open polygonal, so the host curve winds (n+1)/n turns around the parallel
/// and the inscription times step through n+1 edges; the corner angle
/// multiset is then exactly that of the closed n-gon.
inline CounterexampleResult monotonicity_counterexample(double phi, int n,
                                                        double extra_time = -1.0) {
    if (n < 3) throw std::invalid_argument("monotonicity_counterexample: n must be >= 3");
    const ParamCurve c = make_parallel(phi, (static_cast<double>(n) + 1.0) / n);
    const double edge_t = 2.0 * kPi * std::sin(phi) / n;

    std::vector<double> times;
    for (int i = 0; i <= n + 1; ++i) times.push_back(edge_t * i);
    times.back() = c.t_end(); // same value up to rounding
    const double total = c.t_end();
    double extra = extra_time;
    if (extra < 0.0) extra = (static_cast<double>((n + 1) / 2) + 0.5) * edge_t;
    if (!(extra > 0.0 && extra < total))
        throw std::invalid_argument("monotonicity_counterexample: extra time outside the curve");
    for (double t : times)
        if (std::abs(t - extra) < 1e-9)
            throw std::invalid_argument(
                "monotonicity_counterexample: extra time collides with an n-gon vertex");

    const Polygonal P = inscribe_at_times(c, times);
    std::vector<double> times2 = times;
    times2.push_back(extra);
    std::sort(times2.begin(), times2.end());
    const Polygonal P2 = inscribe_at_times(c, times2);

    CounterexampleResult res;
    res.phi = phi;
    res.n = n;
    res.extra_time = extra;
    res.k_star_P = intrinsic_rotation(P);
    res.k_star_P_prime = intrinsic_rotation(P2);
    res.integral_k1 = integral_kp(make_parallel(phi, 1.0), 1.0);
    return res;
}

// ---------------------------------------------------------------------------
// Dual evaluation of the bend formula
// ---------------------------------------------------------------------------

/// Single-corner equilateral polygonal with edge length ell and turning
/// angle theta, in the canonical vertex frame.
inline Polygonal single_corner_polygonal(double ell, double theta) {
    const double K = std::sin(theta / 2.0);
    const double S = std::cos(theta / 2.0);
    const double s = std::sin(ell);
    const double c = std::cos(ell);
    return Polygonal::from_vertices({SpherePoint(K * s, -S * s, c), SpherePoint(0.0, 0.0, 1.0),
                                     SpherePoint(K * s, S * s, c)});
}

/// Integral of |k|^p along gamma(P) evaluated "the hard way": position
/// samples only, curvature by centered differences (two Richardson levels),
/// Simpson per piece. Cross-checks the exact per-arc sums.
inline double fd_curvature_integral(const GluedCurve& g, double p, int n_samples = 10000) {
    const double total = g.total_length();
    double integral = 0.0;
    for (const auto& piece : g.pieces) {
        const double len = GluedCurve::length_of(piece);
        if (len < 1e-12) continue;
        // Step small against the local radius so high derivatives stay tame.
        double hfd = 1e-3;
        if (const auto* b = std::get_if<BendArc>(&piece)) hfd = std::min(hfd, b->radius() / 50.0);
        hfd = std::min(hfd, len / 10.0);
        auto pos = [&piece](double s) {
            return std::visit([s](const auto& x) { return x.point_at(s); }, piece);
        };
        auto curv_p = [&](double s) {
            // Constant curvature per piece: shifting the stencil is exact.
            const double sc = std::clamp(s, 4.0 * hfd, len - 4.0 * hfd);
            auto d2 = [&](double hh) {
                return (pos(sc + hh) - 2.0 * pos(sc) + pos(sc - hh)) / (hh * hh);
            };
            const Vec3 a1 = d2(hfd);
            const Vec3 a2 = d2(hfd / 2.0);
            const Vec3 a3 = d2(hfd / 4.0);
            const Vec3 b1 = (4.0 * a2 - a1) / 3.0; // kills the h^2 term
            const Vec3 b2 = (4.0 * a3 - a2) / 3.0;
            const Vec3 acc = (16.0 * b2 - b1) / 15.0; // kills the h^4 term
            return std::pow(norm(acc + pos(sc)), p);
        };
        int m = std::max(8, static_cast<int>(std::lround(n_samples * len / total)));
        if (m % 2 == 1) ++m; // Simpson needs an even interval count
        const double hstep = len / m;
        double acc = curv_p(0.0) + curv_p(len);
        for (int k = 1; k < m; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * curv_p(k * hstep);
        integral += acc * hstep / 3.0;
    }
    return integral;
}

inline BendTable bend_formula_table(std::span<const double> ells, std::span<const double> thetas,
                                    std::span<const double> ps, int quad_samples = 10000) {
    BendTable table;
    for (double ell : ells)
        for (double theta : thetas)
            for (double p : ps) {
                const Polygonal poly = single_corner_polygonal(ell, theta);
                BendTableRow row;
                row.ell = ell;
                row.theta = theta;
                row.p = p;
                row.closed_form = fp_closed_form(ell, theta, p);
                row.per_arc = p_rotation(poly, p);
                row.quadrature = fd_curvature_integral(build_gamma(poly), p, quad_samples);
                table.rows.push_back(row);
            }
    return table;
}

// ---------------------------------------------------------------------------
// Conformal lemma check
// ---------------------------------------------------------------------------

struct ConformalCheckRow {
    std::string family;
    double t = 0.0;
    double k_formula = 0.0; // conformal_curvature at the planar point
    double k_fd = 0.0;      // finite-difference curvature of the pushforward
    double rel_diff = 0.0;
};

struct ConformalCheckReport {
    std::uint64_t seed = 0;
    std::vector<ConformalCheckRow> rows;
    double max_rel_diff = 0.0;
    double equator_max_abs_k = 0.0; // circle of radius 2 must land on the equator
};

/// Compare conformal_curvature against finite-difference geodesic curvature
/// of the arclength-reparametrized pushforward, on a line, a circle and a
/// spiral (domains chosen so |k| stays away from zero and the relative
/// comparison is meaningful).
inline ConformalCheckReport conformal_lemma_check(int samples_per_family = 50,
                                                  std::uint64_t seed = 0) {
    ConformalCheckReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);

    struct Family {
        std::string name;
        PlanarCurve g;
    };
    const Family families[] = {
        {"line", make_line({0.0, 0.3}, {1.0, 0.0}, -1.5, 1.5)},
        {"circle", make_planar_circle({0.5, -0.2}, 0.8, 0.0, 2.0 * kPi)},
        {"spiral", make_spiral(0.5, 0.6, 2.5)},
    };

    for (const auto& fam : families) {
        const ParamCurve push = pushforward_curve(fam.g);
        const ParamCurve unit = arclength_reparam(push);
        // Position-only view so the curvature really comes out of finite
        // differences rather than the analytic chain rule. The step must
        // stay well above the 1e-12 quantization of the arc-length table
        // inversion or the second differences drown in it.
        auto posfn = [unit](double s) { return unit.position_vec(s); };
        const ParamCurve fd_view = ParamCurve::numeric(unit.t_begin(), unit.t_end(), posfn,
                                                       /*unit_speed=*/true, {}, 1e-2);

        std::uniform_real_distribution<double> u(0.03, 0.97);
        std::vector<double> ts(static_cast<std::size_t>(samples_per_family));
        for (auto& t : ts) t = fam.g.t_begin() + u(rng) * (fam.g.t_end() - fam.g.t_begin());
        std::sort(ts.begin(), ts.end());

        for (double t : ts) {
            ConformalCheckRow row;
            row.family = fam.name;
            row.t = t;
            row.k_formula = conformal_curvature(fam.g.signed_curvature(t), fam.g.position(t),
                                                fam.g.conormal(t));
            const double s =
                integrate_adaptive([&push](double tau) { return push.speed(tau); },
                                   push.t_begin(), t, 64)
                    .value;
            row.k_fd = geodesic_curvature_at(fd_view, s);
            row.rel_diff = std::abs(std::abs(row.k_formula) - row.k_fd) /
                           std::max(row.k_fd, 1e-12);
            rep.max_rel_diff = std::max(rep.max_rel_diff, row.rel_diff);
            rep.rows.push_back(row);
        }
    }

    // The radius-2 circle maps onto the equator; its curvature must vanish.
    const ParamCurve eq =
        arclength_reparam(pushforward_curve(make_planar_circle({0.0, 0.0}, 2.0, 0.0, 2.0 * kPi)));
    for (int i = 1; i < 40; ++i) {
        const double s = eq.t_end() * i / 40.0;
        rep.equator_max_abs_k = std::max(rep.equator_max_abs_k, geodesic_curvature_at(eq, s));
    }
    return rep;
}

} // namespace pcurv
