#pragma once

#include <cstdlib>
#include <future>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pcurv/curve.hpp"
#include "pcurv/errors.hpp"
#include "pcurv/quadrature.hpp"
#include "pcurv/sphere.hpp"

namespace pcurv {

/// Geodesic polygonal inscribed in a curve: inscription times, vertices on
/// the curve, minimizing geodesic edges.
struct Polygonal {
    std::vector<double> times;
    std::vector<SpherePoint> vertices;
    std::vector<GeodesicSegment> edges;
    std::vector<double> edge_lengths;

    std::size_t edge_count() const { return edges.size(); }

    double total_length() const {
        double s = 0.0;
        for (double l : edge_lengths) s += l;
        return s;
    }

    double mesh() const {
        double m = 0.0;
        for (double l : edge_lengths) m = std::max(m, l);
        return m;
    }

    /// Turning angles at interior vertices i = 1..h-1 (never at the open ends).
    std::vector<double> turning_angles() const {
        std::vector<double> out;
        for (std::size_t i = 1; i < edges.size(); ++i)
            out.push_back(turning_angle(edges[i - 1].end_tangent(), edges[i].start_tangent()));
        return out;
    }

    /// Polygonal from raw vertices; times become cumulative edge lengths, so
    /// the polygonal is inscribed in its own geodesic path.
    static Polygonal from_vertices(std::vector<SpherePoint> verts) {
        if (verts.size() < 2) throw std::invalid_argument("Polygonal: need at least 2 vertices");
        Polygonal p;
        p.vertices = std::move(verts);
        p.times.push_back(0.0);
        for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
            p.edges.emplace_back(p.vertices[i], p.vertices[i + 1]);
            p.edge_lengths.push_back(p.edges.back().length());
            p.times.push_back(p.times.back() + p.edges.back().length());
        }
        return p;
    }
};

/// Summary statistics of an inscribed polygonal.
struct PolygonalStats {
    double mesh = 0.0;
    double modulus = 0.0;
    std::vector<double> turning_angles;
    double intrinsic_rotation = 0.0;
};

inline Polygonal inscribe_at_times(const ParamCurve& c, std::vector<double> times) {
    if (times.size() < 2) throw std::invalid_argument("inscribe_at_times: need at least 2 times");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < c.t_begin() - 1e-12 || times[i] > c.t_end() + 1e-12)
            throw std::invalid_argument("inscribe_at_times: time outside curve domain");
        if (i > 0 && times[i] <= times[i - 1])
            throw std::invalid_argument("inscribe_at_times: times not strictly increasing");
    }
    Polygonal p;
    p.times = std::move(times);
    for (double t : p.times) p.vertices.push_back(c.position(t));
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
        if (geodesic_distance(p.vertices[i], p.vertices[i + 1]) >= kPi - 1e-9)
            throw InscriptionError("inscribe_at_times: consecutive samples are antipodal");
        p.edges.emplace_back(p.vertices[i], p.vertices[i + 1]);
        p.edge_lengths.push_back(p.edges.back().length());
    }
    return p;
}

namespace detail {

/// Find the next time t > t0 with d(c(t0), c(t)) = ell, or t_end() if the
/// chord never reaches ell (short last edge). `first_step` tightens the
/// failure diagnosis: a first step that runs out of curve means ell exceeds
/// the curve's chordal reach.
inline double march_step(const ParamCurve& c, double t0, double ell, bool first_step) {
    const SpherePoint p0 = c.position(t0);
    auto gap = [&](double t) { return geodesic_distance(p0, c.position(t)) - ell; };
    // A unit-speed curve is 1-Lipschitz, so the chord cannot reach ell
    // before t0 + ell; scan in half-ell steps afterwards.
    double hi = std::min(t0 + ell, c.t_end());
    if (gap(hi) >= 0.0) return bisect([&](double t) { return gap(t); }, t0, hi, 1e-13);
    while (hi < c.t_end()) {
        const double next = std::min(hi + 0.5 * ell, c.t_end());
        if (gap(next) >= 0.0)
            return bisect([&](double t) { return gap(t); }, hi, next, 1e-13);
        hi = next;
    }
    // Chord stayed short all the way to the end of the domain.
    if (first_step)
        throw MarchingError("inscribe_equilateral: chord never reaches ell from the start "
                            "(ell exceeds the curve's chordal reach)");
    if (c.t_end() - t0 > 2.0 * ell)
        throw MarchingError("inscribe_equilateral: curve doubles back within ell");
    return c.t_end();
}

inline std::vector<double> march_times(const ParamCurve& c, double ell) {
    std::vector<double> times{c.t_begin()};
    while (times.back() < c.t_end() - 1e-12) {
        const double tn = march_step(c, times.back(), ell, times.size() == 1);
        if (tn <= times.back() + 1e-14) break;
        times.push_back(tn);
    }
    return times;
}

} // namespace detail

/// Equilateral inscription: march from t_begin, solving each chord equation
/// d(c(t_i), c(t_{i+1})) = ell by bisection (chord accurate to 1e-12). The
/// last edge may be shorter. With exact_close the edge count h is fixed and
/// the edge length is re-solved (bisection on ell) so the closing edge is
/// exactly equilateral too, mirroring the lower-bound construction.
inline Polygonal inscribe_equilateral(const ParamCurve& c, double ell, bool exact_close = false) {
    const double total = c.unit_speed() ? c.t_end() - c.t_begin() : c.length();
    if (!(ell > 0.0 && ell < std::min(kPi / 2.0, total)))
        throw std::invalid_argument("inscribe_equilateral: need 0 < ell < min(pi/2, length)");
    std::vector<double> times = detail::march_times(c, ell);
    if (times.size() < 2) throw MarchingError("inscribe_equilateral: no edge could be placed");

    if (exact_close && times.size() >= 3) {
        const double lhat =
            geodesic_distance(c.position(times[times.size() - 2]), c.position(times.back()));
        if (std::abs(lhat - ell) > 1e-12) {
            const std::size_t h = times.size() - 1;
            // March h-1 chords of trial length and measure the closing gap.
            auto closing_gap = [&](double lp) {
                std::vector<double> ts{c.t_begin()};
                for (std::size_t i = 0; i + 1 < h; ++i) {
                    const double tn = detail::march_step(c, ts.back(), lp, i == 0);
                    if (tn >= c.t_end() - 1e-12) return -1.0; // overshot
                    ts.push_back(tn);
                }
                return geodesic_distance(c.position(ts.back()), c.position(c.t_end())) - lp;
            };
            // Shrinking the edge enlarges the closing edge, so the root lies
            // between lhat and ell.
            const double lstar =
                bisect(closing_gap, std::max(lhat, 1e-6 * ell), ell, 1e-14 * ell);
            std::vector<double> ts{c.t_begin()};
            for (std::size_t i = 0; i + 1 < h; ++i)
                ts.push_back(detail::march_step(c, ts.back(), lstar, i == 0));
            ts.push_back(c.t_end());
            times = std::move(ts);
        }
    }
    return inscribe_at_times(c, std::move(times));
}

namespace detail {

inline int modulus_thread_cap() {
    if (const char* env = std::getenv("SPHERE_PCURV_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Geodesic diameter of one arc by dense pairwise sampling on a dyadic grid.
inline double arc_diameter(const ParamCurve& c, double ta, double tb, int n_samples) {
    std::vector<Vec3> pts(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k)
        pts[static_cast<std::size_t>(k)] =
            c.position(ta + (tb - ta) * static_cast<double>(k) / (n_samples - 1)).vec();
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d =
                std::atan2(norm(cross(pts[i], pts[j])), clamp_unit(dot(pts[i], pts[j])));
            best = std::max(best, d);
        }
    return best;
}

} // namespace detail

/// Modulus of P in c: the largest geodesic diameter among the sub-arcs of c
/// cut by consecutive vertices. Sampled from below on nested dyadic grids
/// (n_samples is rounded up to 2^k + 1 so refining never loses a sample);
/// the per-arc work may run on several threads, but max() is order-free so
/// the result is bit-identical either way.
inline double modulus(const ParamCurve& c, const Polygonal& p, int n_samples = 64) {
    int n = 3;
    while (n < std::max(n_samples, 3)) n = 2 * (n - 1) + 1;
    const std::size_t arcs = p.edge_count();
    const int threads =
        std::min<int>(detail::modulus_thread_cap(), static_cast<int>(arcs));
    double best = 0.0;
    if (threads <= 1 || arcs < 8) {
        for (std::size_t i = 0; i < arcs; ++i)
            best = std::max(best, detail::arc_diameter(c, p.times[i], p.times[i + 1], n));
        return best;
    }
    std::vector<std::future<double>> futs;
    for (int w = 0; w < threads; ++w) {
        futs.push_back(std::async(std::launch::async, [&, w] {
            double local = 0.0;
            for (std::size_t i = static_cast<std::size_t>(w); i < arcs;
                 i += static_cast<std::size_t>(threads))
                local = std::max(local, detail::arc_diameter(c, p.times[i], p.times[i + 1], n));
            return local;
        }));
    }
    for (auto& f : futs) best = std::max(best, f.get());
    return best;
}

/// Sum of the turning angles at the interior vertices.
inline double intrinsic_rotation(const Polygonal& p) {
    if (p.edge_count() < 2)
        throw std::invalid_argument("intrinsic_rotation: polygonal needs at least 2 edges");
    double s = 0.0;
    for (double a : p.turning_angles()) s += a;
    return s;
}

inline PolygonalStats polygonal_stats(const ParamCurve& c, const Polygonal& p,
                                      int n_samples = 64) {
    PolygonalStats st;
    st.mesh = p.mesh();
    st.modulus = modulus(c, p, n_samples);
    st.turning_angles = p.turning_angles();
    for (double a : st.turning_angles) st.intrinsic_rotation += a;
    return st;
}

/// Euclidean p-rotation of an equilateral polygonal with edge length ell:
/// sum over corners of (ell/2)^(1-p) * theta * tan^(p-1)(theta/2).
inline double euclidean_p_rotation(double ell, std::span<const double> thetas, double p) {
    if (!(ell > 0.0)) throw std::invalid_argument("euclidean_p_rotation: ell must be positive");
    if (p < 1.0) throw std::invalid_argument("euclidean_p_rotation: p must be >= 1");
    double sum = 0.0;
    for (double th : thetas) {
        if (th < 0.0 || th >= kPi)
            throw SingularAngleError("euclidean_p_rotation: turning angle must be in [0, pi)");
        if (th == 0.0) continue;
        sum += std::pow(ell / 2.0, 1.0 - p) * th * std::pow(std::tan(th / 2.0), p - 1.0);
    }
    return sum;
}

/// CSV export: i,t,x,y,z,edge_length,theta. edge_length is the edge leaving
/// vertex i (blank on the last row); theta is blank at the open ends.
inline void export_polygonal_csv(const Polygonal& p, std::ostream& os) {
    const auto thetas = p.turning_angles();
    os << "i,t,x,y,z,edge_length,theta\n";
    char buf[512];
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        const Vec3& v = p.vertices[i].vec();
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,", i, p.times[i], v.x, v.y,
                      v.z);
        os << buf;
        if (i < p.edge_lengths.size()) {
            std::snprintf(buf, sizeof buf, "%.17g", p.edge_lengths[i]);
            os << buf;
        }
        os << ',';
        if (i >= 1 && i + 1 < p.vertices.size()) {
            std::snprintf(buf, sizeof buf, "%.17g", thetas[i - 1]);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace pcurv
