#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <variant>
#include <vector>

#include "pcurv/errors.hpp"
#include "pcurv/polygonal.hpp"
#include "pcurv/sphere.hpp"

namespace pcurv {

/// Psi(theta, ell) = sqrt(sin^2(ell/2) + sin^2(theta/2) cos^2(ell/2)),
/// the half-chord of the bend circle.
inline double bend_psi(double theta, double ell) {
    const double sl = std::sin(ell / 2.0);
    const double cl = std::cos(ell / 2.0);
    const double st = std::sin(theta / 2.0);
    return std::sqrt(sl * sl + st * st * cl * cl);
}

/// Closed-form p-rotation contribution of one corner with turning angle
/// theta on an equilateral polygonal of edge length ell:
///
///   2 atan(Psi / (cos(theta/2) cos(ell/2))) * (1/Psi)
///     * sin^p(theta/2) / (cos(theta/2) sin(ell/2))^(p-1).
///
/// Continuous on the domain, 0 at theta = 0, and blows up as theta -> pi
/// for p > 1.
inline double fp_closed_form(double ell, double theta, double p) {
    if (!(ell > 0.0 && ell < kPi)) throw std::invalid_argument("fp_closed_form: ell out of (0, pi)");
    if (p < 1.0) throw std::invalid_argument("fp_closed_form: p must be >= 1");
    if (theta < 0.0 || theta >= kPi)
        throw SingularAngleError("fp_closed_form: theta must be in [0, pi)");
    if (theta == 0.0) return 0.0;
    const double psi = bend_psi(theta, ell);
    const double ct = std::cos(theta / 2.0);
    const double st = std::sin(theta / 2.0);
    const double cl = std::cos(ell / 2.0);
    const double sl = std::sin(ell / 2.0);
    return 2.0 * std::atan2(psi, ct * cl) / psi * std::pow(st, p) / std::pow(ct * sl, p - 1.0);
}

/// Arc of a small circle (a "bend"): the set of points at angle `colatitude`
/// from `axis`, traversed from angle_start to angle_end in the (a1, a2)
/// frame. The triple (a1, a2, axis) is orthonormal but may be left-handed
/// after mapping into world coordinates; only linear combinations of it are
/// ever used. Geodesic curvature is |cot(colatitude)| by construction.
struct BendArc {
    Vec3 axis;
    Vec3 a1;
    Vec3 a2;
    double colatitude = 0.0;
    double angle_start = 0.0;
    double angle_end = 0.0;

    double radius() const { return std::sin(colatitude); }
    double length() const { return std::abs(angle_end - angle_start) * radius(); }
    double curvature() const { return std::abs(std::cos(colatitude) / std::sin(colatitude)); }

    Vec3 point_at_angle(double u) const {
        return std::cos(colatitude) * axis +
               radius() * (std::cos(u) * a1 + std::sin(u) * a2);
    }

    /// Position at arc length s in [0, length()], measured from angle_start.
    Vec3 point_at(double s) const { return point_at_angle(angle_of(s)); }

    /// Unit tangent (direction of travel) at arc length s.
    Vec3 tangent_at(double s) const {
        const double u = angle_of(s);
        const double sgn = angle_end >= angle_start ? 1.0 : -1.0;
        return sgn * (-std::sin(u) * a1 + std::cos(u) * a2);
    }

private:
    double angle_of(double s) const {
        const double sgn = angle_end >= angle_start ? 1.0 : -1.0;
        return angle_start + sgn * s / radius();
    }
};

/// Trimmed straight piece of gamma(P). Zero length is legal (an interior
/// edge of an equilateral polygonal is consumed whole by its two bends);
/// the stored tangent keeps the travel direction well-defined anyway.
struct GeodesicPiece {
    Vec3 start;
    Vec3 tangent;
    double length = 0.0;

    Vec3 point_at(double s) const { return std::cos(s) * start + std::sin(s) * tangent; }
    Vec3 tangent_at(double s) const { return -std::sin(s) * start + std::cos(s) * tangent; }
};

/// Appendix-style canonical bend at a vertex sitting at the north pole with
/// edge tangents (-K, S, 0) / (K, S, 0), K = sin(theta/2), S = cos(theta/2).
struct CanonicalBend {
    BendArc arc;       // in the canonical vertex frame
    Vec3 trim_in;      // end of the kept part of the incoming edge, P(-delta)
    Vec3 trim_out;     // start of the kept part of the outgoing edge, P(+delta)
    Vec3 tan_in;       // travel direction at trim_in
    Vec3 tan_out;      // travel direction at trim_out
};

/// Constant-curvature replacement of the corner wedge [-delta, +delta]
/// around a canonical vertex. Returns nullopt for theta == 0 (no bend).
///
/// Construction: rotate the configuration about e2 so both trim velocities
/// become horizontal (tau = K c / Psi, sigma = s / Psi with s = sin(delta),
/// c = cos(delta)); in the rotated frame the connecting curve is the
/// parallel of colatitude Phi with cos(Phi) = K/Psi, traversed behind the
/// azimuth of the trim points. Mapping the circle frame back gives the arc
/// in vertex coordinates; gluing is C^1 because the rotated trim velocities
/// are exactly tangent to that parallel.
inline std::optional<CanonicalBend> canonical_bend(double ell_half, double theta) {
    if (!(ell_half > 0.0 && ell_half < kPi / 2.0))
        throw std::invalid_argument("canonical_bend: need 0 < delta < pi/2");
    if (theta < 0.0 || theta >= kPi - 1e-9)
        throw SingularAngleError("canonical_bend: theta must be in [0, pi)");
    if (theta == 0.0) return std::nullopt;

    const double K = std::sin(theta / 2.0);
    const double S = std::cos(theta / 2.0);
    const double s = std::sin(ell_half);
    const double c = std::cos(ell_half);
    const double psi = std::sqrt(s * s + K * K * c * c);
    const double tau = K * c / psi;
    const double sig = s / psi;

    CanonicalBend b;
    b.trim_in = {K * s, -S * s, c};
    b.trim_out = {K * s, S * s, c};
    b.tan_in = {-K * c, S * c, s};
    b.tan_out = {K * c, S * c, -s};

    BendArc& arc = b.arc;
    arc.colatitude = std::atan2(S * s / psi, K / psi);
    arc.a1 = {tau, 0.0, -sig};
    arc.a2 = {0.0, 1.0, 0.0};
    arc.axis = {sig, 0.0, tau};
    const double u_plus = std::atan2(psi, -S * c);
    arc.angle_start = -u_plus;
    arc.angle_end = -u_plus - 2.0 * std::atan2(psi, S * c);

    // The construction is exact; anything beyond rounding is a logic error.
    const double mismatch =
        std::max({norm(arc.point_at(0.0) - b.trim_in), norm(arc.tangent_at(0.0) - b.tan_in),
                  norm(arc.point_at(arc.length()) - b.trim_out),
                  norm(arc.tangent_at(arc.length()) - b.tan_out)});
    if (mismatch > 1e-10)
        throw std::logic_error("canonical_bend: C1 matching failed (mismatch " +
                               std::to_string(mismatch) + ")");
    return b;
}

using GluedPiece = std::variant<GeodesicPiece, BendArc>;

/// gamma(P): the polygonal with every corner replaced by a constant-
/// curvature bend, C^1 at the 2h-2 junctions.
class GluedCurve {
public:
    struct Junction {
        Vec3 point_before, point_after;
        Vec3 tangent_before, tangent_after;
        double position_mismatch() const { return norm(point_before - point_after); }
        double tangent_mismatch() const { return norm(tangent_before - tangent_after); }
    };

    std::vector<GluedPiece> pieces;
    std::vector<Junction> junctions;

    double total_length() const {
        double s = 0.0;
        for (const auto& p : pieces) s += length_of(p);
        return s;
    }

    double max_junction_tangent_mismatch() const {
        double m = 0.0;
        for (const auto& j : junctions) m = std::max(m, j.tangent_mismatch());
        return m;
    }

    Vec3 point_at(double s) const {
        auto [i, local] = locate(s);
        return std::visit([local](const auto& p) { return p.point_at(local); }, pieces[i]);
    }

    Vec3 tangent_at(double s) const {
        auto [i, local] = locate(s);
        return std::visit([local](const auto& p) { return p.tangent_at(local); }, pieces[i]);
    }

    /// Piecewise-constant |k|: 0 on geodesic pieces, |cot(Phi)| on bends.
    double curvature_at(double s) const {
        auto [i, local] = locate(s);
        if (const auto* b = std::get_if<BendArc>(&pieces[i])) return b->curvature();
        return 0.0;
    }

    static double length_of(const GluedPiece& p) {
        if (const auto* b = std::get_if<BendArc>(&p)) return b->length();
        return std::get<GeodesicPiece>(p).length;
    }

private:
    std::pair<std::size_t, double> locate(double s) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const double len = length_of(pieces[i]);
            if (s <= acc + len || i + 1 == pieces.size())
                return {i, std::clamp(s - acc, 0.0, len)};
            acc += len;
        }
        return {0, 0.0};
    }
};

/// Per-vertex data of the bend construction: the trim half-length
/// delta_i = min(adjacent edge lengths)/2 and the isometry placing the
/// canonical vertex configuration at the actual vertex. The frame columns
/// send e3 to the vertex, and the canonical edge tangents (-K, S, 0) /
/// (K, S, 0) to the actual ones; it reverses orientation for one of the
/// two turn directions, which transfers bends just as well.
struct VertexBendSpec {
    std::size_t vertex = 0;
    double half_length = 0.0;
    double theta = 0.0;
    Vec3 frame_e1, frame_e2, frame_e3;

    Vec3 to_world(const Vec3& v) const {
        return v.x * frame_e1 + v.y * frame_e2 + v.z * frame_e3;
    }
};

inline std::vector<VertexBendSpec> vertex_bend_specs(const Polygonal& poly) {
    const std::size_t h = poly.edge_count();
    const auto thetas = poly.turning_angles();
    std::vector<VertexBendSpec> specs;
    for (std::size_t i = 1; i < h; ++i) {
        const double theta = thetas[i - 1];
        if (theta == 0.0) continue;
        VertexBendSpec spec;
        spec.vertex = i;
        spec.half_length = std::min(poly.edge_lengths[i - 1], poly.edge_lengths[i]) / 2.0;
        spec.theta = theta;
        const Vec3 t_in = poly.edges[i - 1].end_tangent();
        const Vec3 t_out = poly.edges[i].start_tangent();
        spec.frame_e1 = (t_out - t_in) / (2.0 * std::sin(theta / 2.0));
        spec.frame_e2 = (t_in + t_out) / (2.0 * std::cos(theta / 2.0));
        spec.frame_e3 = poly.vertices[i].vec();
        specs.push_back(spec);
    }
    return specs;
}

/// Build gamma(P): per interior vertex i, the bend of canonical_bend with
/// delta = min(adjacent edge lengths)/2, mapped into world coordinates by
/// the vertex isometry; edges are trimmed accordingly. For an h-edge
/// polygonal with all corners turning, the result has exactly 2h-1 pieces
/// (interior edges of an equilateral polygonal survive as zero-length
/// geodesic pieces) and 2h-2 junctions.
inline GluedCurve build_gamma(const Polygonal& poly) {
    const std::size_t h = poly.edge_count();
    if (h == 0) throw std::invalid_argument("build_gamma: empty polygonal");
    for (double l : poly.edge_lengths)
        if (l <= 1e-14) throw std::invalid_argument("build_gamma: zero-length edge");

    for (double th : poly.turning_angles())
        if (th >= kPi - 1e-6)
            throw SingularAngleError("build_gamma: turning angle too close to pi");

    // deltas[i]: trim taken off both edges at vertex i (0 at the open ends
    // and at straight vertices).
    std::vector<double> deltas(h + 1, 0.0);
    std::vector<std::optional<BendArc>> bends(h + 1);
    for (const VertexBendSpec& spec : vertex_bend_specs(poly)) {
        const auto cb = canonical_bend(spec.half_length, spec.theta);
        if (!cb) continue;
        deltas[spec.vertex] = spec.half_length;
        BendArc arc = cb->arc;
        arc.axis = spec.to_world(arc.axis);
        arc.a1 = spec.to_world(arc.a1);
        arc.a2 = spec.to_world(arc.a2);
        bends[spec.vertex] = arc;
    }

    GluedCurve g;
    for (std::size_t i = 0; i < h; ++i) {
        const double trimmed = poly.edge_lengths[i] - deltas[i] - deltas[i + 1];
        if (trimmed < -1e-12)
            throw std::logic_error("build_gamma: overlapping trims on edge " + std::to_string(i));
        GeodesicPiece gp;
        gp.start = poly.edges[i].point_at(deltas[i]).vec();
        gp.tangent = poly.edges[i].tangent_at(deltas[i]);
        gp.length = std::max(trimmed, 0.0);
        g.pieces.emplace_back(gp);
        if (i + 1 < h && bends[i + 1]) g.pieces.emplace_back(*bends[i + 1]);
    }

    for (std::size_t i = 0; i + 1 < g.pieces.size(); ++i) {
        GluedCurve::Junction j;
        const double len = GluedCurve::length_of(g.pieces[i]);
        std::visit(
            [&](const auto& p) {
                j.point_before = p.point_at(len);
                j.tangent_before = p.tangent_at(len);
            },
            g.pieces[i]);
        std::visit(
            [&](const auto& p) {
                j.point_after = p.point_at(0.0);
                j.tangent_after = p.tangent_at(0.0);
            },
            g.pieces[i + 1]);
        g.junctions.push_back(j);
    }
    return g;
}

/// p-rotation: integral of |k|^p along gamma(P), summed exactly per piece.
/// Geodesic pieces contribute nothing; a bend contributes
/// |cot(Phi)|^p * (arc length). On an equilateral polygonal this telescopes
/// to the sum of fp_closed_form over the corners.
inline double p_rotation(const Polygonal& poly, double p) {
    if (p < 1.0) throw std::invalid_argument("p_rotation: p must be >= 1");
    const GluedCurve g = build_gamma(poly);
    double sum = 0.0;
    for (const auto& piece : g.pieces)
        if (const auto* b = std::get_if<BendArc>(&piece))
            sum += std::pow(b->curvature(), p) * b->length();
    return sum;
}

/// Dense-sample CSV export of gamma(P): s,x,y,z,k.
inline void export_glued_csv(const GluedCurve& g, std::ostream& os, int n_samples = 2000) {
    os << "s,x,y,z,k\n";
    const double total = g.total_length();
    char buf[512];
    for (int i = 0; i < n_samples; ++i) {
        const double s = total * static_cast<double>(i) / (n_samples - 1);
        const Vec3 v = g.point_at(s);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s, v.x, v.y, v.z,
                      g.curvature_at(s));
        os << buf;
    }
}

} // namespace pcurv
