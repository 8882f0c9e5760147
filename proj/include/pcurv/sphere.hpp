#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "pcurv/errors.hpp"
#include "pcurv/vec3.hpp"

namespace pcurv {

inline constexpr double kPi = std::numbers::pi;

/// Unit tolerance accepted by SpherePoint before renormalizing; points
/// further from the sphere are rejected (same bound the CSV loader uses).
inline constexpr double kSphereNormTol = 1e-3;

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// A point of the unit sphere. The constructor renormalizes inputs that are
/// within kSphereNormTol of unit norm and rejects anything else.
class SpherePoint {
public:
    explicit SpherePoint(const Vec3& v) {
        const double n = norm(v);
        if (std::abs(n - 1.0) > kSphereNormTol)
            throw std::invalid_argument("SpherePoint: vector norm " + std::to_string(n) +
                                        " too far from 1");
        v_ = v / n;
    }
    SpherePoint(double x, double y, double z) : SpherePoint(Vec3{x, y, z}) {}

    const Vec3& vec() const { return v_; }
    operator const Vec3&() const { return v_; }
    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }

private:
    Vec3 v_;
};

/// Geodesic (great-circle) distance in radians, in [0, pi].
///
/// Computed as atan2(|p x q|, p.q), which agrees with arccos(clamp(p.q))
/// but stays fully accurate near 0 and pi; the clamp keeps the result
/// NaN-free when rounding pushes |p.q| above 1.
inline double geodesic_distance(const SpherePoint& p, const SpherePoint& q) {
    return std::atan2(norm(cross(p.vec(), q.vec())), clamp_unit(dot(p.vec(), q.vec())));
}

/// A tangent vector anchored at a point of the sphere. dir must be
/// orthogonal to the base point (within 1e-10).
struct TangentVector {
    SpherePoint base;
    Vec3 dir;

    TangentVector(const SpherePoint& base_, const Vec3& dir_) : base(base_), dir(dir_) {
        if (std::abs(dot(base.vec(), dir)) > 1e-10 * std::max(1.0, norm(dir)))
            throw std::invalid_argument("TangentVector: dir not orthogonal to base");
    }

    bool is_unit(double tol = 1e-10) const { return std::abs(norm(dir) - 1.0) <= tol; }

    /// Project an arbitrary vector onto the tangent plane at base and normalize.
    static TangentVector project(const SpherePoint& base, const Vec3& v) {
        Vec3 t = v - dot(base.vec(), v) * base.vec();
        const double n = norm(t);
        if (n < 1e-14)
            throw std::invalid_argument("TangentVector::project: vector parallel to base");
        return TangentVector(base, t / n);
    }
};

/// Minimizing geodesic arc between two non-antipodal points, with a unit-speed
/// parametrization by arc length from `start`.
class GeodesicSegment {
public:
    GeodesicSegment(const SpherePoint& start, const SpherePoint& end)
        : start_(start), end_(end), length_(geodesic_distance(start, end)) {
        if (length_ >= kPi - 1e-9)
            throw InscriptionError("GeodesicSegment: endpoints antipodal, no unique geodesic");
        // In-plane direction orthogonal to start; zero for a degenerate segment.
        Vec3 w = end_.vec() - dot(start_.vec(), end_.vec()) * start_.vec();
        const double n = norm(w);
        dir_ = n > 1e-15 ? w / n : Vec3{};
    }

    const SpherePoint& start() const { return start_; }
    const SpherePoint& end() const { return end_; }
    double length() const { return length_; }

    /// Point at arc length s from start, s in [0, length].
    SpherePoint point_at(double s) const {
        check_range(s);
        return SpherePoint(std::cos(s) * start_.vec() + std::sin(s) * dir_);
    }

    /// Unit tangent (direction of travel) at arc length s.
    Vec3 tangent_at(double s) const {
        check_range(s);
        return -std::sin(s) * start_.vec() + std::cos(s) * dir_;
    }

    Vec3 start_tangent() const { return dir_; }
    Vec3 end_tangent() const { return tangent_at(length_); }

private:
    void check_range(double s) const {
        if (s < -1e-12 || s > length_ + 1e-12)
            throw std::out_of_range("GeodesicSegment: arc length out of [0, length]");
    }

    SpherePoint start_;
    SpherePoint end_;
    double length_;
    Vec3 dir_;
};

inline SpherePoint geodesic_point(const GeodesicSegment& seg, double s) {
    return seg.point_at(s);
}

/// Rotation of R^3, stored as a row-major 3x3 matrix with det = +1.
class Rotation3 {
public:
    Rotation3() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

    static Rotation3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Rotation3 r;
        r.m_ = {{{r0.x, r0.y, r0.z}, {r1.x, r1.y, r1.z}, {r2.x, r2.y, r2.z}}};
        r.validate();
        return r;
    }

    static Rotation3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        return from_rows({c0.x, c1.x, c2.x}, {c0.y, c1.y, c2.y}, {c0.z, c1.z, c2.z});
    }

    Vec3 operator*(const Vec3& v) const {
        return {m_[0][0] * v.x + m_[0][1] * v.y + m_[0][2] * v.z,
                m_[1][0] * v.x + m_[1][1] * v.y + m_[1][2] * v.z,
                m_[2][0] * v.x + m_[2][1] * v.y + m_[2][2] * v.z};
    }

    SpherePoint operator*(const SpherePoint& p) const { return SpherePoint((*this) * p.vec()); }

    Rotation3 operator*(const Rotation3& o) const {
        Rotation3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                r.m_[i][j] = 0.0;
                for (int k = 0; k < 3; ++k) r.m_[i][j] += m_[i][k] * o.m_[k][j];
            }
        return r;
    }

    Rotation3 transpose() const {
        Rotation3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m_[i][j] = m_[j][i];
        return r;
    }

    double operator()(int i, int j) const { return m_[i][j]; }

    double det() const {
        return m_[0][0] * (m_[1][1] * m_[2][2] - m_[1][2] * m_[2][1]) -
               m_[0][1] * (m_[1][0] * m_[2][2] - m_[1][2] * m_[2][0]) +
               m_[0][2] * (m_[1][0] * m_[2][1] - m_[1][1] * m_[2][0]);
    }

private:
    void validate() const {
        const Rotation3 t = transpose();
        const Rotation3 id = (*this) * t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (std::abs(id.m_[i][j] - (i == j ? 1.0 : 0.0)) > 1e-12)
                    throw std::invalid_argument("Rotation3: matrix not orthogonal");
        if (std::abs(det() - 1.0) > 1e-12)
            throw std::invalid_argument("Rotation3: determinant not +1");
    }

    std::array<std::array<double, 3>, 3> m_;
};

/// Rodrigues rotation about a unit axis, right-hand orientation.
inline Rotation3 rotation_about_axis(const Vec3& axis, double angle) {
    if (std::abs(norm(axis) - 1.0) > 1e-9)
        throw std::invalid_argument("rotation_about_axis: axis must be unit");
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double t = 1.0 - c;
    const Vec3& a = axis;
    return Rotation3::from_rows({t * a.x * a.x + c, t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y},
                                {t * a.x * a.y + s * a.z, t * a.y * a.y + c, t * a.y * a.z - s * a.x},
                                {t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c});
}

/// Unsigned exterior angle in [0, pi] between the incoming travel direction
/// and the outgoing one at a shared vertex.
inline double turning_angle(const TangentVector& incoming, const TangentVector& outgoing) {
    if (max_abs_diff(incoming.base.vec(), outgoing.base.vec()) > 1e-10)
        throw std::invalid_argument("turning_angle: tangent vectors have different base points");
    if (!incoming.is_unit() || !outgoing.is_unit())
        throw std::invalid_argument("turning_angle: tangent vectors must be unit");
    return std::atan2(norm(cross(incoming.dir, outgoing.dir)),
                      clamp_unit(dot(incoming.dir, outgoing.dir)));
}

/// Raw-vector variant used by the polygonal machinery (both directions
/// assumed unit and anchored at the same vertex).
inline double turning_angle(const Vec3& incoming, const Vec3& outgoing) {
    return std::atan2(norm(cross(incoming, outgoing)), clamp_unit(dot(incoming, outgoing)));
}

/// Darboux frame of the sphere at p for travel direction t: n is the outward
/// normal (the point itself) and u = n x t the conormal.
struct Frame {
    Vec3 t;
    Vec3 u;
    Vec3 n;
};

inline Frame frame_at(const SpherePoint& p, const TangentVector& t) {
    if (max_abs_diff(p.vec(), t.base.vec()) > 1e-10)
        throw std::invalid_argument("frame_at: tangent not based at p");
    if (!t.is_unit()) throw std::invalid_argument("frame_at: tangent must be unit");
    const Vec3 n = p.vec();
    return Frame{t.dir, cross(n, t.dir), n};
}

} // namespace pcurv
