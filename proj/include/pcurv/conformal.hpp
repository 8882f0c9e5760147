#pragma once

#include <cmath>
#include <functional>

#include "pcurv/curve.hpp"
#include "pcurv/errors.hpp"
#include "pcurv/quadrature.hpp"
#include "pcurv/sphere.hpp"

namespace pcurv {

// The chart f between the plane and the punctured sphere S^2 \ {south pole}:
//
//   f(x, y) = (4x, 4y, 4 - x^2 - y^2) / (4 + x^2 + y^2),
//
// conformal with factor e^lambda = 4 / (4 + x^2 + y^2); f(0,0) is the north
// pole and the plane's infinity corresponds to the south pole.

inline SpherePoint plane_to_sphere(double x, double y) {
    const double q = 4.0 + x * x + y * y;
    return SpherePoint(Vec3{4.0 * x / q, 4.0 * y / q, 8.0 / q - 1.0});
}

inline SpherePoint plane_to_sphere(const Vec2& p) { return plane_to_sphere(p.x, p.y); }

inline Vec2 sphere_to_plane(const SpherePoint& p) {
    if (p.z() + 1.0 < 1e-9)
        throw ChartDomainError("sphere_to_plane: south pole is outside the chart");
    return {2.0 * p.x() / (1.0 + p.z()), 2.0 * p.y() / (1.0 + p.z())};
}

inline double log_conformal_factor(double x, double y) {
    return std::log(4.0 / (4.0 + x * x + y * y));
}

inline double conformal_factor(double x, double y) { return 4.0 / (4.0 + x * x + y * y); }

inline Vec2 grad_log_factor(double x, double y) {
    const double q = 4.0 + x * x + y * y;
    return {-2.0 * x / q, -2.0 * y / q};
}

/// Differential of the chart applied to a planar vector (for conformality
/// checks: ||df v|| = e^lambda ||v|| and angles are preserved).
inline Vec3 chart_differential(double x, double y, const Vec2& v) {
    const double q = 4.0 + x * x + y * y;
    const double q2 = q * q;
    return {(4.0 * q - 8.0 * x * x) / q2 * v.x + (-8.0 * x * y / q2) * v.y,
            (-8.0 * x * y / q2) * v.x + (4.0 * q - 8.0 * y * y) / q2 * v.y,
            (-16.0 * x / q2) * v.x + (-16.0 * y / q2) * v.y};
}

/// Geodesic curvature of the spherical image of a planar curve, from the
/// planar curvature and the conformal factor:
///
///   k_sphere = e^{-lambda} (k_plane - d_u lambda),
///
/// u the positively oriented unit conormal of the planar curve. Signs
/// follow the plane's orientation; the magnitude matches ||c''+c|| of the
/// unit-speed pushforward.
inline double conformal_curvature(double k_plane, const Vec2& point, const Vec2& conormal) {
    if (std::abs(norm(conormal) - 1.0) > 1e-9)
        throw std::invalid_argument("conformal_curvature: conormal must be unit");
    const double lam = log_conformal_factor(point.x, point.y);
    const double du = dot(grad_log_factor(point.x, point.y), conormal);
    return std::exp(-lam) * (k_plane - du);
}

/// Plane curve over [t_begin, t_end], analytic or numeric derivatives.
class PlanarCurve {
public:
    using PosFn = std::function<Vec2(double)>;

    static PlanarCurve analytic(double t0, double t1, PosFn pos, PosFn d1, PosFn d2) {
        PlanarCurve c;
        c.t0_ = t0;
        c.t1_ = t1;
        c.pos_ = std::move(pos);
        c.d1_ = std::move(d1);
        c.d2_ = std::move(d2);
        return c;
    }

    static PlanarCurve numeric(double t0, double t1, PosFn pos, double fd_step = kDefaultFdStep) {
        PlanarCurve c;
        c.t0_ = t0;
        c.t1_ = t1;
        c.pos_ = std::move(pos);
        c.fd_ = fd_step;
        return c;
    }

    double t_begin() const { return t0_; }
    double t_end() const { return t1_; }
    bool analytic_derivatives() const { return static_cast<bool>(d1_); }

    Vec2 position(double t) const { return pos_(t); }

    Vec2 velocity(double t) const {
        if (d1_) return d1_(t);
        const double h = fd_;
        const double tc = std::clamp(t, t0_ + 2 * h, t1_ - 2 * h);
        auto d = [&](double hh) { return (pos_(tc + hh) - pos_(tc - hh)) / (2.0 * hh); };
        return (4.0 * d(h / 2.0) - d(h)) / 3.0;
    }

    Vec2 acceleration(double t) const {
        if (d2_) return d2_(t);
        const double h = fd_;
        const double tc = std::clamp(t, t0_ + 2 * h, t1_ - 2 * h);
        auto d = [&](double hh) {
            return (pos_(tc + hh) - 2.0 * pos_(tc) + pos_(tc - hh)) / (hh * hh);
        };
        return (4.0 * d(h / 2.0) - d(h)) / 3.0;
    }

    double speed(double t) const { return norm(velocity(t)); }

    /// Signed curvature (x'y'' - y'x'') / |v|^3, positive when turning
    /// towards the positively oriented conormal.
    double signed_curvature(double t) const {
        const Vec2 v = velocity(t);
        const Vec2 a = acceleration(t);
        const double sp = norm(v);
        return (v.x * a.y - v.y * a.x) / (sp * sp * sp);
    }

    /// Positively oriented unit conormal (tangent rotated by +90 degrees).
    Vec2 conormal(double t) const { return perp(normalized(velocity(t))); }

    double length() const {
        return integrate_adaptive([this](double t) { return speed(t); }, t0_, t1_, 64).value;
    }

private:
    double t0_ = 0.0;
    double t1_ = 0.0;
    PosFn pos_;
    PosFn d1_;
    PosFn d2_;
    double fd_ = kDefaultFdStep;
};

inline PlanarCurve make_line(const Vec2& p0, const Vec2& dir, double t0, double t1) {
    const Vec2 d = normalized(dir);
    return PlanarCurve::analytic(
        t0, t1, [=](double t) { return p0 + t * d; }, [=](double) { return d; },
        [](double) { return Vec2{0.0, 0.0}; });
}

inline PlanarCurve make_planar_circle(const Vec2& center, double r, double t0, double t1) {
    if (!(r > 0.0)) throw std::invalid_argument("make_planar_circle: radius must be positive");
    return PlanarCurve::analytic(
        t0, t1, [=](double t) { return center + Vec2{r * std::cos(t), r * std::sin(t)}; },
        [=](double t) { return Vec2{-r * std::sin(t), r * std::cos(t)}; },
        [=](double t) { return Vec2{-r * std::cos(t), -r * std::sin(t)}; });
}

/// Archimedean spiral a*t*(cos t, sin t); keep t0 > 0 so the curvature stays
/// finite and one-signed.
inline PlanarCurve make_spiral(double a, double t0, double t1) {
    return PlanarCurve::analytic(
        t0, t1, [=](double t) { return Vec2{a * t * std::cos(t), a * t * std::sin(t)}; },
        [=](double t) {
            return Vec2{a * (std::cos(t) - t * std::sin(t)), a * (std::sin(t) + t * std::cos(t))};
        },
        [=](double t) {
            return Vec2{a * (-2.0 * std::sin(t) - t * std::cos(t)),
                        a * (2.0 * std::cos(t) - t * std::sin(t))};
        });
}

/// Image curve f(g(t)) on the sphere. Not unit-speed in general; compose
/// with arclength_reparam before curvature queries.
inline ParamCurve pushforward_curve(const PlanarCurve& g) {
    auto pos = [g](double t) { return plane_to_sphere(g.position(t)).vec(); };
    if (!g.analytic_derivatives())
        return ParamCurve::numeric(g.t_begin(), g.t_end(), pos);

    // Chain rule through f = u/q with u = (4x, 4y, 4 - r^2), q = 4 + r^2.
    auto d1 = [g](double t) {
        const Vec2 p = g.position(t);
        const Vec2 v = g.velocity(t);
        const double q = 4.0 + p.x * p.x + p.y * p.y;
        const Vec3 u{4.0 * p.x, 4.0 * p.y, 4.0 - p.x * p.x - p.y * p.y};
        const Vec3 ud{4.0 * v.x, 4.0 * v.y, -2.0 * (p.x * v.x + p.y * v.y)};
        const double qd = 2.0 * (p.x * v.x + p.y * v.y);
        return ud / q - u * (qd / (q * q));
    };
    auto d2 = [g](double t) {
        const Vec2 p = g.position(t);
        const Vec2 v = g.velocity(t);
        const Vec2 a = g.acceleration(t);
        const double q = 4.0 + p.x * p.x + p.y * p.y;
        const double qd = 2.0 * (p.x * v.x + p.y * v.y);
        const double qdd = 2.0 * (v.x * v.x + v.y * v.y + p.x * a.x + p.y * a.y);
        const Vec3 u{4.0 * p.x, 4.0 * p.y, 4.0 - p.x * p.x - p.y * p.y};
        const Vec3 ud{4.0 * v.x, 4.0 * v.y, -2.0 * (p.x * v.x + p.y * v.y)};
        const Vec3 udd{4.0 * a.x, 4.0 * a.y,
                       -2.0 * (v.x * v.x + v.y * v.y + p.x * a.x + p.y * a.y)};
        return udd / q - (2.0 * qd / (q * q)) * ud + u * (2.0 * qd * qd / (q * q * q)) -
               u * (qdd / (q * q));
    };
    return ParamCurve::analytic(g.t_begin(), g.t_end(), pos, d1, d2, /*unit_speed=*/false);
}

/// Preimage f^{-1}(c(t)) of a spherical curve, numeric derivatives.
inline PlanarCurve pullback_curve(const ParamCurve& c) {
    auto pos = [c](double t) { return sphere_to_plane(c.position(t)); };
    return PlanarCurve::numeric(c.t_begin(), c.t_end(), pos);
}

/// Arc length element of the planar preimage of a unit-speed spherical
/// curve: s(t) = integral of e^{-lambda} along g up to t.
inline double arc_element_integral(const PlanarCurve& g, double t) {
    if (t < g.t_begin() - 1e-12 || t > g.t_end() + 1e-12)
        throw std::out_of_range("arc_element_integral: t outside the curve domain");
    auto f = [&g](double tau) {
        const Vec2 p = g.position(tau);
        return 1.0 / conformal_factor(p.x, p.y);
    };
    return integrate_adaptive(f, g.t_begin(), t, 64).value;
}

/// Numeric estimate of the smallest C(p) with |a-b|^p >= a^p - C b a^{p-1}
/// for all a, b > 0: C(p) = sup_{t>0} (t^p - |t-1|^p) / t^{p-1}. The
/// supremum is scanned on a log grid, refined by golden section, and never
/// returned below p because the ratio tends to p as t grows.
inline double pstima_constant(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("pstima_constant: p must be > 1");
    auto h = [p](double t) {
        return (std::pow(t, p) - std::pow(std::abs(t - 1.0), p)) / std::pow(t, p - 1.0);
    };
    double best = p;
    double best_t = 1.0;
    const int n_grid = 4000;
    for (int i = 0; i <= n_grid; ++i) {
        const double t = std::pow(10.0, -6.0 + 12.0 * i / n_grid); // 1e-6 .. 1e6
        const double v = h(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement around the best grid point.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_t / 10.0;
    double hi = best_t * 10.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = h(x1);
    double f2 = h(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * best_t; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = h(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = h(x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

} // namespace pcurv
