#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pcurv/errors.hpp"
#include "pcurv/quadrature.hpp"
#include "pcurv/sphere.hpp"

namespace pcurv {

/// Default central-difference step for numeric derivatives (one Richardson
/// level is applied on top).
inline constexpr double kDefaultFdStep = 1e-5;

/// Curve on the unit sphere over a parameter interval [t_begin, t_end].
///
/// Analytic curves supply first/second derivative maps; numeric curves fall
/// back to central differences with one Richardson extrapolation level.
/// Instances are immutable after construction and safe to share across
/// threads.
class ParamCurve {
public:
    using PosFn = std::function<Vec3(double)>;

    static ParamCurve analytic(double t_begin, double t_end, PosFn pos, PosFn d1, PosFn d2,
                               bool unit_speed, std::vector<double> corner_times = {}) {
        ParamCurve c;
        c.t_begin_ = t_begin;
        c.t_end_ = t_end;
        c.pos_ = std::move(pos);
        c.d1_ = std::move(d1);
        c.d2_ = std::move(d2);
        c.unit_speed_ = unit_speed;
        c.corner_times_ = std::move(corner_times);
        return c;
    }

    static ParamCurve numeric(double t_begin, double t_end, PosFn pos, bool unit_speed = false,
                              std::vector<double> corner_times = {},
                              double fd_step = kDefaultFdStep) {
        ParamCurve c;
        c.t_begin_ = t_begin;
        c.t_end_ = t_end;
        c.pos_ = std::move(pos);
        c.unit_speed_ = unit_speed;
        c.corner_times_ = std::move(corner_times);
        c.fd_step_ = fd_step;
        return c;
    }

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    bool analytic_derivatives() const { return static_cast<bool>(d1_); }
    bool unit_speed() const { return unit_speed_; }
    const std::vector<double>& corner_times() const { return corner_times_; }
    double fd_step() const { return fd_step_; }

    Vec3 position_vec(double t) const { return pos_(t); }
    SpherePoint position(double t) const { return SpherePoint(pos_(t)); }

    Vec3 velocity(double t) const {
        if (d1_) return d1_(t);
        return fd_velocity(t);
    }

    Vec3 acceleration(double t) const {
        if (d2_) return d2_(t);
        return fd_acceleration(t);
    }

    double speed(double t) const { return norm(velocity(t)); }

    /// Total length by quadrature of the speed (trivial for unit-speed curves).
    double length() const {
        if (unit_speed_) return t_end_ - t_begin_;
        return integrate_adaptive([this](double t) { return speed(t); }, t_begin_, t_end_, 64)
            .value;
    }

    bool has_interior_corner() const {
        for (double tc : corner_times_)
            if (tc > t_begin_ + 1e-12 && tc < t_end_ - 1e-12) return true;
        return false;
    }

private:
    // Central differences with one Richardson level. Stencils are shifted
    // inward near the domain ends so position is never sampled outside.
    double stencil_center(double t, double h) const {
        return std::clamp(t, t_begin_ + 2.0 * h, t_end_ - 2.0 * h);
    }

    Vec3 fd_velocity(double t) const {
        const double h = fd_step_;
        const double tc = stencil_center(t, h);
        auto d1 = [&](double hh) { return (pos_(tc + hh) - pos_(tc - hh)) / (2.0 * hh); };
        return (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
    }

    Vec3 fd_acceleration(double t) const {
        const double h = fd_step_;
        const double tc = stencil_center(t, h);
        auto d2 = [&](double hh) {
            return (pos_(tc + hh) - 2.0 * pos_(tc) + pos_(tc - hh)) / (hh * hh);
        };
        return (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
    }

    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    PosFn pos_;
    PosFn d1_;
    PosFn d2_;
    bool unit_speed_ = false;
    std::vector<double> corner_times_;
    double fd_step_ = kDefaultFdStep;
};

/// Circle of colatitude phi, arc-length parametrized; `turns` may be
/// fractional or exceed 1 (the curve then winds around the axis). Constant
/// geodesic curvature |cot(phi)|, total length 2*pi*sin(phi)*turns.
inline ParamCurve make_parallel(double phi, double turns = 1.0) {
    if (!(phi > 1e-12 && phi < kPi - 1e-12))
        throw std::invalid_argument("make_parallel: degenerate colatitude");
    if (!(turns > 0.0)) throw std::invalid_argument("make_parallel: turns must be positive");
    const double r = std::sin(phi);
    const double zc = std::cos(phi);
    const double len = 2.0 * kPi * r * turns;
    auto pos = [r, zc](double s) {
        return Vec3{r * std::cos(s / r), r * std::sin(s / r), zc};
    };
    auto d1 = [r](double s) { return Vec3{-std::sin(s / r), std::cos(s / r), 0.0}; };
    auto d2 = [r](double s) {
        return Vec3{-std::cos(s / r) / r, -std::sin(s / r) / r, 0.0};
    };
    return ParamCurve::analytic(0.0, len, pos, d1, d2, /*unit_speed=*/true);
}

inline ParamCurve make_great_circle(double turns = 1.0) { return make_parallel(kPi / 2.0, turns); }

/// Two geodesic arms meeting at a vertex with a prescribed exterior angle.
struct CornerCurve {
    GeodesicSegment incoming;
    GeodesicSegment outgoing;
    double corner_angle = 0.0;
};

/// Two unit-speed geodesic arms meeting at the north pole with exterior
/// (turning) angle theta. The single corner sits at t = arm_length.
inline ParamCurve make_corner_curve(double theta, double arm_length) {
    if (!(theta > 0.0 && theta < kPi))
        throw std::invalid_argument("make_corner_curve: theta must be in (0, pi)");
    if (!(arm_length > 0.0 && arm_length < kPi / 2.0))
        throw std::invalid_argument("make_corner_curve: arms must be shorter than pi/2");
    const Vec3 pole{0.0, 0.0, 1.0};
    const Vec3 v_in{1.0, 0.0, 0.0};
    const Vec3 v_out{std::cos(theta), std::sin(theta), 0.0};
    const double a = arm_length;
    auto dir = [=](double t) { return t <= a ? v_in : v_out; };
    auto pos = [=](double t) { return std::cos(t - a) * pole + std::sin(t - a) * dir(t); };
    auto d1 = [=](double t) { return -std::sin(t - a) * pole + std::cos(t - a) * dir(t); };
    auto d2 = [=](double t) { return -1.0 * (std::cos(t - a) * pole + std::sin(t - a) * dir(t)); };
    return ParamCurve::analytic(0.0, 2.0 * a, pos, d1, d2, /*unit_speed=*/true, {a});
}

/// Segment view of the corner configuration (both arms as geodesics).
inline CornerCurve make_corner(double theta, double arm_length) {
    const ParamCurve c = make_corner_curve(theta, arm_length);
    const SpherePoint a = c.position(0.0);
    const SpherePoint v = c.position(arm_length);
    const SpherePoint b = c.position(2.0 * arm_length);
    return CornerCurve{GeodesicSegment(a, v), GeodesicSegment(v, b), theta};
}

/// Piecewise-geodesic path through the given vertices, unit-speed, with
/// corner times at the cumulative edge lengths. A polygonal is itself a
/// curve; this is how synthetic polygonals enter the inscription machinery.
inline ParamCurve make_polygonal_path(const std::vector<SpherePoint>& vertices) {
    if (vertices.size() < 2)
        throw std::invalid_argument("make_polygonal_path: need at least 2 vertices");
    auto segs = std::make_shared<std::vector<GeodesicSegment>>();
    auto offsets = std::make_shared<std::vector<double>>();
    offsets->push_back(0.0);
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        segs->emplace_back(vertices[i], vertices[i + 1]);
        offsets->push_back(offsets->back() + segs->back().length());
    }
    const double total = offsets->back();
    auto locate = [segs, offsets](double t) -> std::pair<std::size_t, double> {
        auto it = std::upper_bound(offsets->begin(), offsets->end(), t);
        std::size_t i = it == offsets->begin() ? 0 : static_cast<std::size_t>(it - offsets->begin() - 1);
        i = std::min(i, segs->size() - 1);
        return {i, std::clamp(t - (*offsets)[i], 0.0, (*segs)[i].length())};
    };
    auto pos = [locate, segs](double t) {
        auto [i, s] = locate(t);
        return (*segs)[i].point_at(s).vec();
    };
    auto d1 = [locate, segs](double t) {
        auto [i, s] = locate(t);
        return (*segs)[i].tangent_at(s);
    };
    auto d2 = [locate, segs](double t) {
        auto [i, s] = locate(t);
        return -1.0 * (*segs)[i].point_at(s).vec();
    };
    std::vector<double> corners(offsets->begin() + 1, offsets->end() - 1);
    return ParamCurve::analytic(0.0, total, pos, d1, d2, /*unit_speed=*/true, std::move(corners));
}

/// Apply a rotation to a whole curve.
inline ParamCurve rotate_curve(const ParamCurve& c, const Rotation3& r) {
    auto pos = [c, r](double t) { return r * c.position_vec(t); };
    if (c.analytic_derivatives()) {
        auto d1 = [c, r](double t) { return r * c.velocity(t); };
        auto d2 = [c, r](double t) { return r * c.acceleration(t); };
        return ParamCurve::analytic(c.t_begin(), c.t_end(), pos, d1, d2, c.unit_speed(),
                                    c.corner_times());
    }
    return ParamCurve::numeric(c.t_begin(), c.t_end(), pos, c.unit_speed(), c.corner_times(),
                               c.fd_step());
}

namespace detail {

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slope limiting) for a
/// strictly increasing data table. Used for the arc-length table s(t).
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        slopes_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        slopes_[0] = d[0];
        slopes_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) slopes_[i] = 0.5 * (d[i - 1] + d[i]);
        // Fritsch-Carlson limiter keeps the interpolant monotone.
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                slopes_[i] = slopes_[i + 1] = 0.0;
                continue;
            }
            const double a = slopes_[i] / d[i];
            const double b = slopes_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                slopes_[i] = tau * a * d[i];
                slopes_[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        const std::size_t i = interval(x);
        const double h = x_[i + 1] - x_[i];
        const double u = (x - x_[i]) / h;
        const double u2 = u * u;
        const double u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1;
        const double h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2;
        const double h11 = u3 - u2;
        return h00 * y_[i] + h10 * h * slopes_[i] + h01 * y_[i + 1] + h11 * h * slopes_[i + 1];
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    double y_front() const { return y_.front(); }
    double y_back() const { return y_.back(); }

    /// Invert the (monotone) interpolant by bisection.
    double inverse(double y, double xtol = 1e-12) const {
        const double yc = std::clamp(y, y_.front(), y_.back());
        auto g = [&](double x) { return (*this)(x)-yc; };
        return bisect(g, x_.front(), x_.back(), xtol);
    }

private:
    std::size_t interval(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin() - 1);
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slopes_;
};

} // namespace detail

inline constexpr int kArcTableSize = 4096;

/// Unit-speed reparametrization of c. The arc-length table s(t) is sampled
/// at kArcTableSize+1 points (per-interval GL8), interpolated with a
/// monotone cubic, and inverted by bisection to 1e-12.
inline ParamCurve arclength_reparam(const ParamCurve& c, double tol = 1e-8,
                                    int table_size = kArcTableSize) {
    std::vector<double> ts(static_cast<std::size_t>(table_size) + 1);
    std::vector<double> ss(ts.size());
    const double t0 = c.t_begin();
    const double t1 = c.t_end();
    for (std::size_t j = 0; j < ts.size(); ++j)
        ts[j] = t0 + (t1 - t0) * static_cast<double>(j) / table_size;
    ss[0] = 0.0;
    for (std::size_t j = 1; j < ts.size(); ++j) {
        const double v0 = c.speed(ts[j - 1]);
        const double v1 = c.speed(ts[j]);
        if (v0 < 1e-8 || v1 < 1e-8)
            throw DegenerateParametrizationError("arclength_reparam: vanishing speed");
        ss[j] = ss[j - 1] + gauss8([&c](double t) { return c.speed(t); }, ts[j - 1], ts[j]);
    }
    auto table = std::make_shared<detail::MonotoneCubic>(std::move(ts), std::move(ss));
    const double total = table->y_back();
    auto t_of_s = [table](double s) { return table->inverse(s); };
    auto pos = [c, t_of_s](double s) { return c.position_vec(t_of_s(s)); };
    std::vector<double> corners;
    for (double tc : c.corner_times()) corners.push_back((*table)(tc));

    // Derivatives by the chain rule through the base curve (which falls
    // back to finite differences in the smooth base parameter when it has
    // no analytic ones). Differencing the composed position instead would
    // amplify the 1e-12 quantization of the table inversion.
    auto d1 = [c, t_of_s](double s) {
        const double t = t_of_s(s);
        return c.velocity(t) / c.speed(t);
    };
    auto d2 = [c, t_of_s](double s) {
        const double t = t_of_s(s);
        const Vec3 v = c.velocity(t);
        const Vec3 a = c.acceleration(t);
        const double sp2 = dot(v, v);
        return a / sp2 - v * (dot(v, a) / (sp2 * sp2));
    };
    (void)tol;
    return ParamCurve::analytic(0.0, total, pos, d1, d2, /*unit_speed=*/true,
                                std::move(corners));
}

/// |k_S2(s)| = ||c''(s) + c(s)|| for a unit-speed curve.
inline double geodesic_curvature_at(const ParamCurve& c, double s) {
    if (!c.unit_speed())
        throw std::invalid_argument("geodesic_curvature_at: curve must be unit-speed "
                                    "(apply arclength_reparam first)");
    if (s < c.t_begin() - 1e-12 || s > c.t_end() + 1e-12)
        throw std::out_of_range("geodesic_curvature_at: s outside the domain");
    for (double tc : c.corner_times())
        if (std::abs(s - tc) < 1e-9)
            throw NonSmoothError("geodesic_curvature_at: corner point");
    return norm(c.acceleration(s) + c.position_vec(s));
}

/// One (arc length, |k|) sample of a unit-speed curve.
struct CurvatureSample {
    double s = 0.0;
    double k = 0.0;
};

/// Evenly spaced curvature samples over the open interior of the domain;
/// samples landing on a corner are nudged off it.
inline std::vector<CurvatureSample> sample_curvature(const ParamCurve& c, int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("sample_curvature: need at least 1 sample");
    std::vector<CurvatureSample> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    const double span = c.t_end() - c.t_begin();
    for (int i = 0; i < n_samples; ++i) {
        double s = c.t_begin() + span * (i + 0.5) / n_samples;
        for (double tc : c.corner_times())
            if (std::abs(s - tc) < 1e-9) s += 1e-6 * span;
        out.push_back({s, geodesic_curvature_at(c, s)});
    }
    return out;
}

/// Integral of |k|^p over the whole curve by adaptive composite GL8.
inline double integral_kp(const ParamCurve& c, double p, std::int64_t n_quad = 256) {
    if (p < 1.0) throw std::invalid_argument("integral_kp: p must be >= 1");
    if (!c.unit_speed()) throw std::invalid_argument("integral_kp: curve must be unit-speed");
    if (c.has_interior_corner())
        throw NonSmoothError("integral_kp: curve has a corner inside the domain");
    auto f = [&c, p](double s) {
        return std::pow(norm(c.acceleration(s) + c.position_vec(s)), p);
    };
    return integrate_adaptive(f, c.t_begin(), c.t_end(), n_quad).value;
}

/// Load a sampled spherical curve from CSV with header `t,x,y,z`.
/// Samples are renormalized onto the sphere and interpolated with a
/// Catmull-Rom spline (re-projected to the sphere); derivatives numeric.
inline ParamCurve load_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("curve CSV: empty input");
    auto strip = [](std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(), [](char ch) { return ch == ' ' || ch == '\r'; }),
                s.end());
        return s;
    };
    if (strip(line) != "t,x,y,z")
        throw std::invalid_argument("curve CSV: expected header 't,x,y,z'");
    auto ts = std::make_shared<std::vector<double>>();
    auto ps = std::make_shared<std::vector<Vec3>>();
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (strip(line).empty()) continue;
        std::istringstream ls(line);
        double t, x, y, z;
        char c1, c2, c3;
        if (!(ls >> t >> c1 >> x >> c2 >> y >> c3 >> z) || c1 != ',' || c2 != ',' || c3 != ',')
            throw std::invalid_argument("curve CSV: malformed row " + std::to_string(row));
        const Vec3 v{x, y, z};
        const double n = norm(v);
        if (std::abs(n - 1.0) > kSphereNormTol)
            throw std::invalid_argument("curve CSV: row " + std::to_string(row) +
                                        " not on the unit sphere (norm " + std::to_string(n) + ")");
        if (!ts->empty() && t <= ts->back())
            throw std::invalid_argument("curve CSV: t must be strictly increasing (row " +
                                        std::to_string(row) + ")");
        ts->push_back(t);
        ps->push_back(v / n);
    }
    if (ts->size() < 4) throw std::invalid_argument("curve CSV: need at least 4 samples");

    auto pos = [ts, ps](double t) {
        const auto& tv = *ts;
        const auto& pv = *ps;
        auto it = std::upper_bound(tv.begin(), tv.end(), t);
        std::size_t i = it == tv.begin() ? 0 : static_cast<std::size_t>(it - tv.begin() - 1);
        i = std::min(i, tv.size() - 2);
        const std::size_t i0 = i == 0 ? 0 : i - 1;
        const std::size_t i3 = std::min(i + 2, tv.size() - 1);
        const double u = (t - tv[i]) / (tv[i + 1] - tv[i]);
        // Catmull-Rom in R^3, then re-projected to the sphere.
        const Vec3 &p0 = pv[i0], &p1 = pv[i], &p2 = pv[i + 1], &p3 = pv[i3];
        const Vec3 m1 = 0.5 * (p2 - p0);
        const Vec3 m2 = 0.5 * (p3 - p1);
        const double u2 = u * u;
        const double u3 = u2 * u;
        Vec3 v = (2 * u3 - 3 * u2 + 1) * p1 + (u3 - 2 * u2 + u) * m1 + (-2 * u3 + 3 * u2) * p2 +
                 (u3 - u2) * m2;
        return normalized(v);
    };
    return ParamCurve::numeric(ts->front(), ts->back(), pos);
}

} // namespace pcurv
