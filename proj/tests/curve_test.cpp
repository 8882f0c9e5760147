#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "pcurv/conformal.hpp"
#include "pcurv/curve.hpp"

using namespace pcurv;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::mt19937_64 rng(771);
}

TEST_CASE("make_parallel basics") {
    CHECK_THROWS_AS(make_parallel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_parallel(kPi), std::invalid_argument);

    const ParamCurve eq = make_parallel(kPi / 2);
    CHECK_THAT(geodesic_curvature_at(eq, 1.0), WithinAbs(0.0, 1e-8));

    const ParamCurve p3 = make_parallel(kPi / 3);
    CHECK_THAT(p3.length(), WithinAbs(2.0 * kPi * std::sqrt(3.0) / 2.0, 1e-12));

    const ParamCurve p4 = make_parallel(kPi / 4);
    CHECK_THAT(geodesic_curvature_at(p4, 0.7), WithinAbs(1.0, 1e-8));
}

TEST_CASE("parallel curvature equals cot(phi) at random samples") {
    std::uniform_real_distribution<double> uphi(0.2, kPi - 0.2);
    for (int rep = 0; rep < 5; ++rep) {
        const double phi = uphi(rng);
        const double want = std::abs(std::cos(phi) / std::sin(phi));
        const ParamCurve c = make_parallel(phi);
        // Position-only twin exercises the finite-difference path.
        auto pos = [c](double s) { return c.position_vec(s); };
        const ParamCurve numeric = ParamCurve::numeric(c.t_begin(), c.t_end(), pos, true);
        std::uniform_real_distribution<double> us(0.0, c.t_end());
        for (int i = 0; i < 100; ++i) {
            const double s = us(rng);
            REQUIRE_THAT(geodesic_curvature_at(c, s), WithinAbs(want, 1e-8));
            REQUIRE_THAT(geodesic_curvature_at(numeric, s), WithinAbs(want, 1e-5));
        }
    }
}

TEST_CASE("sample_curvature on a parallel matches cot(phi) everywhere") {
    const double phi = 1.3;
    const auto samples = sample_curvature(make_parallel(phi), 100);
    REQUIRE(samples.size() == 100);
    const double want = std::abs(std::cos(phi) / std::sin(phi));
    for (const auto& cs : samples) REQUIRE_THAT(cs.k, WithinAbs(want, 1e-8));
}

TEST_CASE("corner segments meet at the prescribed angle") {
    const double theta = 0.85;
    const CornerCurve cc = make_corner(theta, 0.3);
    CHECK_THAT(max_abs_diff(cc.incoming.end().vec(), cc.outgoing.start().vec()),
               WithinAbs(0.0, 1e-12));
    CHECK_THAT(turning_angle(cc.incoming.end_tangent(), cc.outgoing.start_tangent()),
               WithinAbs(theta, 1e-10));
    CHECK(cc.corner_angle == theta);
}

TEST_CASE("corner curve") {
    CHECK_THROWS_AS(make_corner_curve(1.0, 2.0), std::invalid_argument);
    const double theta = 1.2;
    const double arm = 0.4;
    const ParamCurve c = make_corner_curve(theta, arm);

    // Geodesic arms: zero curvature away from the vertex.
    CHECK_THAT(geodesic_curvature_at(c, 0.13), WithinAbs(0.0, 1e-10));
    CHECK_THAT(geodesic_curvature_at(c, 0.71), WithinAbs(0.0, 1e-10));

    // Turning angle at the vertex equals theta.
    const Vec3 t_in = c.velocity(arm - 1e-9);
    const Vec3 t_out = c.velocity(arm + 1e-9);
    CHECK_THAT(turning_angle(t_in, t_out), WithinAbs(theta, 1e-8));

    CHECK_THROWS_AS(geodesic_curvature_at(c, arm), NonSmoothError);
    CHECK_THROWS_AS(integral_kp(c, 2.0), NonSmoothError);

    // theta = pi/2 with meridian arms 90 degrees apart.
    const ParamCurve perp = make_corner_curve(kPi / 2, 0.3);
    const Vec3 a = perp.position_vec(0.0);
    const Vec3 b = perp.position_vec(0.6);
    CHECK_THAT(a.y, WithinAbs(0.0, 1e-15));
    CHECK_THAT(b.x, WithinAbs(0.0, 1e-12)); // second arm lies in the x=0 meridian plane
}

TEST_CASE("arclength_reparam") {
    SECTION("already unit-speed parallel is identity up to tol") {
        const ParamCurve c = make_parallel(kPi / 3);
        const ParamCurve r = arclength_reparam(c);
        CHECK_THAT(r.t_end(), WithinAbs(c.t_end(), 1e-8));
        for (double s : {0.1, 1.0, 3.0})
            CHECK_THAT(max_abs_diff(r.position_vec(s), c.position_vec(s)), WithinAbs(0.0, 1e-8));
    }

    SECTION("longitude-parametrized parallel reaches unit speed") {
        const double phi = kPi / 3;
        const double sp = std::sin(phi);
        auto pos = [=](double w) {
            return Vec3{sp * std::cos(w), sp * std::sin(w), std::cos(phi)};
        };
        auto d1 = [=](double w) { return Vec3{-sp * std::sin(w), sp * std::cos(w), 0.0}; };
        auto d2 = [=](double w) { return Vec3{-sp * std::cos(w), -sp * std::sin(w), 0.0}; };
        const ParamCurve bylon =
            ParamCurve::analytic(0.0, 2.0 * kPi, pos, d1, d2, /*unit_speed=*/false);
        const ParamCurve r = arclength_reparam(bylon, 1e-8);
        REQUIRE(r.unit_speed());
        CHECK_THAT(r.t_end(), WithinAbs(2.0 * kPi * sp, 1e-8));
        // s(w) = w sin(phi): position at arc length s must be the point at
        // longitude s / sin(phi).
        for (double s : {0.3, 1.7, 4.1}) {
            CHECK_THAT(norm(r.velocity(s)), WithinAbs(1.0, 1e-8));
            CHECK_THAT(max_abs_diff(r.position_vec(s), pos(s / sp)), WithinAbs(0.0, 1e-9));
        }
    }

    SECTION("doubled-speed great circle keeps its length") {
        auto pos = [](double t) { return Vec3{std::cos(2 * t), std::sin(2 * t), 0.0}; };
        const ParamCurve fast = ParamCurve::numeric(0.0, kPi, pos);
        const ParamCurve r = arclength_reparam(fast);
        CHECK_THAT(r.t_end(), WithinAbs(2.0 * kPi, 1e-7));
    }

    SECTION("vanishing speed is rejected") {
        auto pos = [](double t) {
            const double u = t * t * t; // stalls at t = 0
            return Vec3{std::cos(u), std::sin(u), 0.0};
        };
        const ParamCurve stalled = ParamCurve::numeric(-0.5, 0.5, pos);
        CHECK_THROWS_AS(arclength_reparam(stalled), DegenerateParametrizationError);
    }
}

TEST_CASE("integral_kp reference values") {
    const ParamCurve gc = make_great_circle();
    CHECK_THAT(integral_kp(gc, 1.0), WithinAbs(0.0, 1e-10));
    CHECK_THAT(integral_kp(gc, 2.5), WithinAbs(0.0, 1e-10));

    // Constant-curvature closed forms: L * cot(phi)^p.
    CHECK_THAT(integral_kp(make_parallel(kPi / 3), 2.0), WithinRel(kPi / std::sqrt(3.0), 1e-10));
    CHECK_THAT(integral_kp(make_parallel(kPi / 4), 1.0),
               WithinRel(2.0 * kPi * std::cos(kPi / 4), 1e-10));

    CHECK_THROWS_AS(integral_kp(make_parallel(1.0), 0.5), std::invalid_argument);
}

TEST_CASE("integral_kp parametrization and rotation invariance") {
    const double phi = 1.1;
    const ParamCurve c = make_parallel(phi);
    const double ref = integral_kp(c, 2.0);

    // Smooth non-uniform reparametrization of the same trace.
    const double L = c.t_end();
    auto warp = [L](double u) { return L * (u + 0.1 * std::sin(2.0 * kPi * u)); };
    auto dwarp = [L](double u) { return L * (1.0 + 0.2 * kPi * std::cos(2.0 * kPi * u)); };
    auto ddwarp = [L](double u) { return -0.4 * L * kPi * kPi * std::sin(2.0 * kPi * u); };
    auto pos = [c, warp](double u) { return c.position_vec(warp(u)); };
    auto d1 = [c, warp, dwarp](double u) { return c.velocity(warp(u)) * dwarp(u); };
    auto d2 = [c, warp, dwarp, ddwarp](double u) {
        return c.acceleration(warp(u)) * (dwarp(u) * dwarp(u)) +
               c.velocity(warp(u)) * ddwarp(u);
    };
    const ParamCurve warped = ParamCurve::analytic(0.0, 1.0, pos, d1, d2, false);
    CHECK_THAT(integral_kp(arclength_reparam(warped), 2.0), WithinRel(ref, 1e-6));

    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::normal_distribution<double> g;
    for (int i = 0; i < 5; ++i) {
        const Rotation3 r = rotation_about_axis(normalized(Vec3{g(rng), g(rng), g(rng)}), u(rng));
        REQUIRE_THAT(integral_kp(rotate_curve(c, r), 2.0), WithinRel(ref, 1e-10));
    }
}

TEST_CASE("Hoelder property of curvature averages") {
    // (avg_J |k|^q)^(p/q) <= avg_J |k|^p for q in [1, p].
    const double p = 2.5;
    auto avg_pow = [](const ParamCurve& c, double a, double b, double q) {
        auto f = [&](double s) {
            return std::pow(norm(c.acceleration(s) + c.position_vec(s)), q);
        };
        return integrate_adaptive(f, a, b, 64).value / (b - a);
    };
    const ParamCurve par = make_parallel(0.9);
    const ParamCurve spiral = arclength_reparam(pushforward_curve(make_spiral(0.5, 0.6, 2.0)));
    for (const ParamCurve* c : {&par, &spiral}) {
        for (double q : {1.0, 1.5, 2.0, 2.5}) {
            const double a = c->t_begin() + 0.1;
            const double b = c->t_end() - 0.1;
            const double lhs = std::pow(avg_pow(*c, a, b, q), p / q);
            const double rhs = avg_pow(*c, a, b, p);
            REQUIRE(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("sampled-curve CSV ingestion") {
    const ParamCurve c = make_parallel(kPi / 3);
    std::ostringstream csv;
    csv << "t,x,y,z\n";
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double t = c.t_end() * i / n;
        const Vec3 v = c.position_vec(t);
        csv << t << ',' << v.x << ',' << v.y << ',' << v.z << '\n';
    }

    SECTION("round trip positions") {
        std::istringstream in(csv.str());
        const ParamCurve loaded = load_curve_csv(in);
        for (double t : {0.5, 2.0, 4.4})
            CHECK_THAT(max_abs_diff(loaded.position_vec(t), c.position_vec(t)),
                       WithinAbs(0.0, 1e-4));
        // Loaded positions live on the sphere.
        CHECK_THAT(norm(loaded.position_vec(1.234)), WithinAbs(1.0, 1e-12));
    }

    SECTION("bad rows rejected") {
        std::istringstream bad_header("x,y,z\n0,1,0,0\n");
        CHECK_THROWS_AS(load_curve_csv(bad_header), std::invalid_argument);

        std::istringstream off_sphere("t,x,y,z\n0,1,0,0\n1,1.1,0,0\n2,0,1,0\n3,0,0,1\n");
        CHECK_THROWS_AS(load_curve_csv(off_sphere), std::invalid_argument);

        std::istringstream non_monotone("t,x,y,z\n0,1,0,0\n2,0,1,0\n1,0,0,1\n3,1,0,0\n");
        CHECK_THROWS_AS(load_curve_csv(non_monotone), std::invalid_argument);
    }
}
