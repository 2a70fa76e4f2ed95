#include <gtest/gtest.h>

#include <cmath>

#include "warpgeo/charts.hpp"
#include "warpgeo/connect.hpp"
#include "warpgeo/quadrature.hpp"

using namespace warpgeo;

namespace {

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}
Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

WarpField sine_warp() { return WarpField::from_expression(dsl::parse("2 + sin(t)", 1), 1.0, 3.0); }

// beta(r) on the line in closed form: int_x0^x1 dx / sqrt(k (1 + r k)).
double line_beta(double r, double x1) {
    const int n = 4096;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double k = 2 + std::sin(x1 * i / n);
        f[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(k * (1 + r * k));
    }
    return simpson(f, x1 / n);
}

}  // namespace

TEST(Shoot, EuclideanIsTheChordVelocity) {
    const auto s = shoot_boundary(charts::euclidean(2), v2(0, 0), v2(1, 2), {});
    EXPECT_LE((s.V - v2(1, 2)).norm(), 1e-14);
    EXPECT_EQ(s.iterations, 0);
}

TEST(Shoot, VerticalHyperbolicSegment) {
    const auto s = shoot_boundary(charts::poincare_half_space(), v2(0, 1), v2(0, 2), {});
    EXPECT_LE(s.endpoint_error, 1e-8);
    EXPECT_NEAR(s.V[0], 0.0, 1e-12);
    EXPECT_NEAR(s.V[1], std::log(2.0), 1e-8);
}

TEST(Shoot, GeneralHyperbolicPair) {
    const auto hp = charts::poincare_half_space();
    const auto s = shoot_boundary(hp, v2(-1, 0.5), v2(2, 1.5), {});
    EXPECT_LE(s.endpoint_error, 1e-10);
    // distance from the closed form arccosh(1 + |dp|^2 / (2 y0 y1))
    const double d = std::acosh(1 + (9.0 + 1.0) / (2 * 0.5 * 1.5));
    EXPECT_NEAR(std::sqrt(metric_eval(hp, v2(-1, 0.5), s.V, s.V)), d, 1e-7);
}

TEST(Shoot, ConstantConformalFactorKeepsTheEndpoint) {
    const auto hp = charts::poincare_half_space();
    const auto G = conformal_metric(hp, WarpField::constant(2, 1.0), 2.0);
    const auto a = shoot_boundary(hp, v2(0, 1), v2(1, 1.5), {});
    const auto b = shoot_boundary(G, v2(0, 1), v2(1, 1.5), {});
    EXPECT_LE((a.V - b.V).norm(), 1e-9);
}

TEST(Shoot, IterationBudgetExhausted) {
    ShootingConfig sc;
    sc.max_iter = 1;
    try {
        (void)shoot_boundary(charts::poincare_half_space(), v2(-1, 0.5), v2(2, 1.5), {}, sc);
        FAIL();
    } catch (const ShootingError& e) {
        EXPECT_GT(e.best_residual(), sc.tolerance);
    }
}

TEST(Beta, ConstantWarpClosedForm) {
    const auto line = charts::euclidean(1);
    const auto one = WarpField::constant(1, 1.0);
    for (double r : {0.0, 3.0, 8.0, 99.0}) {
        const auto s = beta_of_r(line, one, v1(0), v1(1), r, {});
        EXPECT_NEAR(s.beta, 1 / std::sqrt(1 + r), 1e-12);
        EXPECT_NEAR(s.a_r, 1 / (1 + r), 1e-14);
        EXPECT_NEAR(s.b_r, 1.0, 1e-14);
    }
}

TEST(Beta, SineWarpMatchesTheLineIntegral) {
    const auto line = charts::euclidean(1);
    const auto w = sine_warp();
    for (double r : {-0.3, 0.0, 1.0, 50.0}) {
        const auto s = beta_of_r(line, w, v1(0), v1(M_PI), r, {});
        EXPECT_NEAR(s.beta, line_beta(r, M_PI), 1e-9 * line_beta(r, M_PI)) << r;
    }
}

TEST(Beta, ScanIsDecreasingAndBlowsUpNearK1) {
    const auto w = sine_warp();
    const auto grid = beta_grid(admissible_range(w).k1, {});
    ASSERT_EQ(grid.size(), 64u);
    EXPECT_DOUBLE_EQ(grid.back(), 1e6);
    const auto s = beta_scan(charts::euclidean(1), w, v1(0), v1(M_PI), grid, {});
    for (std::size_t i = 0; i + 1 < s.size(); ++i) EXPECT_GT(s[i].beta, s[i + 1].beta) << i;
    EXPECT_GT(s.front().beta / s.back().beta, 1e3);
    EXPECT_THROW((void)beta_scan(charts::euclidean(1), w, v1(0), v1(M_PI), {}, {}), InputError);
}

TEST(Connect, ConstantWarpRecoversTheClosedFormRoot) {
    const auto line = charts::euclidean(1);
    const auto rep = connect_points(line, line, WarpField::constant(1, 1.0), v1(0), v1(0), v1(1), v1(0.5), {});
    EXPECT_EQ(rep.method, "general");
    EXPECT_NEAR(rep.r, 3.0, 1e-9);
    EXPECT_NEAR(rep.beta, 0.5, 1e-12);
    EXPECT_LE(rep.endpoint_error, 1e-10);
    ASSERT_TRUE(rep.sandwich);
    EXPECT_TRUE(rep.sandwich->lower_holds);
    EXPECT_TRUE(rep.sandwich->upper_holds);
}

TEST(Connect, FixedFiberIsTrivial) {
    const auto hp = charts::poincare_half_space();
    const auto circle = charts::sphere(1);
    const auto rep = connect_points(hp, circle, WarpField::constant(2, 1.0), v2(0, 1), v1(0.3), v2(1, 2), v1(0.3), {});
    EXPECT_EQ(rep.method, "trivial");
    EXPECT_TRUE(std::isinf(rep.r));
    for (const auto& u : rep.geodesic.tau.velocities()) EXPECT_EQ(u.norm(), 0.0);
    EXPECT_LE(rep.endpoint_error, 1e-10);
    EXPECT_LE(rep.geodesic.residual.max(), 1e-5);
}

TEST(Connect, CoincidentBasePointsCannotMoveTheFiber) {
    const auto line = charts::euclidean(1);
    EXPECT_THROW((void)connect_points(line, line, sine_warp(), v1(0), v1(0), v1(0), v1(1), {}), ConnectionError);
}

TEST(Connect, TargetOutsideTheScannedRange) {
    const auto line = charts::euclidean(1);
    ConnectOptions opts;
    opts.r_max = 10.0;
    opts.grid_points = 8;
    try {
        (void)connect_points(line, line, WarpField::constant(1, 1.0), v1(0), v1(0), v1(1), v1(0.01), {}, opts);
        FAIL();
    } catch (const ConnectionError& e) {
        EXPECT_EQ(e.kind(), "connection");
    }
}

TEST(Connect, FlrwInstanceThroughBothSolvers) {
    const auto line = charts::euclidean(1);
    const auto circle = charts::sphere(1);
    const auto w = sine_warp();
    const auto general = connect_points(line, circle, w, v1(0), v1(0), v1(M_PI), v1(1.0), {});
    EXPECT_LE(general.endpoint_error, 1e-6);
    EXPECT_LE(general.geodesic.residual.max(), 1e-5);
    EXPECT_NEAR(line_beta(general.r, M_PI), 1.0, 1e-8);
    const auto [g, t] = integrate_g_geodesic_oracle(line, circle, w, v1(0), v1(0), general.geodesic.X_tilde,
                                                     general.geodesic.Y_tilde, {});
    EXPECT_LE(max_pointwise_distance(general.geodesic.gamma, g), 1e-5);
    EXPECT_LE(max_pointwise_distance(general.geodesic.tau, t), 1e-5);

    const auto flrw = flrw_connect(w, std::nullopt, 0.0, M_PI, circle, v1(0), v1(1.0), {});
    EXPECT_EQ(flrw.method, "flrw");
    EXPECT_NEAR(flrw.r, general.r, 1e-4);
    ASSERT_TRUE(flrw.first_integral_residual);
    EXPECT_LE(*flrw.first_integral_residual, 1e-8);
    EXPECT_LE(flrw.endpoint_error, 1e-6);
    EXPECT_LE(flrw.geodesic.residual.max(), 1e-5);
}

TEST(Flrw, ConstantWarpLine) {
    const auto P = solve_flrw_base(WarpField::constant(1, 1.0), std::nullopt, 0.0, 2.0, 3.0, {});
    EXPECT_NEAR(P.c_r, 2.0 * std::sqrt(4.0), 1e-12);
    for (std::size_t i = 0; i < P.mu.size(); ++i) EXPECT_NEAR(P.mu.points()[i][0], 2.0 * P.mu.param(i), 1e-12);
}

TEST(Flrw, SineWarpSelfConsistency) {
    const auto P = solve_flrw_base(sine_warp(), std::nullopt, 0.0, M_PI, 0.0, {});
    EXPECT_LE(P.first_integral_residual, 1e-8);
    EXPECT_NEAR(P.mu.back()[0], M_PI, 1e-9);
    // c = int sqrt((1 + r k)/k) dx
    const int n = 4096;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[static_cast<std::size_t>(i)] = 1 / std::sqrt(2 + std::sin(M_PI * i / n));
    EXPECT_NEAR(P.c_r, simpson(f, M_PI / n), 1e-9);
    for (std::size_t i = 0; i + 1 < P.mu.size(); ++i) ASSERT_LT(P.mu.points()[i][0], P.mu.points()[i + 1][0]);
}

TEST(Flrw, WeightedLine) {
    const auto f = dsl::parse("1 + 0.5*cos(t)", 1);
    const auto w = sine_warp();
    const auto circle = charts::sphere(1);
    const auto rep = flrw_connect(w, f, 0.0, 2.0, circle, v1(0), v1(0.8), {});
    const auto general = connect_points(charts::weighted_line(f), circle, w, v1(0), v1(0), v1(2.0), v1(0.8), {});
    EXPECT_NEAR(rep.r, general.r, 1e-4);
    EXPECT_LE(rep.geodesic.residual.max(), 1e-5);
}

TEST(Partial, Examples) {
    const auto line = charts::euclidean(1);
    const auto one = WarpField::constant(1, 1.0);
    auto pc = partial_connect(line, line, one, 2.0, v1(0), v1(1), v1(0), v1(1), 0.0, {});
    EXPECT_EQ(pc.beta_plus, 0.0);
    for (double alpha : {0.5, -1.5, 3.0}) {
        pc = partial_connect(line, line, one, 2.0, v1(0), v1(1), v1(0), v1(1), alpha, {});
        EXPECT_NEAR(pc.beta_plus, std::abs(alpha) / std::sqrt(3.0), 1e-13);
        EXPECT_NEAR(pc.beta_minus, -std::abs(alpha) / std::sqrt(3.0), 1e-13);
    }
    const auto circle = charts::sphere(1);
    pc = partial_connect(line, circle, sine_warp(), 0.0, v1(0), v1(1), v1(0), v1(1), M_PI, {});
    EXPECT_GT(pc.beta_plus, 0.0);
    EXPECT_LE(pc.plus.residual.max(), 1e-5);
    EXPECT_LE(pc.minus.residual.max(), 1e-5);
    const auto mu = integrate_geodesic(conformal_metric(line, sine_warp(), 0.0), v1(0), v1(1), {}, M_PI);
    EXPECT_NEAR(pc.plus.gamma.back()[0], mu.back()[0], 1e-12);
    EXPECT_NEAR(pc.plus.tau.back()[0], pc.beta_plus, 1e-12);
    EXPECT_NEAR(pc.minus.tau.back()[0], -pc.beta_plus, 1e-12);
    EXPECT_THROW((void)partial_connect(line, circle, sine_warp(), 0.0, v1(0), v1(2), v1(0), v1(1), 1.0, {}),
                 InputError);
}

TEST(Theta, Examples) {
    const auto hp = charts::poincare_half_space();
    const auto circle = charts::sphere(1);
    const auto one = WarpField::constant(2, 1.0);
    auto th = theta_map(hp, circle, one, 0.5, v2(0, 1), v2(1, 0), v1(0.2), v1(1), 0.0, {});
    EXPECT_EQ(th.point[0], 0.2);
    for (double t : {0.5, 1.0, 2.0}) {
        th = theta_map(hp, circle, one, 3.0, v2(0, 1), v2(1, 0), v1(0.0), v1(1), t, {});
        EXPECT_NEAR(th.beta, t / 2.0, 1e-12);
        EXPECT_NEAR(th.point[0], t / 2.0, 1e-12);
        EXPECT_NEAR(th.beta_displayed, t, 1e-12);
        EXPECT_FALSE(th.displayed_joinable);
        EXPECT_LE(th.residual, 1e-5);
    }
    const auto w = WarpField::from_expression(dsl::parse("2 + 0.5*sin(x1)", 2), 1.5, 2.5);
    for (double t : {0.25, 0.75, 1.5}) {
        th = theta_map(hp, circle, w, 0.2, v2(0, 1), v2(0.6, 0.8), v1(0.0), v1(1), t, {});
        EXPECT_LE(th.residual, 1e-5);
        EXPECT_GT(th.beta, 0.0);
    }
    EXPECT_THROW((void)theta_map(hp, circle, one, 0.5, v2(0, 1), v2(1, 0), v1(0.2), v1(1), -1.0, {}), InputError);
}

TEST(Theta, SelfIntersectionIsAPrecondition) {
    // exp(-|x|^2) |dx|^2: the unit circle is a closed geodesic and nearby
    // geodesics wind around it
    const MetricChart trap("trap", 2, [](const Vec& p) -> Mat {
        return std::exp(-p.squaredNorm()) * Mat::Identity(2, 2);
    });
    const auto circle = charts::sphere(1);
    const auto one = WarpField::constant(2, 1.0);
    const Vec x0 = v2(1.0, 0.0);
    Vec X = v2(0.1, 1.0);
    X /= std::sqrt(metric_eval(trap, x0, X, X));
    EXPECT_THROW((void)theta_map(trap, circle, one, 0.0, x0, X, v1(0), v1(1), 30.0, {}), PreconditionError);
    EXPECT_NO_THROW((void)theta_map(trap, circle, one, 0.0, x0, X, v1(0), v1(1), 1.0, {}));
}

TEST(SelfIntersection, PlaneAndLine) {
    std::vector<Vec> p, v;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double s = 1.5 * 2 * M_PI * i / n;
        p.push_back(v2(std::cos(s), std::sin(s)));
        v.push_back(v2(-std::sin(s), std::cos(s)));
    }
    EXPECT_TRUE(has_self_intersection(Curve(1.0, p, v)));
    p.resize(n / 2);
    v.resize(n / 2);
    EXPECT_FALSE(has_self_intersection(Curve(1.0, p, v)));
    EXPECT_TRUE(has_self_intersection(Curve(1.0, {v1(0), v1(1), v1(0.5)}, {v1(1), v1(1), v1(1)})));
}
