#include <gtest/gtest.h>

#include <cmath>

#include "warpgeo/charts.hpp"
#include "warpgeo/integrate.hpp"
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

// Unit-speed half-plane geodesic through (0, 1) with horizontal velocity:
// the unit semicircle, (tanh t, sech t).
Vec half_plane_exact(double t) { return v2(std::tanh(t), 1.0 / std::cosh(t)); }

}  // namespace

TEST(Quadrature, SimpsonAndRunningIntegral) {
    const int n = 64;
    const double h = M_PI / n;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = 2 + std::sin(i * h);
    EXPECT_NEAR(simpson(f, h), 2 * M_PI + 2, 1e-6);
    const auto F = cumulative_integral(f, h);
    for (int i = 0; i <= n; ++i) EXPECT_NEAR(F[i], 2 * i * h + 1 - std::cos(i * h), 2e-7);
    std::vector<double> cubic(n + 1);
    for (int i = 0; i <= n; ++i) cubic[i] = std::pow(i * h, 3) - i * h;
    const auto C = cumulative_integral(cubic, h);
    const double x = n * h;
    EXPECT_NEAR(C.back(), std::pow(x, 4) / 4 - x * x / 2, 1e-10);
    EXPECT_THROW((void)simpson(std::vector<double>(4, 1.0), 0.1), InputError);
}

TEST(Quadrature, DifferentiateIsFourthOrder) {
    auto err = [](int n) {
        const double h = 2.0 / n;
        std::vector<double> f(n + 1);
        for (int i = 0; i <= n; ++i) f[i] = std::exp(std::sin(i * h));
        const auto d = differentiate(f, h);
        double e = 0;
        for (int i = 0; i <= n; ++i) e = std::max(e, std::abs(d[i] - std::cos(i * h) * f[i]));
        return e;
    };
    const double ratio = err(64) / err(128);
    EXPECT_GT(ratio, 12.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(Curve, InterpolationReproducesSmoothCurve) {
    const auto c = integrate_geodesic(charts::poincare_half_space(), v2(0, 1), v2(1, 0), {64, 1e-5}, 2.0);
    for (double t : {0.013, 0.5, 1.0 / 3.0, 1.777, 2.0}) {
        EXPECT_LE((c.point_at(t) - half_plane_exact(t)).norm(), 1e-7) << t;
    }
    EXPECT_THROW((void)c.point_at(2.1), InputError);
    const auto n = c.normalized();
    EXPECT_DOUBLE_EQ(n.span(), 1.0);
    EXPECT_TRUE(n.velocities()[5].isApprox(2.0 * c.velocities()[5]));
}

TEST(IntegrateGeodesic, EuclideanLine) {
    const auto c = integrate_geodesic(charts::euclidean(2), v2(0, 0), v2(1, 2), {});
    EXPECT_LE((c.back() - v2(1, 2)).norm(), 1e-14);
    EXPECT_EQ(c.size(), 1025u);
}

TEST(IntegrateGeodesic, HalfPlaneSemicircle) {
    const auto hp = charts::poincare_half_space();
    const auto c = integrate_geodesic(hp, v2(0, 1), v2(1, 0), {});
    for (std::size_t i = 0; i < c.size(); i += 64) {
        EXPECT_LE((c.points()[i] - half_plane_exact(c.param(i))).norm(), 1e-12);
    }
    EXPECT_LE(speed_drift(hp, c), 1e-8);
    EXPECT_LE(residual_geodesic(hp, c), 1e-9);
}

TEST(IntegrateGeodesic, FourthOrderConvergence) {
    const auto hp = charts::poincare_half_space();
    auto err = [&](int steps) {
        const auto c = integrate_geodesic(hp, v2(0, 1), v2(1, 0), {steps, 1e-5}, 3.0);
        return (c.back() - half_plane_exact(3.0)).norm();
    };
    const double ratio = err(32) / err(64);
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(IntegrateGeodesic, ConstantConformalFactorKeepsTheTrace) {
    const auto hp = charts::poincare_half_space();
    const auto G = conformal_metric(hp, WarpField::constant(2, 1.0), 3.0);
    const auto a = integrate_geodesic(hp, v2(0.2, 1), v2(0.7, 0.3), {});
    const auto b = integrate_geodesic(G, v2(0.2, 1), v2(0.7, 0.3), {});
    EXPECT_LE(max_pointwise_distance(a, b), 1e-13);
}

TEST(IntegrateGeodesic, LeavingTheChartIsADomainError) {
    try {
        (void)integrate_geodesic(charts::sphere(2), v2(0.5, 0), v2(-1, 0), {});
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_GT(e.exit_parameter(), 0.45);
        EXPECT_LT(e.exit_parameter(), 0.5);
    }
    EXPECT_THROW((void)integrate_geodesic(charts::euclidean(2), v2(0, 0), v2(1, 0), {10, 1e-5}), InputError);
}

TEST(ProductGeodesic, LineAndRotation) {
    const auto [line, rot] = integrate_product_geodesic(charts::euclidean(1), charts::sphere(1), v1(0),
                                                        v1(0.3), v1(1), v1(1), {});
    EXPECT_NEAR(line.back()[0], 1.0, 1e-14);
    EXPECT_NEAR(rot.back()[0], 1.3, 1e-14);
    const auto [a, b] = integrate_product_geodesic(charts::euclidean(2), charts::euclidean(1), v2(0, 0),
                                                   v1(0), v2(1, 1), v1(-2), {});
    EXPECT_LE((a.back() - v2(1, 1)).norm(), 1e-14);
    EXPECT_NEAR(b.back()[0], -2.0, 1e-14);
}

TEST(ProductGeodesic, HyperbolicTimesSphereConservesSpeeds) {
    const auto hp = charts::poincare_half_space();
    const auto sp = charts::sphere(2);
    const auto [mu, nu] = integrate_product_geodesic(hp, sp, v2(0, 1), v2(1.2, 0.3), v2(0.6, -0.8),
                                                     v2(0.5, 1.0), {});
    EXPECT_LE(speed_drift(hp, mu), 1e-6);
    EXPECT_LE(speed_drift(sp, nu), 1e-6);
}

TEST(Oracle, ConstantWarpDecouples) {
    const auto hp = charts::poincare_half_space();
    const auto sp = charts::sphere(1);
    const auto w = WarpField::constant(2, 1.5);
    const auto [g, t] = integrate_g_geodesic_oracle(hp, sp, w, v2(0, 1), v1(0), v2(0.5, 0.2), v1(0.8), {});
    const auto plain = integrate_geodesic(hp, v2(0, 1), v2(0.5, 0.2), {});
    EXPECT_LE(max_pointwise_distance(g, plain), 1e-13);
    EXPECT_NEAR(t.back()[0], 0.8, 1e-13);
}

TEST(Oracle, StillFiberGivesPlainBaseGeodesic) {
    const auto hp = charts::poincare_half_space();
    const auto w = WarpField::from_expression(dsl::parse("2 + 0.5*sin(x1)", 2), 1.5, 2.5);
    const auto [g, t] = integrate_g_geodesic_oracle(hp, charts::sphere(1), w, v2(0, 1), v1(0.4),
                                                    v2(0.5, 0.2), v1(0), {});
    EXPECT_LE(max_pointwise_distance(g, integrate_geodesic(hp, v2(0, 1), v2(0.5, 0.2), {})), 1e-13);
    for (const auto& p : t.points()) EXPECT_EQ(p[0], 0.4);
}

TEST(Oracle, FlrwFiberFirstIntegral) {
    const auto w = WarpField::from_expression(dsl::parse("2 + sin(t)", 1), 1.0, 3.0);
    const auto e1 = charts::euclidean(1);
    const auto c1 = charts::sphere(1);
    const auto [g, t] = integrate_g_geodesic_oracle(e1, c1, w, v1(0), v1(0), v1(2.5), v1(0.7), {});
    EXPECT_LE(fiber_first_integral_drift(c1, w, g, t), 1e-6);
    const auto res = residual_g_system(e1, c1, w, g, t);
    EXPECT_LE(res.max(), 1e-5);
}

TEST(Residual, NonGeodesicAndConstantCurves) {
    const auto w = WarpField::from_expression(dsl::parse("2 + sin(t)", 1), 1.0, 3.0);
    const auto e1 = charts::euclidean(1);
    const int n = 256;
    std::vector<Vec> p(n + 1), v(n + 1), c(n + 1), z(n + 1);
    for (int i = 0; i <= n; ++i) {
        p[i] = v1(static_cast<double>(i) / n);
        v[i] = v1(1.0);
        c[i] = v1(0.25);
        z[i] = v1(0.0);
    }
    const Curve line(1.0, p, v), still(1.0, c, z);
    EXPECT_GT(residual_g_system(e1, e1, w, line, line).max(), 0.1);
    const auto r0 = residual_g_system(e1, e1, w, still, still);
    EXPECT_EQ(r0.base, 0.0);
    EXPECT_EQ(r0.fiber, 0.0);
    const Curve shorter(1.0, std::vector<Vec>(p.begin(), p.end() - 1), std::vector<Vec>(v.begin(), v.end() - 1));
    EXPECT_THROW((void)residual_g_system(e1, e1, w, line, shorter), InputError);
}

TEST(Curve, CsvFormat) {
    const auto c = integrate_geodesic(charts::euclidean(1), v1(0), v1(0.1), {16, 1e-5});
    const auto csv = c.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,v1");
    // second row: t = 1/16, 17 significant digits, exact round trip
    const auto row = csv.substr(csv.find('\n', csv.find('\n') + 1) + 1);
    EXPECT_EQ(row.substr(0, 7), "0.0625,");
    const double x = std::stod(row.substr(7, row.find(',', 7) - 7));
    EXPECT_EQ(x, c.points()[1][0]);
    EXPECT_NE(row.find(",0.10000000000000001\n"), std::string::npos);
}
