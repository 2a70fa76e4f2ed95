#pragma once

// Built-in charts with analytic metric derivatives and, where constant,
// analytic sectional curvature.

#include "warpgeo/chart.hpp"
#include "warpgeo/expr.hpp"

namespace warpgeo::charts {

MetricChart euclidean(int dim);

// Upper half-space {x_n > 0} with g = |dx|^2 / x_n^2; curvature -1.
MetricChart poincare_half_space(int dim = 2);

// Unit ball with g = 4 |dx|^2 / (1 - |x|^2)^2; curvature -1.
MetricChart poincare_ball(int dim = 2);

// Hyperspherical coordinates (theta_1, ..., theta_n) on the round n-sphere of
// the given radius: g = R^2 (d theta_1^2 + sin^2 theta_1 d theta_2^2 + ...).
// theta_1..theta_{n-1} must lie in (0, pi); the last angle is unrestricted.
// For n = 1 this is the circle R^2 d theta^2 unrolled onto the real line.
MetricChart sphere(int dim, double radius = 1.0);

// The real line with metric f(t) dt^2; f must be positive where evaluated.
MetricChart weighted_line(const dsl::Expr& f);

}  // namespace warpgeo::charts
