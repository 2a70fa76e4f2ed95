#pragma once

#include <span>
#include <vector>

namespace warpgeo {

// Composite Simpson on a uniform grid with an even number of intervals.
double simpson(std::span<const double> f, double h);

// Running integral F_i = int_0^{t_i} f on a uniform grid, fourth order. Each
// interval uses the cubic through its four nearest samples, so the error is
// a smooth function of t and survives differentiation (Simpson's running sum
// alternates between even and odd nodes).
std::vector<double> cumulative_integral(std::span<const double> f, double h);

// Fourth-order finite-difference derivative of uniformly sampled data:
// centered five-point stencil inside, one-sided five-point at the ends.
std::vector<double> differentiate(std::span<const double> f, double h);

}  // namespace warpgeo
