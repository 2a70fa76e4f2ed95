#pragma once

#include <functional>

namespace warpgeo {

struct RootResult {
    double x;
    double fx;
    int iterations;
};

// Brent's method on a sign-changing bracket [a, b] with known end values.
// Stops when the bracket is narrower than xtol (absolute) or |f| <= ftol.
// Throws NumericalError when the values do not bracket a root or max_iter
// is exhausted.
RootResult brent(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                 double xtol, double ftol = 0.0, int max_iter = 200);

}  // namespace warpgeo
