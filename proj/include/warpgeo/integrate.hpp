#pragma once

#include <functional>
#include <utility>

#include "warpgeo/chart.hpp"
#include "warpgeo/curve.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

struct IntegratorConfig {
    int steps = 1024;
    double tolerance = 1e-5;  // residual bound used by callers that verify

    void validate() const;
};

// First-order system y' = f(t, y) on [0, T] with classical RK4. Returns the
// states and the right-hand side evaluated at every node. `inside` is called
// on each accepted state; a false return or an exception thrown by f turns
// into DomainError carrying the last accepted parameter.
struct OdeSolution {
    std::vector<Vec> states;
    std::vector<Vec> derivatives;
};
using OdeRhs = std::function<Vec(double, const Vec&)>;
OdeSolution rk4(const OdeRhs& f, const Vec& y0, double span, int steps,
                const std::function<bool(const Vec&)>& inside = {});

// Geodesic of a single chart on [0, span].
Curve integrate_geodesic(const MetricChart& chart, const Vec& p0, const Vec& v0,
                         const IntegratorConfig& cfg, double span = 1.0);

struct CurvePair {
    Curve first;
    Curve second;
};

// Geodesic of the product metric G + g2. The product splits, so each factor
// is integrated on its own grid with identical steps.
CurvePair integrate_product_geodesic(const MetricChart& G, const MetricChart& g2, const Vec& x0,
                                     const Vec& y0, const Vec& X0, const Vec& Y0,
                                     const IntegratorConfig& cfg, double span = 1.0);

// Geodesic of g = g1 - k g2 integrated directly:
//   D_t gamma' = -1/2 g2(tau', tau') sharp1(dk)
//   D_t tau'   = -(dk(gamma') / k) tau'
CurvePair integrate_g_geodesic_oracle(const MetricChart& g1, const MetricChart& g2,
                                      const WarpField& w, const Vec& x0, const Vec& y0,
                                      const Vec& X0, const Vec& Y0, const IntegratorConfig& cfg,
                                      double span = 1.0);

struct SystemResidual {
    double base;   // equation for gamma
    double fiber;  // equation for tau
    double max() const { return base > fiber ? base : fiber; }
};

// Max-norm residuals of the g-geodesic system, differentiating the sampled
// velocities with fourth-order differences.
SystemResidual residual_g_system(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                                 const Curve& gamma, const Curve& tau);

// Max-norm residual of the plain geodesic equation of `chart`.
double residual_geodesic(const MetricChart& chart, const Curve& curve);

// max_t | k(gamma)^2 g2(tau', tau') - value at 0 |
double fiber_first_integral_drift(const MetricChart& g2, const WarpField& w, const Curve& gamma,
                                  const Curve& tau);

// Differentiates each velocity component along the grid.
std::vector<Vec> differentiate_velocities(const Curve& c);

}  // namespace warpgeo
