#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "warpgeo/reparam.hpp"

namespace warpgeo {

struct ShootingConfig {
    int max_iter = 60;
    double tolerance = 1e-11;  // endpoint error, max-norm, relative to max(1, |x1|)
};

struct ShootResult {
    Vec V;
    Curve curve;
    double endpoint_error;
    int iterations;
};

// Initial velocity of the geodesic from x0 reaching x1 at parameter 1.
// Damped Newton with a finite-difference Jacobian, started from `guess`
// or from x1 - x0.
ShootResult shoot_boundary(const MetricChart& chart, const Vec& x0, const Vec& x1,
                           const IntegratorConfig& cfg, const ShootingConfig& sc = {},
                           const std::optional<Vec>& guess = std::nullopt);

struct BetaSample {
    double r = 0.0;
    double beta = 0.0;
    double a_r = 0.0;
    double b_r = 0.0;
    Vec X_r;
    int iterations = 0;  // shooting or fixed-point iterations
    double endpoint_error = 0.0;
};

// beta(r) = (a_r / b_r) sqrt((1 + r k(x0)) / k(x0) g1(X_r, X_r)) with X_r the
// G_r-shoot from x0 to x1.
BetaSample beta_of_r(const MetricChart& g1, const WarpField& w, const Vec& x0, const Vec& x1,
                     double r, const IntegratorConfig& cfg, const ShootingConfig& sc = {},
                     const std::optional<Vec>& guess = std::nullopt);

struct ConnectOptions {
    int grid_points = 64;
    double r_max = 1e6;
    double left_offset = 1e-3;  // first grid point k1 + left_offset (1 + |k1|)
    double endpoint_tolerance = 1e-6;
    ShootingConfig shooting;
    RiemannizeOptions riemannize;
};

// Geometric grid in r - k1, ascending.
std::vector<double> beta_grid(double k1, const ConnectOptions& opts);

// beta on a list of r values, evaluated from the last entry backwards so
// each shoot starts from its neighbour's solution. Returned in input order.
std::vector<BetaSample> beta_scan(const MetricChart& g1, const WarpField& w, const Vec& x0,
                                  const Vec& x1, const std::vector<double>& r_values,
                                  const IntegratorConfig& cfg, const ShootingConfig& sc = {});

// Stateful beta evaluator; called with increasing and decreasing r in any order.
using BetaFunction = std::function<BetaSample(double)>;

struct BetaRoot {
    BetaSample sample;
    std::vector<BetaSample> scanned;
    int iterations = 0;
};

// Solves beta(r) = target on (k1, r_max]: scans the grid from r_max down to
// the first sign change, then refines with Brent in log(r - k1).
BetaRoot solve_beta(const BetaFunction& beta, double k1, double target, const ConnectOptions& opts);

struct SandwichBounds {
    double lower;
    double beta_sq;
    double upper;
    bool lower_holds;
    bool upper_holds;
};

struct ShootingReport {
    std::string method;  // "general", "flrw" or "trivial"
    double r = 0.0;      // +inf for the trivial solution
    Vec X_r;
    Vec Y_r;
    double beta = 0.0;
    double target_beta = 0.0;
    RiemannianGeodesic geodesic;
    double endpoint_error = 0.0;
    int iterations = 0;        // root refinement
    int shoot_iterations = 0;  // at the accepted r
    std::vector<BetaSample> scanned;
    std::optional<SandwichBounds> sandwich;
    // FLRW only
    std::optional<double> c_r;
    std::optional<double> first_integral_residual;
};

// Joins z0 = (x0, y0) to z1 = (x1, y1) by a Riemannian geodesic of g.
ShootingReport connect_points(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                              const Vec& x0, const Vec& y0, const Vec& x1, const Vec& y1,
                              const IntegratorConfig& cfg, const ConnectOptions& opts = {});

struct PartialConnection {
    double alpha;
    double r;
    double a;
    double b;
    double beta_plus;
    double beta_minus;
    RiemannianGeodesic plus;
    RiemannianGeodesic minus;
};

// From x0 along the G_r-geodesic with initial g1-unit direction X for
// parameter alpha, and from y0 along the g2-geodesic with unit direction Y:
// the two fiber lengths +-beta for which the endpoints are joinable.
PartialConnection partial_connect(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                                  double r, const Vec& x0, const Vec& X, const Vec& y0,
                                  const Vec& Y, double alpha, const IntegratorConfig& cfg,
                                  const RiemannizeOptions& ropts = {});

struct FlrwProblem {
    double t0;
    double t1;
    double r;
    double c_r;
    int iterations;
    Curve mu;
    double first_integral_residual;  // relative, from differentiated positions
};

struct FlrwOptions {
    double fixed_point_tolerance = 1e-10;
    int max_fixed_point_iter = 500;
};

// Base curve of the weighted line f dt^2 (f = 1 when absent) for G_r from the
// first integral mu' = c sqrt(k / ((1 + r k) f)), c solved by Picard iteration.
FlrwProblem solve_flrw_base(const WarpField& w, const std::optional<dsl::Expr>& f, double t0,
                            double t1, double r, const IntegratorConfig& cfg,
                            const FlrwOptions& fo = {},
                            const std::optional<double>& c_guess = std::nullopt);

ShootingReport flrw_connect(const WarpField& w, const std::optional<dsl::Expr>& f, double t0,
                            double t1, const MetricChart& g2, const Vec& y0, const Vec& y1,
                            const IntegratorConfig& cfg, const ConnectOptions& opts = {},
                            const FlrwOptions& fo = {});

struct ThetaValue {
    double t;
    double a;  // constants along the restriction of mu to [0, t]
    double b;
    double beta;            // fiber length joinable with mu(t)
    double beta_displayed;  // linear form without the square root
    Vec point;              // nu(beta)
    Vec point_displayed;    // nu(beta_displayed)
    bool displayed_joinable;
    double residual;  // g-system residual of the assembled geodesic
};

// theta_r(mu(t)) for the G_r-geodesic mu from (x0, X) and the g2-geodesic nu
// from (y0, Y), X and Y unit. Throws PreconditionError when mu on [0, t]
// intersects itself.
ThetaValue theta_map(const MetricChart& g1, const MetricChart& g2, const WarpField& w, double r,
                     const Vec& x0, const Vec& X, const Vec& y0, const Vec& Y, double t,
                     const IntegratorConfig& cfg);

// True when the sampled trace crosses itself.
bool has_self_intersection(const Curve& c);

}  // namespace warpgeo
