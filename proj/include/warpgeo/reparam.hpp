#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "warpgeo/curve.hpp"
#include "warpgeo/integrate.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

// Strictly increasing map of [0, 1] onto [0, 1] sampled on a uniform grid,
// with exact slopes (and optionally second derivatives) at the nodes.
// Between nodes it is the monotone cubic Hermite interpolant.
class MonotoneMap {
public:
    MonotoneMap(std::vector<double> values, std::vector<double> slopes, double constant,
                std::vector<double> second = {});

    std::size_t size() const { return values_.size(); }
    double step() const { return 1.0 / static_cast<double>(values_.size() - 1); }
    double constant() const { return constant_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }
    const std::vector<double>& second() const { return second_; }
    bool has_second() const { return !second_.empty(); }

    double value_at(double s) const;
    double derivative_at(double s) const;
    // Solves value_at(s) = y to full double precision.
    double inverse_at(double y) const;

private:
    std::size_t locate(double s, double& u) const;

    std::vector<double> values_;
    std::vector<double> slopes_;
    std::vector<double> second_;
    std::vector<double> limited_;  // slopes after monotonicity limiting
    double constant_;
};

// phi^{-1}(s) = (1/a) int_0^s k/(1+rk) o mu, a = int_0^1 k/(1+rk) o mu.
MonotoneMap compute_phi_inverse(const Curve& mu, const WarpField& w, double r);

// phi with constant a: the inverse of compute_phi_inverse, with slopes
// a (1 + r k)/k o mu o phi.
MonotoneMap compute_a_and_phi(const Curve& mu, const WarpField& w, double r);

// psi(s) = b int_0^s 1/(k o gamma), b = 1 / int_0^1 1/(k o gamma).
MonotoneMap compute_b_and_psi(const Curve& gamma, const WarpField& w);

// The same constant b obtained along mu instead of gamma:
// b = a / int_0^1 1/(1 + r k o mu).
double b_from_base_curve(const Curve& mu, const WarpField& w, double r, double a);

// curve o map, on the grid of the map. Velocities follow the chain rule;
// accelerations are produced when both inputs carry second-order data.
Curve reparametrize(const Curve& curve, const MonotoneMap& map);

struct Compatibility {
    bool holds;
    double defect;  // lhs - rhs
    double lhs;
    double rhs;
};

// a^2 (1 + r k(x0))/k(x0) g1(X0, X0) = b^2 g2(Y0, Y0) within a relative
// tolerance.
Compatibility check_compatibility(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                                  double r, const Vec& x0, const Vec& X0, const Vec& y0,
                                  const Vec& Y0, double a, double b, double rel_tol = 1e-8);

struct TangentPair {
    Vec X;
    Vec Y;
};

// X~ = a (1 + r k(x0))/k(x0) X, Y~ = (b / k(x0)) Y.
TangentPair tangent_transform(const Vec& X, const Vec& Y, const Vec& x0, double a, double b,
                              const WarpField& w, double r);

struct RiemannizeOptions {
    double residual_tolerance = 1e-5;
    double compatibility_tolerance = 1e-8;
};

struct RiemannianGeodesic {
    double r = 0.0;
    Curve mu;     // geodesic of G_r
    Curve nu;     // geodesic of g2
    Curve gamma;  // mu o phi
    Curve tau;    // nu o psi
    double a_r = 0.0;
    double b_r = 0.0;
    double b_base = 0.0;  // b recomputed along mu, cross-check
    Vec X_r;              // mu'(0)
    Vec Y_r;              // nu'(0)
    Vec X_tilde;          // gamma'(0)
    Vec Y_tilde;          // tau'(0)
    SystemResidual residual{0.0, 0.0};
    double base_norm_error = 0.0;   // g1(gamma', gamma') against its closed form
    double fiber_norm_error = 0.0;  // k^2 g2(tau', tau') - b^2 g2(Y, Y)
    double tangent_defect = 0.0;    // g1(X~, X~) - k0 (1 + r k0) g2(Y~, Y~)
    double compatibility_defect = 0.0;
    double endpoint_mismatch = 0.0;  // |gamma(1) - mu(1)| + |tau(1) - nu(1)|
};

// Builds the g-geodesic from a product geodesic (mu, nu) of G_r + g2 on
// [0, 1]. Throws ConstructionError when the initial tangents are not
// compatible and NumericalError when the g-system residual exceeds the
// tolerance.
RiemannianGeodesic riemannize(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                              double r, const Curve& mu, const Curve& nu,
                              const RiemannizeOptions& opts = {});

// Integrates mu from (x0, X) in G_r, scales the fiber direction so that the
// pair is compatible, integrates nu from (y0, Y) and riemannizes.
RiemannianGeodesic construct_riemannian_geodesic(const MetricChart& g1, const MetricChart& g2,
                                                 const WarpField& w, double r, const Vec& x0,
                                                 const Vec& X, const Vec& y0,
                                                 const Vec& fiber_direction,
                                                 const IntegratorConfig& cfg,
                                                 const RiemannizeOptions& opts = {});

// Required g2-norm of Y for compatibility with X given a and b.
double compatible_fiber_speed(const MetricChart& g1, const WarpField& w, double r, const Vec& x0,
                              const Vec& X, double a, double b);

// r for which the g-geodesic with initial tangents (X~, Y~) is Riemannian,
// or nothing when the strict inequality fails. Throws InputError for Y~ = 0.
std::optional<double> classify_riemannian(const MetricChart& g1, const MetricChart& g2,
                                          const WarpField& w, const Vec& x0, const Vec& X_tilde,
                                          const Vec& y0, const Vec& Y_tilde);

// Inverts tangent_transform for a given r: finds (X_r, Y_r) whose product
// geodesic riemannizes to initial tangents (X~, Y~).
TangentPair recover_product_tangents(const MetricChart& g1, const MetricChart& g2,
                                     const WarpField& w, double r, const Vec& x0,
                                     const Vec& X_tilde, const Vec& y0, const Vec& Y_tilde,
                                     const IntegratorConfig& cfg);

}  // namespace warpgeo
