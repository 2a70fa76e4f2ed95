#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "warpgeo/errors.hpp"

namespace warpgeo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct TangentVector {
    Vec base;
    Vec components;
};

// Gamma^k_ij at one point, stored k-major.
class Christoffel {
public:
    explicit Christoffel(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

    int dim() const { return dim_; }
    double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }
    double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }

    // Gamma^k_ij u^i v^j
    Vec contract(const Vec& u, const Vec& v) const;

private:
    std::size_t index(int k, int i, int j) const {
        return static_cast<std::size_t>((k * dim_ + i) * dim_ + j);
    }
    int dim_;
    std::vector<double> data_;
};

// A single coordinate chart of a Riemannian manifold. Immutable after
// construction; copies share the underlying callables.
class MetricChart {
public:
    using MetricFn = std::function<Mat(const Vec&)>;
    // Returns dg with dg[k](i, j) = d g_ij / d x^k.
    using DerivativeFn = std::function<std::vector<Mat>(const Vec&)>;
    using DomainFn = std::function<bool(const Vec&)>;
    // Sectional curvature of span{e1, e2} at p (any basis of the plane).
    using CurvatureFn = std::function<double(const Vec&, const Vec&, const Vec&)>;

    static constexpr double kDefaultFdStep = 1e-5;

    MetricChart(std::string name, int dim, MetricFn metric, DerivativeFn derivative = {},
                DomainFn domain = {}, CurvatureFn curvature = {}, double fd_step = kDefaultFdStep);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    double fd_step() const { return fd_step_; }

    Mat metric_at(const Vec& p) const;
    // Analytic when supplied, otherwise central differences with fd_step().
    std::vector<Mat> metric_derivative_at(const Vec& p) const;
    std::vector<Mat> metric_derivative_fd(const Vec& p) const;
    bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }

    bool contains(const Vec& p) const;

    bool has_analytic_curvature() const { return static_cast<bool>(curvature_); }
    std::optional<double> analytic_sectional_curvature(const Vec& p, const Vec& e1,
                                                       const Vec& e2) const;

    // Same chart with a different finite-difference step or with the analytic
    // derivative dropped (used to exercise the fallback path).
    MetricChart with_finite_differences(double fd_step = kDefaultFdStep) const;

    void check_dim(const Vec& v, const char* what) const;

private:
    std::string name_;
    int dim_;
    MetricFn metric_;
    DerivativeFn derivative_;
    DomainFn domain_;
    CurvatureFn curvature_;
    double fd_step_;
};

double metric_eval(const MetricChart& chart, const Vec& p, const TangentVector& u,
                   const TangentVector& v);
double metric_eval(const MetricChart& chart, const Vec& p, const Vec& u, const Vec& v);

// Checked Cholesky of the metric; throws NumericalError carrying a condition
// estimate when the matrix is not positive definite.
Eigen::LLT<Mat> metric_factor(const MetricChart& chart, const Vec& p);

Christoffel christoffel(const MetricChart& chart, const Vec& p);
Christoffel christoffel_from(const Mat& g, const std::vector<Mat>& dg,
                             const std::string& name = "metric");

TangentVector sharp(const MetricChart& chart, const Vec& p, const Vec& covector);

struct GeodesicDerivative {
    Vec velocity;
    Vec acceleration;
};

// acceleration^k = -Gamma^k_ij v^i v^j
GeodesicDerivative geodesic_rhs(const MetricChart& chart, const Vec& p, const Vec& v);

// Riemann tensor R^a_{bcd} (R(d_c, d_d) d_b = R^a_{bcd} d_a) by central
// differences of the Christoffel symbols. Indexed [a][b][c][d] flattened.
std::vector<double> riemann_tensor_fd(const MetricChart& chart, const Vec& p);

// Sectional curvature of span{e1, e2}: analytic when the chart provides it,
// otherwise from riemann_tensor_fd.
double sectional_curvature(const MetricChart& chart, const Vec& p, const Vec& e1, const Vec& e2);
double sectional_curvature_fd(const MetricChart& chart, const Vec& p, const Vec& e1,
                              const Vec& e2);

}  // namespace warpgeo
