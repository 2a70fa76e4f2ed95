#include "warpgeo/chart.hpp"

#include <cmath>
#include <limits>

namespace warpgeo {

Vec Christoffel::contract(const Vec& u, const Vec& v) const {
    Vec out = Vec::Zero(dim_);
    for (int k = 0; k < dim_; ++k) {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) s += (*this)(k, i, j) * u[i] * v[j];
        }
        out[k] = s;
    }
    return out;
}

MetricChart::MetricChart(std::string name, int dim, MetricFn metric, DerivativeFn derivative,
                         DomainFn domain, CurvatureFn curvature, double fd_step)
    : name_(std::move(name)),
      dim_(dim),
      metric_(std::move(metric)),
      derivative_(std::move(derivative)),
      domain_(std::move(domain)),
      curvature_(std::move(curvature)),
      fd_step_(fd_step) {
    if (dim_ < 1) throw InputError("chart dimension must be positive");
    if (!metric_) throw InputError("chart '" + name_ + "' has no metric evaluator");
    if (!(fd_step_ > 0.0)) throw InputError("finite-difference step must be positive");
}

void MetricChart::check_dim(const Vec& v, const char* what) const {
    if (v.size() != dim_) {
        throw InputError(std::string(what) + " has dimension " + std::to_string(v.size()) +
                             ", chart '" + name_ + "' has dimension " + std::to_string(dim_),
                         {{"expected", static_cast<double>(dim_)},
                          {"got", static_cast<double>(v.size())}});
    }
}

Mat MetricChart::metric_at(const Vec& p) const {
    check_dim(p, "point");
    return metric_(p);
}

std::vector<Mat> MetricChart::metric_derivative_fd(const Vec& p) const {
    check_dim(p, "point");
    std::vector<Mat> dg(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k) {
        Vec plus = p, minus = p;
        plus[k] += fd_step_;
        minus[k] -= fd_step_;
        dg[static_cast<std::size_t>(k)] = (metric_(plus) - metric_(minus)) / (2.0 * fd_step_);
    }
    return dg;
}

std::vector<Mat> MetricChart::metric_derivative_at(const Vec& p) const {
    if (derivative_) {
        check_dim(p, "point");
        return derivative_(p);
    }
    return metric_derivative_fd(p);
}

bool MetricChart::contains(const Vec& p) const {
    if (p.size() != dim_ || !p.allFinite()) return false;
    return !domain_ || domain_(p);
}

std::optional<double> MetricChart::analytic_sectional_curvature(const Vec& p, const Vec& e1,
                                                                const Vec& e2) const {
    if (!curvature_) return std::nullopt;
    return curvature_(p, e1, e2);
}

MetricChart MetricChart::with_finite_differences(double fd_step) const {
    return MetricChart(name_ + "/fd", dim_, metric_, {}, domain_, curvature_, fd_step);
}

double metric_eval(const MetricChart& chart, const Vec& p, const Vec& u, const Vec& v) {
    chart.check_dim(u, "first vector");
    chart.check_dim(v, "second vector");
    return u.dot(chart.metric_at(p) * v);
}

double metric_eval(const MetricChart& chart, const Vec& p, const TangentVector& u,
                   const TangentVector& v) {
    chart.check_dim(u.base, "first vector base");
    chart.check_dim(v.base, "second vector base");
    if (u.base != p || v.base != p) {
        throw InputError("tangent vectors are not based at the evaluation point");
    }
    return metric_eval(chart, p, u.components, v.components);
}

namespace {

Eigen::LLT<Mat> checked_llt(const Mat& g, const std::string& name) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success || !g.allFinite()) {
        double condition = std::numeric_limits<double>::infinity();
        if (g.allFinite()) {
            Eigen::SelfAdjointEigenSolver<Mat> eig(g, Eigen::EigenvaluesOnly);
            const auto ev = eig.eigenvalues().cwiseAbs();
            if (ev.minCoeff() > 0.0) condition = ev.maxCoeff() / ev.minCoeff();
        }
        throw NumericalError("metric of chart '" + name +
                                 "' is not positive definite at the requested point",
                             {{"condition_estimate", condition}});
    }
    return llt;
}

}  // namespace

Eigen::LLT<Mat> metric_factor(const MetricChart& chart, const Vec& p) {
    return checked_llt(chart.metric_at(p), chart.name());
}

Christoffel christoffel_from(const Mat& g, const std::vector<Mat>& dg, const std::string& name) {
    const int n = static_cast<int>(g.rows());
    const auto llt = checked_llt(g, name);
    // lowered(l, i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    Mat lowered(n, n * n);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                lowered(l, i * n + j) =
                    0.5 * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                           dg[static_cast<std::size_t>(l)](i, j));
            }
        }
    }
    const Mat raised = llt.solve(lowered);
    Christoffel gamma(n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) gamma(k, i, j) = raised(k, i * n + j);
        }
    }
    return gamma;
}

Christoffel christoffel(const MetricChart& chart, const Vec& p) {
    return christoffel_from(chart.metric_at(p), chart.metric_derivative_at(p), chart.name());
}

TangentVector sharp(const MetricChart& chart, const Vec& p, const Vec& covector) {
    chart.check_dim(covector, "covector");
    const auto llt = metric_factor(chart, p);
    return {p, llt.solve(covector)};
}

GeodesicDerivative geodesic_rhs(const MetricChart& chart, const Vec& p, const Vec& v) {
    chart.check_dim(v, "velocity");
    const Christoffel gamma = christoffel(chart, p);
    return {v, -gamma.contract(v, v)};
}

std::vector<double> riemann_tensor_fd(const MetricChart& chart, const Vec& p) {
    const int n = chart.dim();
    const double h = chart.fd_step();
    const auto idx = [n](int a, int b, int c, int d) {
        return static_cast<std::size_t>(((a * n + b) * n + c) * n + d);
    };
    const Christoffel g0 = christoffel(chart, p);
    // dgamma[m] = d_m Gamma
    std::vector<Christoffel> dgamma;
    dgamma.reserve(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        Vec plus = p, minus = p;
        plus[m] += h;
        minus[m] -= h;
        const Christoffel gp = christoffel(chart, plus);
        const Christoffel gm = christoffel(chart, minus);
        Christoffel d(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
        dgamma.push_back(d);
    }
    std::vector<double> R(static_cast<std::size_t>(n * n * n * n), 0.0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                for (int d = 0; d < n; ++d) {
                    double v = dgamma[static_cast<std::size_t>(c)](a, d, b) -
                               dgamma[static_cast<std::size_t>(d)](a, c, b);
                    for (int e = 0; e < n; ++e) {
                        v += g0(a, c, e) * g0(e, d, b) - g0(a, d, e) * g0(e, c, b);
                    }
                    R[idx(a, b, c, d)] = v;
                }
            }
        }
    }
    return R;
}

double sectional_curvature_fd(const MetricChart& chart, const Vec& p, const Vec& e1,
                              const Vec& e2) {
    const int n = chart.dim();
    if (n < 2) throw InputError("sectional curvature needs a chart of dimension >= 2");
    chart.check_dim(e1, "first plane vector");
    chart.check_dim(e2, "second plane vector");
    const Mat g = chart.metric_at(p);
    const double area = e1.dot(g * e1) * e2.dot(g * e2) - std::pow(e1.dot(g * e2), 2);
    if (!(area > 0.0)) throw InputError("plane vectors are linearly dependent");
    const auto R = riemann_tensor_fd(chart, p);
    const auto idx = [n](int a, int b, int c, int d) {
        return static_cast<std::size_t>(((a * n + b) * n + c) * n + d);
    };
    // <R(e1, e2) e2, e1>
    Vec Re = Vec::Zero(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) Re[a] += R[idx(a, b, c, d)] * e2[b] * e1[c] * e2[d];
    return e1.dot(g * Re) / area;
}

double sectional_curvature(const MetricChart& chart, const Vec& p, const Vec& e1, const Vec& e2) {
    if (auto k = chart.analytic_sectional_curvature(p, e1, e2)) return *k;
    return sectional_curvature_fd(chart, p, e1, e2);
}

}  // namespace warpgeo
