#include "warpgeo/warp.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace warpgeo {

namespace {

constexpr double kBoundSlack = 1e-12;
constexpr double kOrthonormalTol = 1e-8;

void require_unit(const MetricChart& g1, const Vec& p, const TangentVector& e, const char* what) {
    const double n = metric_eval(g1, p, e, e);
    if (std::abs(n - 1.0) > kOrthonormalTol) {
        throw InputError(std::string(what) + " is not g1-unit", {{"norm_sq", n}});
    }
}

}  // namespace

WarpField::WarpField(int dim, JetFn jet, double k0, std::optional<double> K0)
    : dim_(dim), jet_(std::move(jet)), k0_(k0), K0_(K0) {
    if (dim_ < 1 || dim_ > dsl::kMaxDim) throw InputError("warp dimension out of range");
    if (!jet_) throw InputError("warp field has no evaluator");
    if (!(k0_ > 0.0)) throw InputError("declared k0 must be positive", {{"k0", k0_}});
    if (K0_ && !(*K0_ >= k0_)) {
        throw InputError("declared K0 must be >= k0", {{"k0", k0_}, {"K0", *K0_}});
    }
}

WarpField WarpField::from_expression(const dsl::Expr& k, double k0, std::optional<double> K0) {
    return WarpField(
        k.dim(), [k](const Vec& p) { return k.eval2(std::span<const double>(p.data(), p.size())); },
        k0, K0);
}

WarpField WarpField::constant(int dim, double c) {
    return WarpField(
        dim, [dim, c](const Vec&) { return dsl::Jet::constant(dim, c); }, c, c);
}

dsl::Jet WarpField::jet(const Vec& p) const {
    if (p.size() != dim_) {
        throw InputError("warp evaluated at a point of wrong dimension",
                         {{"expected", static_cast<double>(dim_)}, {"got", static_cast<double>(p.size())}});
    }
    dsl::Jet j = jet_(p);
    if (j.value < k0_ * (1.0 - kBoundSlack) || (K0_ && j.value > *K0_ * (1.0 + kBoundSlack))) {
        throw InputError("warp value violates the declared bounds",
                         {{"k", j.value}, {"k0", k0_}, {"K0", K0_.value_or(std::numeric_limits<double>::infinity())}});
    }
    return j;
}

double WarpField::value_at(const Vec& p) const { return jet(p).value; }

Vec WarpField::differential_at(const Vec& p) const {
    const auto j = jet(p);
    Vec d(dim_);
    for (int i = 0; i < dim_; ++i) d[i] = j.d(i);
    return d;
}

Mat WarpField::hessian_at(const Vec& p) const {
    const auto j = jet(p);
    Mat h(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) h(i, k) = j.dd(i, k);
    return h;
}

WarpParameterRange admissible_range(const WarpField& w) {
    return {w.K0() ? -1.0 / *w.K0() : 0.0};
}

void require_admissible(const WarpField& w, double r) {
    const auto range = admissible_range(w);
    if (!range.admits(r) || !std::isfinite(r)) {
        throw ParameterError("warp parameter r must exceed k1", r, range.k1);
    }
}

MetricChart conformal_metric(const MetricChart& g1, const WarpField& w, double r) {
    require_admissible(w, r);
    if (g1.dim() != w.dim()) throw InputError("warp and chart dimensions differ");
    const int n = g1.dim();
    auto metric = [g1, w, r](const Vec& p) -> Mat { return (1.0 / w.value_at(p) + r) * g1.metric_at(p); };
    auto derivative = [g1, w, r, n](const Vec& p) {
        const auto j = w.jet(p);
        const Mat g = g1.metric_at(p);
        auto dg = g1.metric_derivative_at(p);
        const double factor = 1.0 / j.value + r;
        for (int m = 0; m < n; ++m) {
            auto& d = dg[static_cast<std::size_t>(m)];
            d = factor * d - (j.d(m) / (j.value * j.value)) * g;
        }
        return dg;
    };
    auto domain = [g1](const Vec& p) { return g1.contains(p); };
    char name[64];
    std::snprintf(name, sizeof name, "G_r(%.6g)/%s", r, g1.name().c_str());
    return MetricChart(name, n, metric, derivative, domain, {}, g1.fd_step());
}

EquivalenceBounds equivalence_bounds(const WarpField& w, double r) {
    require_admissible(w, r);
    const double k0 = w.k0();
    // t/(1+rt) is increasing in t and (1+rt)/t = 1/t + r is decreasing.
    const double k2 = w.K0() ? *w.K0() / (1.0 + r * *w.K0()) : 1.0 / r;
    const double k3 = (1.0 + r * k0) / k0;
    return {k2, k3};
}

Mat covariant_hessian(const MetricChart& g1, const WarpField& w, const Vec& p) {
    const auto j = w.jet(p);
    const Christoffel gamma = christoffel(g1, p);
    const int n = g1.dim();
    Mat h(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            double v = j.dd(a, b);
            for (int m = 0; m < n; ++m) v -= gamma(m, a, b) * j.d(m);
            h(a, b) = v;
        }
    }
    return 0.5 * (h + h.transpose());
}

double differential_norm_sq(const MetricChart& g1, const WarpField& w, const Vec& p) {
    const Vec dk = w.differential_at(p);
    const Vec v = sharp(g1, p, dk).components;
    return metric_eval(g1, p, v, v);
}

double sectional_curvature_Gr(const MetricChart& g1, const WarpField& w, double r, const Vec& p,
                              const TangentVector& e1, const TangentVector& e2) {
    require_admissible(w, r);
    if (g1.dim() < 2) throw InputError("sectional curvature needs dim M1 >= 2");
    require_unit(g1, p, e1, "e1");
    require_unit(g1, p, e2, "e2");
    const double cross = metric_eval(g1, p, e1, e2);
    if (std::abs(cross) > kOrthonormalTol) {
        throw InputError("e1 and e2 are not g1-orthogonal", {{"g1(e1,e2)", cross}});
    }
    const double K1 = sectional_curvature(g1, p, e1.components, e2.components);
    const double k = w.value_at(p);
    const Vec dk = w.differential_at(p);
    const Mat H = covariant_hessian(g1, w, p);
    const double dk_sq = differential_norm_sq(g1, w, p);
    const double e1k = dk.dot(e1.components);
    const double e2k = dk.dot(e2.components);
    const double hess_sum = e1.components.dot(H * e1.components) + e2.components.dot(H * e2.components);
    const double q = 1.0 + r * k;
    return k / q * K1 + hess_sum / (2.0 * q * q) -
           (1.0 + 4.0 * r * k) / (4.0 * k * q * q * q) * (e1k * e1k + e2k * e2k) -
           dk_sq / (4.0 * k * q * q * q);
}

double negativity_margin(const MetricChart& g1, const WarpField& w, double r, const Vec& p,
                         const TangentVector& e, double sigma_curvature) {
    require_admissible(w, r);
    require_unit(g1, p, e, "e");
    const double k = w.value_at(p);
    const double q = 1.0 + r * k;
    const double ek = w.differential_at(p).dot(e.components);
    const double lhs = e.components.dot(covariant_hessian(g1, w, p) * e.components);
    const double rhs = (1.0 + 4.0 * r * k) / (2.0 * k * q) * ek * ek +
                       differential_norm_sq(g1, w, p) / (4.0 * k * q) - k * q * sigma_curvature;
    return rhs - lhs;
}

bool negativity_check(const MetricChart& g1, const WarpField& w, double r, const Vec& p,
                      const TangentVector& e, double sigma_curvature) {
    return negativity_margin(g1, w, r, p, e, sigma_curvature) > 0.0;
}

std::pair<Vec, Vec> orthonormalize(const MetricChart& g1, const Vec& p, const Vec& u, const Vec& v) {
    const Mat g = g1.metric_at(p);
    const double nu = std::sqrt(u.dot(g * u));
    if (!(nu > 0.0)) throw InputError("cannot orthonormalize a zero vector");
    const Vec e1 = u / nu;
    Vec w = v - e1.dot(g * v) * e1;
    const double nw = std::sqrt(w.dot(g * w));
    if (!(nw > 1e-12 * std::sqrt(v.dot(g * v)))) throw InputError("plane vectors are linearly dependent");
    return {e1, w / nw};
}

std::vector<CurvatureSample> curvature_scan(const MetricChart& g1, const WarpField& w,
                                            const std::vector<Vec>& points,
                                            const std::vector<double>& r_values, int planes,
                                            std::uint64_t seed) {
    if (planes < 1) throw InputError("curvature scan needs at least one plane per point");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = g1.dim();
    std::vector<CurvatureSample> out;
    out.reserve(points.size() * r_values.size() * static_cast<std::size_t>(planes));
    for (const Vec& p : points) {
        for (int k = 0; k < planes; ++k) {
            Vec u(n), v(n);
            for (int i = 0; i < n; ++i) u[i] = normal(rng);
            for (int i = 0; i < n; ++i) v[i] = normal(rng);
            const auto [e1, e2] = orthonormalize(g1, p, u, v);
            const double K1 = sectional_curvature(g1, p, e1, e2);
            for (double r : r_values) {
                CurvatureSample s;
                s.point = p;
                s.r = r;
                s.e1 = e1;
                s.e2 = e2;
                s.K1 = K1;
                s.K_r = sectional_curvature_Gr(g1, w, r, p, {p, e1}, {p, e2});
                s.margin_e1 = negativity_margin(g1, w, r, p, {p, e1}, K1);
                s.margin_e2 = negativity_margin(g1, w, r, p, {p, e2}, K1);
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

}  // namespace warpgeo
