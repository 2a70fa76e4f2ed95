#include "warpgeo/reparam.hpp"

#include <algorithm>
#include <cmath>

#include "warpgeo/quadrature.hpp"
#include "warpgeo/roots.hpp"

namespace warpgeo {

MonotoneMap::MonotoneMap(std::vector<double> values, std::vector<double> slopes, double constant,
                         std::vector<double> second)
    : values_(std::move(values)), slopes_(std::move(slopes)), second_(std::move(second)), constant_(constant) {
    const std::size_t n = values_.size();
    if (n < 2 || slopes_.size() != n || (!second_.empty() && second_.size() != n)) {
        throw InputError("monotone map arrays are inconsistent");
    }
    if (values_.front() != 0.0 || values_.back() != 1.0) {
        throw InputError("monotone map must pin 0 and 1",
                         {{"first", values_.front()}, {"last", values_.back()}});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(values_[i + 1] > values_[i])) {
            throw NumericalError("map is not strictly increasing", {{"index", static_cast<double>(i)}});
        }
    }
    for (double m : slopes_) {
        if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("map slope is not positive", {{"slope", m}});
    }
    // Fritsch-Carlson limiting keeps every cubic piece increasing.
    limited_ = slopes_;
    const double h = step();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = (values_[i + 1] - values_[i]) / h;
        const double alpha = limited_[i] / delta, beta = limited_[i + 1] / delta;
        const double s = alpha * alpha + beta * beta;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            limited_[i] = tau * alpha * delta;
            limited_[i + 1] = tau * beta * delta;
        }
    }
}

std::size_t MonotoneMap::locate(double s, double& u) const {
    if (!(s >= -1e-12 && s <= 1.0 + 1e-12)) {
        throw InputError("monotone map queried outside [0, 1]", {{"s", s}});
    }
    const double x = std::clamp(s, 0.0, 1.0) / step();
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= size() - 1) i = size() - 2;
    u = x - static_cast<double>(i);
    return i;
}

double MonotoneMap::value_at(double s) const {
    double u;
    const std::size_t i = locate(s, u);
    const double h = step(), u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * values_[i] + (u3 - 2 * u2 + u) * h * limited_[i] +
           (-2 * u3 + 3 * u2) * values_[i + 1] + (u3 - u2) * h * limited_[i + 1];
}

double MonotoneMap::derivative_at(double s) const {
    double u;
    const std::size_t i = locate(s, u);
    const double h = step(), u2 = u * u;
    return (6 * u2 - 6 * u) / h * values_[i] + (3 * u2 - 4 * u + 1) * limited_[i] +
           (-6 * u2 + 6 * u) / h * values_[i + 1] + (3 * u2 - 2 * u) * limited_[i + 1];
}

double MonotoneMap::inverse_at(double y) const {
    if (!(y >= -1e-12 && y <= 1.0 + 1e-12)) throw InputError("inverse queried outside [0, 1]", {{"y", y}});
    y = std::clamp(y, 0.0, 1.0);
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 1.0;
    auto it = std::upper_bound(values_.begin(), values_.end(), y);
    const auto j = static_cast<std::size_t>(std::distance(values_.begin(), it)) - 1;
    if (values_[j] == y) return static_cast<double>(j) * step();
    const double h = step();
    double lo = static_cast<double>(j) * h, hi = static_cast<double>(j + 1) * h;
    // Newton from the secant guess, safeguarded by the bracket.
    double s = lo + (y - values_[j]) / (values_[j + 1] - values_[j]) * h;
    for (int it2 = 0; it2 < 100; ++it2) {
        const double f = value_at(s) - y;
        if (f == 0.0) return s;
        if (f > 0.0) hi = s; else lo = s;
        const double d = derivative_at(s);
        double next = s - f / d;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s || hi - lo <= 4e-16 * std::max(1.0, hi)) return next;
        s = next;
    }
    return s;
}

namespace {

Curve unit_span(const Curve& c) {
    return std::abs(c.span() - 1.0) <= 1e-14 ? c : c.normalized();
}

}  // namespace

MonotoneMap compute_phi_inverse(const Curve& mu_in, const WarpField& w, double r) {
    require_admissible(w, r);
    const Curve mu = unit_span(mu_in);
    const std::size_t n = mu.size();
    std::vector<double> f(n), df(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = w.jet(mu.points()[i]);
        const double q = 1.0 + r * j.value;
        f[i] = j.value / q;
        double dk = 0.0;
        for (int c = 0; c < mu.dim(); ++c) dk += j.d(c) * mu.velocities()[i][c];
        df[i] = dk / (q * q);
    }
    auto F = cumulative_integral(f, mu.step());
    const double a = F.back();
    std::vector<double> slopes(n), second(n);
    for (std::size_t i = 0; i < n; ++i) {
        F[i] /= a;
        slopes[i] = f[i] / a;
        second[i] = df[i] / a;
    }
    F.front() = 0.0;
    F.back() = 1.0;
    return MonotoneMap(std::move(F), std::move(slopes), a, std::move(second));
}

MonotoneMap compute_a_and_phi(const Curve& mu_in, const WarpField& w, double r) {
    const Curve mu = unit_span(mu_in);
    const MonotoneMap inv = compute_phi_inverse(mu, w, r);
    const double a = inv.constant();
    const std::size_t n = mu.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    std::vector<double> values(n), slopes(n), second(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = i == 0 ? 0.0 : (i + 1 == n ? 1.0 : inv.inverse_at(static_cast<double>(i) * h));
        values[i] = s;
        const Vec x = mu.point_at(s);
        const Vec v = mu.velocity_at(s);
        const auto j = w.jet(x);
        slopes[i] = a * (1.0 + r * j.value) / j.value;
        double dk = 0.0;
        for (int c = 0; c < mu.dim(); ++c) dk += j.d(c) * v[c];
        second[i] = -a * dk * slopes[i] / (j.value * j.value);
    }
    return MonotoneMap(std::move(values), std::move(slopes), a, std::move(second));
}

MonotoneMap compute_b_and_psi(const Curve& gamma_in, const WarpField& w) {
    const Curve gamma = unit_span(gamma_in);
    const std::size_t n = gamma.size();
    std::vector<double> g(n), dg(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = w.jet(gamma.points()[i]);
        g[i] = 1.0 / j.value;
        double dk = 0.0;
        for (int c = 0; c < gamma.dim(); ++c) dk += j.d(c) * gamma.velocities()[i][c];
        dg[i] = -dk / (j.value * j.value);
    }
    auto G = cumulative_integral(g, gamma.step());
    const double b = 1.0 / G.back();
    std::vector<double> slopes(n), second(n);
    for (std::size_t i = 0; i < n; ++i) {
        G[i] *= b;
        slopes[i] = b * g[i];
        second[i] = b * dg[i];
    }
    G.front() = 0.0;
    G.back() = 1.0;
    return MonotoneMap(std::move(G), std::move(slopes), b, std::move(second));
}

double b_from_base_curve(const Curve& mu_in, const WarpField& w, double r, double a) {
    const Curve mu = unit_span(mu_in);
    std::vector<double> f(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) f[i] = 1.0 / (1.0 + r * w.value_at(mu.points()[i]));
    return a / cumulative_integral(f, mu.step()).back();
}

Curve reparametrize(const Curve& curve, const MonotoneMap& map) {
    if (std::abs(curve.span() - 1.0) > 1e-12) {
        throw InputError("reparametrization needs a curve on [0, 1]", {{"span", curve.span()}});
    }
    const std::size_t n = map.size();
    const bool second_order = curve.has_accelerations() && map.has_second();
    std::vector<Vec> p(n), v(n), acc;
    if (second_order) acc.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = map.values()[i];
        const double m = map.slopes()[i];
        p[i] = curve.point_at(s);
        const Vec dv = curve.velocity_at(s);
        v[i] = dv * m;
        if (second_order) acc[i] = curve.acceleration_at(s) * (m * m) + dv * map.second()[i];
    }
    return Curve(1.0, std::move(p), std::move(v), std::move(acc));
}

Compatibility check_compatibility(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                                  double r, const Vec& x0, const Vec& X0, const Vec& y0,
                                  const Vec& Y0, double a, double b, double rel_tol) {
    require_admissible(w, r);
    const double k0 = w.value_at(x0);
    const double lhs = a * a * (1.0 + r * k0) / k0 * metric_eval(g1, x0, X0, X0);
    const double rhs = b * b * metric_eval(g2, y0, Y0, Y0);
    const double defect = lhs - rhs;
    return {std::abs(defect) <= rel_tol * std::max({lhs, rhs, 1.0}), defect, lhs, rhs};
}

TangentPair tangent_transform(const Vec& X, const Vec& Y, const Vec& x0, double a, double b,
                              const WarpField& w, double r) {
    require_admissible(w, r);
    const double k0 = w.value_at(x0);
    return {a * (1.0 + r * k0) / k0 * X, (b / k0) * Y};
}

double compatible_fiber_speed(const MetricChart& g1, const WarpField& w, double r, const Vec& x0,
                              const Vec& X, double a, double b) {
    const double k0 = w.value_at(x0);
    return a / b * std::sqrt((1.0 + r * k0) / k0 * metric_eval(g1, x0, X, X));
}

RiemannianGeodesic riemannize(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                              double r, const Curve& mu_in, const Curve& nu_in,
                              const RiemannizeOptions& opts) {
    require_admissible(w, r);
    RiemannianGeodesic out;
    out.r = r;
    out.mu = unit_span(mu_in);
    out.nu = unit_span(nu_in);
    if (out.mu.size() != out.nu.size()) throw InputError("base and fiber geodesics use different grids");

    const MonotoneMap phi = compute_a_and_phi(out.mu, w, r);
    out.a_r = phi.constant();
    out.gamma = reparametrize(out.mu, phi);
    const MonotoneMap psi = compute_b_and_psi(out.gamma, w);
    out.b_r = psi.constant();
    out.b_base = b_from_base_curve(out.mu, w, r, out.a_r);

    const Vec& x0 = out.mu.front();
    const Vec& y0 = out.nu.front();
    out.X_r = out.mu.velocities().front();
    out.Y_r = out.nu.velocities().front();
    const auto compat = check_compatibility(g1, g2, w, r, x0, out.X_r, y0, out.Y_r, out.a_r, out.b_r,
                                            opts.compatibility_tolerance);
    out.compatibility_defect = compat.defect;
    if (!compat.holds) {
        throw ConstructionError("initial tangents violate the compatibility condition", compat.defect);
    }
    out.tau = reparametrize(out.nu, psi);

    const auto tt = tangent_transform(out.X_r, out.Y_r, x0, out.a_r, out.b_r, w, r);
    out.X_tilde = tt.X;
    out.Y_tilde = tt.Y;
    const double k0 = w.value_at(x0);
    out.tangent_defect = metric_eval(g1, x0, out.X_tilde, out.X_tilde) -
                         k0 * (1.0 + r * k0) * metric_eval(g2, y0, out.Y_tilde, out.Y_tilde);

    const double gXX = metric_eval(g1, x0, out.X_r, out.X_r);
    const double gYY = metric_eval(g2, y0, out.Y_r, out.Y_r);
    for (std::size_t i = 0; i < out.gamma.size(); ++i) {
        const Vec& x = out.gamma.points()[i];
        const Vec& v = out.gamma.velocities()[i];
        const double k = w.value_at(x);
        const double base_expected =
            out.a_r * out.a_r * (1.0 + r * k0) * (1.0 + r * k) / (k0 * k) * gXX;
        out.base_norm_error = std::max(out.base_norm_error, std::abs(metric_eval(g1, x, v, v) - base_expected));
        const Vec& u = out.tau.velocities()[i];
        const double fiber = k * k * metric_eval(g2, out.tau.points()[i], u, u);
        out.fiber_norm_error = std::max(out.fiber_norm_error, std::abs(fiber - out.b_r * out.b_r * gYY));
    }
    out.endpoint_mismatch = (out.gamma.back() - out.mu.back()).norm() + (out.tau.back() - out.nu.back()).norm() +
                            (out.gamma.front() - out.mu.front()).norm() + (out.tau.front() - out.nu.front()).norm();

    out.residual = residual_g_system(g1, g2, w, out.gamma, out.tau);
    if (out.residual.max() > opts.residual_tolerance) {
        throw NumericalError("reparametrized curve misses the geodesic system of g",
                             {{"base_residual", out.residual.base},
                              {"fiber_residual", out.residual.fiber},
                              {"tolerance", opts.residual_tolerance}});
    }
    return out;
}

RiemannianGeodesic construct_riemannian_geodesic(const MetricChart& g1, const MetricChart& g2,
                                                 const WarpField& w, double r, const Vec& x0,
                                                 const Vec& X, const Vec& y0,
                                                 const Vec& fiber_direction,
                                                 const IntegratorConfig& cfg,
                                                 const RiemannizeOptions& opts) {
    const MetricChart G = conformal_metric(g1, w, r);
    const Curve mu = integrate_geodesic(G, x0, X, cfg);
    const MonotoneMap phi = compute_a_and_phi(mu, w, r);
    const MonotoneMap psi = compute_b_and_psi(reparametrize(mu, phi), w);
    const double speed = compatible_fiber_speed(g1, w, r, x0, X, phi.constant(), psi.constant());
    Vec Y = Vec::Zero(g2.dim());
    if (speed > 0.0) {
        g2.check_dim(fiber_direction, "fiber direction");
        const double n = std::sqrt(metric_eval(g2, y0, fiber_direction, fiber_direction));
        if (!(n > 0.0)) throw InputError("fiber direction must be nonzero when the base moves");
        Y = fiber_direction * (speed / n);
    }
    const Curve nu = integrate_geodesic(g2, y0, Y, cfg);
    return riemannize(g1, g2, w, r, mu, nu, opts);
}

std::optional<double> classify_riemannian(const MetricChart& g1, const MetricChart& g2,
                                          const WarpField& w, const Vec& x0, const Vec& X_tilde,
                                          const Vec& y0, const Vec& Y_tilde) {
    const double gY = metric_eval(g2, y0, Y_tilde, Y_tilde);
    if (!(gY > 0.0)) throw InputError("classification needs a nonzero fiber tangent");
    const double gX = metric_eval(g1, x0, X_tilde, X_tilde);
    const double k = w.value_at(x0);
    const double threshold = w.K0() ? k * gY * (*w.K0() - k) / *w.K0() : k * gY;
    if (!(gX > threshold)) return std::nullopt;
    const double r = gX / (k * k * gY) - 1.0 / k;
    if (!admissible_range(w).admits(r)) return std::nullopt;
    return r;
}

TangentPair recover_product_tangents(const MetricChart& g1, const MetricChart& g2,
                                     const WarpField& w, double r, const Vec& x0,
                                     const Vec& X_tilde, const Vec& y0, const Vec& Y_tilde,
                                     const IntegratorConfig& cfg) {
    require_admissible(w, r);
    g2.check_dim(y0, "fiber point");
    g2.check_dim(Y_tilde, "fiber tangent");
    const MetricChart G = conformal_metric(g1, w, r);
    const double k0 = w.value_at(x0);
    const double c = (1.0 + r * k0) / k0;
    auto base_for = [&](double lambda) { return integrate_geodesic(G, x0, lambda * X_tilde, cfg); };
    auto a_of = [&](double lambda) { return compute_phi_inverse(base_for(lambda), w, r).constant(); };

    double lambda = 0.0;
    if (X_tilde.norm() > 0.0) {
        // lambda a(lambda) c = 1; a(0) c = 1, and a stays within the range of k/(1+rk).
        auto f = [&](double l) { return l * a_of(l) * c - 1.0; };
        double lo = 0.0, flo = -1.0, hi = 1.0, fhi = f(hi);
        for (int i = 0; fhi < 0.0 && i < 60; ++i) {
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = f(hi);
        }
        lambda = brent(f, lo, hi, flo, fhi, 1e-15 * hi).x;
    }
    const Curve mu = base_for(lambda);
    const MonotoneMap phi = compute_a_and_phi(mu, w, r);
    const double b = compute_b_and_psi(reparametrize(mu, phi), w).constant();
    return {lambda * X_tilde, (k0 / b) * Y_tilde};
}

}  // namespace warpgeo
