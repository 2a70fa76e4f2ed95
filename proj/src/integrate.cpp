#include "warpgeo/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "warpgeo/quadrature.hpp"

namespace warpgeo {

void IntegratorConfig::validate() const {
    if (steps < 16 || steps % 2 != 0) {
        throw InputError("integrator steps must be even and at least 16",
                         {{"steps", static_cast<double>(steps)}});
    }
    if (!(tolerance > 0.0)) throw InputError("integrator tolerance must be positive");
}

OdeSolution rk4(const OdeRhs& f, const Vec& y0, double span, int steps,
                const std::function<bool(const Vec&)>& inside) {
    const double h = span / steps;
    OdeSolution sol;
    sol.states.reserve(static_cast<std::size_t>(steps) + 1);
    sol.derivatives.reserve(static_cast<std::size_t>(steps) + 1);
    if (inside && !inside(y0)) throw DomainError("initial state outside the chart domain", 0.0);

    double t = 0.0;
    auto eval = [&](double s, const Vec& y) -> Vec {
        try {
            Vec d = f(s, y);
            if (!d.allFinite()) throw DomainError("non-finite derivative", t);
            return d;
        } catch (const NumericalError& e) {
            throw DomainError(std::string("left the chart domain: ") + e.what(), t);
        } catch (const dsl::EvaluationError& e) {
            throw DomainError(std::string("left the chart domain: ") + e.what(), t);
        }
    };
    Vec y = y0;
    Vec k1 = eval(0.0, y);
    sol.states.push_back(y);
    sol.derivatives.push_back(k1);
    for (int i = 0; i < steps; ++i) {
        t = span * i / steps;
        const Vec k2 = eval(t + 0.5 * h, y + 0.5 * h * k1);
        const Vec k3 = eval(t + 0.5 * h, y + 0.5 * h * k2);
        const Vec k4 = eval(t + h, y + h * k3);
        Vec next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite() || (inside && !inside(next))) {
            throw DomainError("curve left the chart domain", t);
        }
        y = std::move(next);
        t = span * (i + 1) / steps;
        k1 = eval(t, y);
        sol.states.push_back(y);
        sol.derivatives.push_back(k1);
    }
    return sol;
}

namespace {

std::function<bool(const Vec&)> position_check(const MetricChart& chart, int offset) {
    const int n = chart.dim();
    return [chart, n, offset](const Vec& y) { return chart.contains(y.segment(offset, n)); };
}

Curve split(const OdeSolution& sol, int offset, int n, double span) {
    // each state holds [x (n), v (n)] starting at offset
    const std::size_t m = sol.states.size();
    std::vector<Vec> p(m), v(m), a(m);
    for (std::size_t i = 0; i < m; ++i) {
        p[i] = sol.states[i].segment(offset, n);
        v[i] = sol.states[i].segment(offset + n, n);
        a[i] = sol.derivatives[i].segment(offset + n, n);
    }
    return Curve(span, std::move(p), std::move(v), std::move(a));
}

}  // namespace

Curve integrate_geodesic(const MetricChart& chart, const Vec& p0, const Vec& v0,
                         const IntegratorConfig& cfg, double span) {
    cfg.validate();
    chart.check_dim(p0, "initial point");
    chart.check_dim(v0, "initial velocity");
    const int n = chart.dim();
    Vec y0(2 * n);
    y0 << p0, v0;
    auto rhs = [&chart, n](double, const Vec& y) {
        const auto d = geodesic_rhs(chart, y.head(n), y.tail(n));
        Vec out(2 * n);
        out << d.velocity, d.acceleration;
        return out;
    };
    const auto sol = rk4(rhs, y0, span, cfg.steps, position_check(chart, 0));
    return split(sol, 0, n, span);
}

CurvePair integrate_product_geodesic(const MetricChart& G, const MetricChart& g2, const Vec& x0,
                                     const Vec& y0, const Vec& X0, const Vec& Y0,
                                     const IntegratorConfig& cfg, double span) {
    return {integrate_geodesic(G, x0, X0, cfg, span), integrate_geodesic(g2, y0, Y0, cfg, span)};
}

CurvePair integrate_g_geodesic_oracle(const MetricChart& g1, const MetricChart& g2,
                                      const WarpField& w, const Vec& x0, const Vec& y0,
                                      const Vec& X0, const Vec& Y0, const IntegratorConfig& cfg,
                                      double span) {
    cfg.validate();
    g1.check_dim(x0, "base point");
    g1.check_dim(X0, "base velocity");
    g2.check_dim(y0, "fiber point");
    g2.check_dim(Y0, "fiber velocity");
    if (w.dim() != g1.dim()) throw InputError("warp and base chart dimensions differ");
    const int n = g1.dim();
    const int m = g2.dim();
    Vec s0(2 * n + 2 * m);
    s0 << x0, X0, y0, Y0;
    auto rhs = [&, n, m](double, const Vec& s) {
        const Vec x = s.head(n);
        const Vec v = s.segment(n, n);
        const Vec y = s.segment(2 * n, m);
        const Vec u = s.tail(m);
        const auto jet = w.jet(x);
        Vec dk(n);
        for (int i = 0; i < n; ++i) dk[i] = jet.d(i);
        const double fiber_speed = metric_eval(g2, y, u, u);
        Vec out(2 * n + 2 * m);
        out.head(n) = v;
        out.segment(n, n) = -christoffel(g1, x).contract(v, v) - 0.5 * fiber_speed * sharp(g1, x, dk).components;
        out.segment(2 * n, m) = u;
        out.tail(m) = -christoffel(g2, y).contract(u, u) - (dk.dot(v) / jet.value) * u;
        return out;
    };
    auto inside = [&g1, &g2, n, m](const Vec& s) {
        return g1.contains(s.head(n)) && g2.contains(s.segment(2 * n, m));
    };
    const auto sol = rk4(rhs, s0, span, cfg.steps, inside);
    return {split(sol, 0, n, span), split(sol, 2 * n, m, span)};
}

std::vector<Vec> differentiate_velocities(const Curve& c) {
    const std::size_t m = c.size();
    const int n = c.dim();
    std::vector<Vec> out(m, Vec(n));
    std::vector<double> col(m);
    for (int k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < m; ++i) col[i] = c.velocities()[i][k];
        const auto d = differentiate(col, c.step());
        for (std::size_t i = 0; i < m; ++i) out[i][k] = d[i];
    }
    return out;
}

SystemResidual residual_g_system(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                                 const Curve& gamma, const Curve& tau) {
    if (gamma.size() != tau.size() || std::abs(gamma.span() - tau.span()) > 1e-12 * gamma.span()) {
        throw InputError("base and fiber curves use different grids");
    }
    const auto dv = differentiate_velocities(gamma);
    const auto du = differentiate_velocities(tau);
    SystemResidual r{0.0, 0.0};
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        const Vec& x = gamma.points()[i];
        const Vec& v = gamma.velocities()[i];
        const Vec& y = tau.points()[i];
        const Vec& u = tau.velocities()[i];
        const auto jet = w.jet(x);
        Vec dk(g1.dim());
        for (int k = 0; k < g1.dim(); ++k) dk[k] = jet.d(k);
        const Vec e1 = dv[i] + christoffel(g1, x).contract(v, v) +
                       0.5 * metric_eval(g2, y, u, u) * sharp(g1, x, dk).components;
        const Vec e2 = du[i] + christoffel(g2, y).contract(u, u) + (dk.dot(v) / jet.value) * u;
        r.base = std::max(r.base, e1.cwiseAbs().maxCoeff());
        r.fiber = std::max(r.fiber, e2.cwiseAbs().maxCoeff());
    }
    return r;
}

double residual_geodesic(const MetricChart& chart, const Curve& curve) {
    const auto dv = differentiate_velocities(curve);
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec e = dv[i] - geodesic_rhs(chart, curve.points()[i], curve.velocities()[i]).acceleration;
        worst = std::max(worst, e.cwiseAbs().maxCoeff());
    }
    return worst;
}

double fiber_first_integral_drift(const MetricChart& g2, const WarpField& w, const Curve& gamma,
                                  const Curve& tau) {
    if (gamma.size() != tau.size()) throw InputError("base and fiber curves use different grids");
    auto value = [&](std::size_t i) {
        const double k = w.value_at(gamma.points()[i]);
        return k * k * metric_eval(g2, tau.points()[i], tau.velocities()[i], tau.velocities()[i]);
    };
    const double c0 = value(0);
    double worst = 0.0;
    for (std::size_t i = 1; i < gamma.size(); ++i) worst = std::max(worst, std::abs(value(i) - c0));
    return worst;
}

}  // namespace warpgeo
