#include "warpgeo/connect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "warpgeo/charts.hpp"
#include "warpgeo/quadrature.hpp"
#include "warpgeo/roots.hpp"

namespace warpgeo {

namespace {

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::optional<Curve> try_geodesic(const MetricChart& chart, const Vec& x0, const Vec& v,
                                  const IntegratorConfig& cfg) {
    try {
        return integrate_geodesic(chart, x0, v, cfg);
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

Vec scalar_vec(double x) {
    Vec v(1);
    v << x;
    return v;
}

// beta from a base curve mu of G_r with initial velocity X.
BetaSample beta_from_base(const MetricChart& g1, const WarpField& w, const Vec& x0, double r,
                          const Curve& mu) {
    const MonotoneMap phi = compute_a_and_phi(mu, w, r);
    const MonotoneMap psi = compute_b_and_psi(reparametrize(mu, phi), w);
    BetaSample s;
    s.r = r;
    s.a_r = phi.constant();
    s.b_r = psi.constant();
    s.X_r = mu.velocities().front();
    s.beta = compatible_fiber_speed(g1, w, r, x0, s.X_r, s.a_r, s.b_r);
    return s;
}

SandwichBounds sandwich_bounds(const MetricChart& g1, const WarpField& w, const Vec& x0,
                               const Vec& x1, const RiemannianGeodesic& geo, double beta,
                               const IntegratorConfig& cfg, const ShootingConfig& sc) {
    const Vec X = shoot_boundary(g1, x0, x1, cfg, sc).V;
    const double gxx = metric_eval(g1, x0, X, X);
    const double a = geo.a_r, b = geo.b_r, r = geo.r;
    std::vector<double> f(geo.gamma.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double k = w.value_at(geo.gamma.points()[i]);
        f[i] = (1.0 + r * k) / k;
    }
    SandwichBounds s;
    s.lower = gxx * a / (b * b);
    s.upper = gxx * a * a / (b * b) * simpson(f, geo.gamma.step());
    s.beta_sq = beta * beta;
    const double slack = 1e-6 * std::max(s.beta_sq, 1e-300);
    s.lower_holds = s.lower <= s.beta_sq + slack;
    s.upper_holds = s.beta_sq <= s.upper + slack;
    return s;
}

// Fills the report from the accepted root and the base curve at that root.
void assemble(ShootingReport& rep, const MetricChart& g1, const MetricChart& g2, const WarpField& w,
              const Curve& mu, const BetaRoot& root, const Vec& y0, const Vec& x1, const Vec& y1,
              const Vec& fiber_velocity, double target, const IntegratorConfig& cfg,
              const ConnectOptions& opts) {
    const double r = root.sample.r;
    rep.r = r;
    rep.X_r = mu.velocities().front();
    rep.beta = root.sample.beta;
    rep.target_beta = target;
    rep.iterations = root.iterations;
    rep.shoot_iterations = root.sample.iterations;
    rep.scanned = root.scanned;
    rep.Y_r = fiber_velocity * (root.sample.beta / target);
    const Curve nu = integrate_geodesic(g2, y0, rep.Y_r, cfg);
    rep.geodesic = riemannize(g1, g2, w, r, mu, nu, opts.riemannize);
    rep.endpoint_error = std::max(max_abs(rep.geodesic.gamma.back() - x1),
                                  max_abs(rep.geodesic.tau.back() - y1));
    if (rep.endpoint_error > opts.endpoint_tolerance) {
        throw NumericalError("connecting geodesic misses its endpoint",
                             {{"r", r}, {"endpoint_error", rep.endpoint_error}});
    }
}

}  // namespace

ShootResult shoot_boundary(const MetricChart& chart, const Vec& x0, const Vec& x1,
                           const IntegratorConfig& cfg, const ShootingConfig& sc,
                           const std::optional<Vec>& guess) {
    chart.check_dim(x0, "start point");
    chart.check_dim(x1, "end point");
    const double scale = std::max(1.0, max_abs(x1));
    Vec V = guess ? *guess : Vec(x1 - x0);
    chart.check_dim(V, "initial guess");
    std::optional<Curve> c = try_geodesic(chart, x0, V, cfg);
    if (!c && guess) {
        V = x1 - x0;
        c = try_geodesic(chart, x0, V, cfg);
    }
    if (!c) throw ShootingError("initial shooting guess leaves the chart", INFINITY, 0);
    Vec R = c->back() - x1;
    double err = max_abs(R) / scale;
    const int n = chart.dim();
    for (int it = 0;; ++it) {
        if (err <= sc.tolerance) return {V, std::move(*c), err * scale, it};
        if (it >= sc.max_iter) break;
        Mat J(n, n);
        const double delta = 1e-7 * std::max(1.0, V.norm());
        for (int j = 0; j < n; ++j) {
            Vec Vp = V;
            Vp[j] += delta;
            double d = delta;
            auto cp = try_geodesic(chart, x0, Vp, cfg);
            if (!cp) {
                Vp[j] = V[j] - delta;
                d = -delta;
                cp = try_geodesic(chart, x0, Vp, cfg);
            }
            if (!cp) throw ShootingError("finite-difference probe leaves the chart", err * scale, it);
            J.col(j) = (cp->back() - c->back()) / d;
        }
        const Vec dV = J.fullPivLu().solve(-R);
        if (!dV.allFinite()) throw ShootingError("singular shooting Jacobian", err * scale, it);
        bool accepted = false;
        double lambda = 1.0;
        for (int h = 0; h < 40 && !accepted; ++h, lambda *= 0.5) {
            const Vec Vn = V + lambda * dV;
            auto cn = try_geodesic(chart, x0, Vn, cfg);
            if (!cn) continue;
            const Vec Rn = cn->back() - x1;
            const double en = max_abs(Rn) / scale;
            if (en < err) {
                V = Vn;
                c = std::move(cn);
                R = Rn;
                err = en;
                accepted = true;
            }
        }
        if (!accepted) throw ShootingError("shooting stalled", err * scale, it);
    }
    throw ShootingError("shooting did not converge", err * scale, sc.max_iter);
}

BetaSample beta_of_r(const MetricChart& g1, const WarpField& w, const Vec& x0, const Vec& x1,
                     double r, const IntegratorConfig& cfg, const ShootingConfig& sc,
                     const std::optional<Vec>& guess) {
    require_admissible(w, r);
    const MetricChart G = conformal_metric(g1, w, r);
    ShootResult shot = shoot_boundary(G, x0, x1, cfg, sc, guess);
    BetaSample s = beta_from_base(g1, w, x0, r, shot.curve);
    s.iterations = shot.iterations;
    s.endpoint_error = shot.endpoint_error;
    return s;
}

std::vector<double> beta_grid(double k1, const ConnectOptions& opts) {
    if (opts.grid_points < 2) throw InputError("the r grid needs at least two points");
    const double lo = opts.left_offset * (1.0 + std::abs(k1));
    const double hi = opts.r_max - k1;
    if (!(lo > 0.0) || !(hi > lo)) {
        throw InputError("r grid bounds are inverted", {{"k1", k1}, {"r_max", opts.r_max}});
    }
    std::vector<double> r(static_cast<std::size_t>(opts.grid_points));
    const double n = opts.grid_points - 1;
    for (int i = 0; i < opts.grid_points; ++i) r[static_cast<std::size_t>(i)] = k1 + lo * std::pow(hi / lo, i / n);
    r.back() = opts.r_max;
    return r;
}

std::vector<BetaSample> beta_scan(const MetricChart& g1, const WarpField& w, const Vec& x0,
                                  const Vec& x1, const std::vector<double>& r_values,
                                  const IntegratorConfig& cfg, const ShootingConfig& sc) {
    if (r_values.empty()) throw InputError("empty r grid");
    std::vector<BetaSample> out(r_values.size());
    std::optional<Vec> warm;
    for (std::size_t i = r_values.size(); i-- > 0;) {
        out[i] = beta_of_r(g1, w, x0, x1, r_values[i], cfg, sc, warm);
        warm = out[i].X_r;
    }
    return out;
}

BetaRoot solve_beta(const BetaFunction& beta, double k1, double target, const ConnectOptions& opts) {
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw InputError("target fiber length must be positive", {{"target_beta", target}});
    }
    const std::vector<double> grid = beta_grid(k1, opts);
    BetaRoot out;
    std::vector<BetaSample> scanned;
    scanned.push_back(beta(grid.back()));
    double beta_min = scanned.back().beta, beta_max = beta_min;
    std::optional<std::size_t> lower;  // bracket is [grid[lower], grid[lower + 1]]
    if (scanned.back().beta == target) {
        out.sample = scanned.back();
        out.scanned = scanned;
        return out;
    }
    for (std::size_t i = grid.size() - 1; i-- > 0;) {
        scanned.push_back(beta(grid[i]));
        const double b = scanned.back().beta;
        beta_min = std::min(beta_min, b);
        beta_max = std::max(beta_max, b);
        const double prev = scanned[scanned.size() - 2].beta;
        if ((b - target) * (prev - target) <= 0.0) {
            lower = i;
            break;
        }
    }
    std::reverse(scanned.begin(), scanned.end());
    out.scanned = scanned;
    if (!lower) {
        throw ConnectionError("beta(r) does not reach the target on the scanned range", grid.front(),
                              grid.back(), beta_min, beta_max, target);
    }
    const double fa = scanned[0].beta - target;
    const double fb = scanned[1].beta - target;
    if (fa == 0.0) {
        out.sample = scanned[0];
        return out;
    }
    auto f = [&](double u) { return beta(k1 + std::exp(u)).beta - target; };
    const double ua = std::log(grid[*lower] - k1);
    const double ub = std::log(grid[*lower + 1] - k1);
    const RootResult root = brent(f, ua, ub, fa, fb, 1e-14 * std::max(1.0, std::abs(ua)), 1e-14 * target);
    out.iterations = root.iterations;
    out.sample = beta(k1 + std::exp(root.x));
    return out;
}

ShootingReport connect_points(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                              const Vec& x0, const Vec& y0, const Vec& x1, const Vec& y1,
                              const IntegratorConfig& cfg, const ConnectOptions& opts) {
    cfg.validate();
    g1.check_dim(x0, "base start point");
    g1.check_dim(x1, "base end point");
    g2.check_dim(y0, "fiber start point");
    g2.check_dim(y1, "fiber end point");
    const double k1 = admissible_range(w).k1;
    ShootingReport rep;

    if (y0 == y1) {
        // The fiber stays put and the base follows a g1-geodesic.
        const ShootResult shot = shoot_boundary(g1, x0, x1, cfg, opts.shooting);
        const std::size_t n = shot.curve.size();
        const Curve tau(1.0, std::vector<Vec>(n, y0), std::vector<Vec>(n, Vec::Zero(g2.dim())),
                        std::vector<Vec>(n, Vec::Zero(g2.dim())));
        const double nan = std::numeric_limits<double>::quiet_NaN();
        RiemannianGeodesic& geo = rep.geodesic;
        geo.r = INFINITY;
        geo.mu = shot.curve;
        geo.nu = tau;
        geo.gamma = shot.curve;
        geo.tau = tau;
        geo.a_r = geo.b_r = geo.b_base = nan;
        geo.X_r = geo.X_tilde = shot.V;
        geo.Y_r = geo.Y_tilde = Vec::Zero(g2.dim());
        geo.residual = residual_g_system(g1, g2, w, geo.gamma, geo.tau);
        geo.base_norm_error = speed_drift(g1, geo.gamma);
        rep.method = "trivial";
        rep.r = INFINITY;
        rep.X_r = shot.V;
        rep.Y_r = geo.Y_r;
        rep.shoot_iterations = shot.iterations;
        rep.endpoint_error = max_abs(geo.gamma.back() - x1);
        return rep;
    }
    if (x0 == x1) {
        throw ConnectionError("base points coincide, so beta(r) vanishes for every r", k1, opts.r_max,
                              0.0, 0.0, INFINITY);
    }

    const ShootResult fiber = shoot_boundary(g2, y0, y1, cfg, opts.shooting);
    const double target = std::sqrt(metric_eval(g2, y0, fiber.V, fiber.V));

    std::optional<Vec> warm;
    const BetaFunction f = [&](double r) {
        BetaSample s = beta_of_r(g1, w, x0, x1, r, cfg, opts.shooting, warm);
        warm = s.X_r;
        return s;
    };
    const BetaRoot root = solve_beta(f, k1, target, opts);
    const Curve mu = integrate_geodesic(conformal_metric(g1, w, root.sample.r), x0, root.sample.X_r, cfg);
    rep.method = "general";
    assemble(rep, g1, g2, w, mu, root, y0, x1, y1, fiber.V, target, cfg, opts);
    rep.sandwich = sandwich_bounds(g1, w, x0, x1, rep.geodesic, rep.beta, cfg, opts.shooting);
    return rep;
}

PartialConnection partial_connect(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                                  double r, const Vec& x0, const Vec& X, const Vec& y0,
                                  const Vec& Y, double alpha, const IntegratorConfig& cfg,
                                  const RiemannizeOptions& ropts) {
    require_admissible(w, r);
    g1.check_dim(X, "base direction");
    g2.check_dim(Y, "fiber direction");
    const double nx = std::sqrt(metric_eval(g1, x0, X, X));
    const double ny = std::sqrt(metric_eval(g2, y0, Y, Y));
    if (std::abs(nx - 1.0) > 1e-8 || std::abs(ny - 1.0) > 1e-8) {
        throw InputError("partial connection needs unit directions", {{"norm_X", nx}, {"norm_Y", ny}});
    }
    if (!std::isfinite(alpha)) throw InputError("alpha must be finite");
    const Curve mu = integrate_geodesic(conformal_metric(g1, w, r), x0, alpha * X, cfg);
    const MonotoneMap phi = compute_a_and_phi(mu, w, r);
    const MonotoneMap psi = compute_b_and_psi(reparametrize(mu, phi), w);
    const double k0 = w.value_at(x0);
    PartialConnection pc;
    pc.alpha = alpha;
    pc.r = r;
    pc.a = phi.constant();
    pc.b = psi.constant();
    pc.beta_plus = pc.a / pc.b * std::sqrt((1.0 + r * k0) / k0) * std::abs(alpha);
    pc.beta_minus = -pc.beta_plus;
    pc.plus = riemannize(g1, g2, w, r, mu, integrate_geodesic(g2, y0, pc.beta_plus * Y, cfg), ropts);
    pc.minus = riemannize(g1, g2, w, r, mu, integrate_geodesic(g2, y0, pc.beta_minus * Y, cfg), ropts);
    return pc;
}

FlrwProblem solve_flrw_base(const WarpField& w, const std::optional<dsl::Expr>& f, double t0,
                            double t1, double r, const IntegratorConfig& cfg, const FlrwOptions& fo,
                            const std::optional<double>& c_guess) {
    cfg.validate();
    if (w.dim() != 1) throw InputError("the FLRW solver needs a warp on the real line");
    if (f && f->dim() != 1) throw InputError("the FLRW weight must be a function of t");
    require_admissible(w, r);
    if (!std::isfinite(t0) || !std::isfinite(t1)) throw InputError("FLRW endpoints must be finite");

    // q = k / ((1 + r k) f) and its derivative
    auto q_jet = [&](double x, double& dq) {
        const Vec p = scalar_vec(x);
        const dsl::Jet kj = w.jet(p);
        double fv = 1.0, df = 0.0;
        if (f) {
            const std::array<double, 1> a{x};
            const dsl::Jet fj = f->eval2(a);
            fv = fj.value;
            df = fj.d(0);
        }
        if (!(fv > 0.0)) throw DomainError("the FLRW weight is not positive", x);
        const double k = kj.value, dk = kj.d(0), m = 1.0 + r * k;
        dq = dk / (m * m * fv) - k * df / (m * fv * fv);
        return k / (m * fv);
    };
    auto speed = [&](double x) {
        double dq;
        return std::sqrt(q_jet(x, dq));
    };

    const double D = t1 - t0;
    const int n = cfg.steps;
    const double h = 1.0 / n;
    double c = c_guess.value_or(D / speed(t0));
    if (D == 0.0) c = 0.0;
    int it = 0;
    OdeSolution sol;
    const OdeRhs rhs = [&](double, const Vec& y) { return scalar_vec(c * speed(y[0])); };
    for (;; ++it) {
        if (it >= fo.max_fixed_point_iter) {
            throw NumericalError("FLRW fixed point did not converge", {{"r", r}, {"c_r", c}});
        }
        sol = rk4(rhs, scalar_vec(t0), 1.0, n);
        if (D == 0.0) break;
        std::vector<double> s(sol.states.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = speed(sol.states[i][0]);
        const double c_new = D / simpson(s, h);
        const bool done = std::abs(c_new - c) <= fo.fixed_point_tolerance * std::abs(c_new);
        c = c_new;
        if (done) {
            sol = rk4(rhs, scalar_vec(t0), 1.0, n);
            ++it;
            break;
        }
    }

    std::vector<Vec> p(sol.states.size()), v(p.size()), a(p.size());
    std::vector<double> pos(p.size());
    double vmax = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = sol.states[i][0];
        double dq;
        const double q = q_jet(x, dq);
        p[i] = scalar_vec(x);
        v[i] = scalar_vec(c * std::sqrt(q));
        a[i] = scalar_vec(0.5 * c * c * dq);
        pos[i] = x;
        vmax = std::max(vmax, std::abs(v[i][0]));
    }
    const std::vector<double> d = differentiate(pos, h);
    double res = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) res = std::max(res, std::abs(d[i] - v[i][0]));
    FlrwProblem out{t0, t1, r, c, it, Curve(1.0, std::move(p), std::move(v), std::move(a)), 0.0};
    out.first_integral_residual = vmax > 0.0 ? res / vmax : res;
    return out;
}

ShootingReport flrw_connect(const WarpField& w, const std::optional<dsl::Expr>& f, double t0,
                            double t1, const MetricChart& g2, const Vec& y0, const Vec& y1,
                            const IntegratorConfig& cfg, const ConnectOptions& opts,
                            const FlrwOptions& fo) {
    const MetricChart g1 = f ? charts::weighted_line(*f) : charts::euclidean(1);
    const Vec x0 = scalar_vec(t0), x1 = scalar_vec(t1);
    if (y0 == y1 || t0 == t1) return connect_points(g1, g2, w, x0, y0, x1, y1, cfg, opts);
    if (w.dim() != 1) throw InputError("the FLRW solver needs a warp on the real line");
    g2.check_dim(y0, "fiber start point");
    g2.check_dim(y1, "fiber end point");

    const ShootResult fiber = shoot_boundary(g2, y0, y1, cfg, opts.shooting);
    const double target = std::sqrt(metric_eval(g2, y0, fiber.V, fiber.V));
    std::optional<double> warm;
    const BetaFunction bf = [&](double r) {
        const FlrwProblem P = solve_flrw_base(w, f, t0, t1, r, cfg, fo, warm);
        warm = P.c_r;
        BetaSample s = beta_from_base(g1, w, x0, r, P.mu);
        s.iterations = P.iterations;
        s.endpoint_error = std::abs(P.mu.back()[0] - t1);
        return s;
    };
    const BetaRoot root = solve_beta(bf, admissible_range(w).k1, target, opts);
    const FlrwProblem P = solve_flrw_base(w, f, t0, t1, root.sample.r, cfg, fo, warm);
    ShootingReport rep;
    rep.method = "flrw";
    assemble(rep, g1, g2, w, P.mu, root, y0, x1, y1, fiber.V, target, cfg, opts);
    rep.c_r = P.c_r;
    rep.first_integral_residual = P.first_integral_residual;
    rep.sandwich = sandwich_bounds(g1, w, x0, x1, rep.geodesic, rep.beta, cfg, opts.shooting);
    return rep;
}

bool has_self_intersection(const Curve& c) {
    const auto& p = c.points();
    const std::size_t n = p.size();
    if (c.dim() == 1) {
        bool up = true, down = true;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            up = up && p[i + 1][0] > p[i][0];
            down = down && p[i + 1][0] < p[i][0];
        }
        return !(up || down);
    }
    if (c.dim() == 2) {
        auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 2; j + 1 < n; ++j) {
                const double d1 = cross(p[i], p[i + 1], p[j]);
                const double d2 = cross(p[i], p[i + 1], p[j + 1]);
                const double d3 = cross(p[j], p[j + 1], p[i]);
                const double d4 = cross(p[j], p[j + 1], p[i + 1]);
                if (d1 * d2 < 0.0 && d3 * d4 < 0.0) return true;
                if ((p[i] - p[j]).norm() == 0.0) return true;
            }
        }
        return false;
    }
    // Higher dimensions: non-neighbouring samples closer than half a step.
    std::vector<double> seg(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) seg[i] = (p[i + 1] - p[i]).norm();
    std::vector<double> sorted = seg;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const double threshold = 0.5 * sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 3; j < n; ++j) {
            if ((p[i] - p[j]).norm() < threshold) return true;
        }
    }
    return false;
}

ThetaValue theta_map(const MetricChart& g1, const MetricChart& g2, const WarpField& w, double r,
                     const Vec& x0, const Vec& X, const Vec& y0, const Vec& Y, double t,
                     const IntegratorConfig& cfg) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("theta query parameter must be >= 0", {{"t", t}});
    ThetaValue out;
    out.t = t;
    if (t == 0.0) {
        require_admissible(w, r);
        out.a = out.b = std::numeric_limits<double>::quiet_NaN();
        out.beta = out.beta_displayed = 0.0;
        out.point = out.point_displayed = y0;
        out.displayed_joinable = true;
        out.residual = 0.0;
        return out;
    }
    const Curve mu = integrate_geodesic(conformal_metric(g1, w, r), x0, X, cfg, t);
    if (has_self_intersection(mu)) {
        throw PreconditionError("the base geodesic intersects itself before the query point", {{"t", t}});
    }
    const PartialConnection pc = partial_connect(g1, g2, w, r, x0, X, y0, Y, t, cfg);
    const double k0 = w.value_at(x0);
    out.a = pc.a;
    out.b = pc.b;
    out.beta = pc.beta_plus;
    out.beta_displayed = pc.a / pc.b * (1.0 + r * k0) / k0 * t;
    out.point = pc.plus.tau.back();
    out.point_displayed = integrate_geodesic(g2, y0, out.beta_displayed * Y, cfg).back();
    out.displayed_joinable = std::abs(out.beta_displayed - out.beta) <= 1e-8 * std::max(1.0, out.beta);
    out.residual = pc.plus.residual.max();
    return out;
}

}  // namespace warpgeo
