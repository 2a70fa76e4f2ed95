#include "warpgeo/task.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "warpgeo/charts.hpp"
#include "warpgeo/serialize.hpp"

namespace warpgeo {

using json = nlohmann::json;

namespace {

const std::set<std::string> kTasks = {"integrate", "riemannize",     "connect",  "partial-connect",
                                      "flrw",      "curvature-scan", "beta-scan"};

const json& member(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing " + where + "." + key);
    return *it;
}

bool has(const json& obj, const std::string& key) { return obj.is_object() && obj.contains(key); }

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError("unknown key " + where + "." + it.key());
    }
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
    return x;
}

double number_at(const json& obj, const std::string& key, const std::string& where) {
    return number(member(obj, key, where), where + "." + key);
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
    return has(obj, key) ? number_at(obj, key, where) : fallback;
}

int integer_at(const json& obj, const std::string& key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

Vec vec_at(const json& obj, const std::string& key, const std::string& where, int dim) {
    const std::vector<double> x = numbers(member(obj, key, where), where + "." + key);
    if (static_cast<int>(x.size()) != dim) {
        throw ConfigError(where + "." + key + " must have " + std::to_string(dim) + " components");
    }
    return Eigen::Map<const Vec>(x.data(), dim);
}

ChartSpec parse_chart(const json& j, const std::string& where) {
    only_keys(j, {"name", "dim", "radius", "f"}, where);
    ChartSpec s;
    const json& name = member(j, "name", where);
    if (!name.is_string()) throw ConfigError(where + ".name must be a string");
    s.name = name.get<std::string>();
    if (has(j, "dim")) s.dim = integer_at(j, "dim", where);
    else if (s.name == "poincare-half-space" || s.name == "poincare-ball") s.dim = 2;
    s.radius = number_or(j, "radius", where, 1.0);
    if (has(j, "f")) {
        if (!j["f"].is_string()) throw ConfigError(where + ".f must be an expression string");
        s.f = j["f"].get<std::string>();
    }
    if (s.name == "weighted-line") {
        if (s.f.empty()) throw ConfigError(where + ".f is required for weighted-line");
        s.dim = 1;
    }
    (void)make_chart(s);  // rejects unknown names and bad dimensions
    return s;
}

ConnectOptions parse_connect_options(const json& sec, const std::string& where) {
    ConnectOptions o;
    if (!has(sec, "options")) return o;
    const json& j = sec["options"];
    const std::string w = where + ".options";
    only_keys(j, {"grid_points", "r_max", "left_offset", "endpoint_tolerance", "shooting"}, w);
    if (has(j, "grid_points")) o.grid_points = integer_at(j, "grid_points", w);
    o.r_max = number_or(j, "r_max", w, o.r_max);
    o.left_offset = number_or(j, "left_offset", w, o.left_offset);
    o.endpoint_tolerance = number_or(j, "endpoint_tolerance", w, o.endpoint_tolerance);
    if (has(j, "shooting")) {
        const json& s = j["shooting"];
        only_keys(s, {"max_iter", "tolerance"}, w + ".shooting");
        if (has(s, "max_iter")) o.shooting.max_iter = integer_at(s, "max_iter", w + ".shooting");
        o.shooting.tolerance = number_or(s, "tolerance", w + ".shooting", o.shooting.tolerance);
    }
    if (o.grid_points < 2) throw ConfigError(w + ".grid_points must be at least 2");
    if (!(o.left_offset > 0.0)) throw ConfigError(w + ".left_offset must be positive");
    return o;
}

std::vector<Vec> parse_points(const json& sec, const std::string& where, int dim) {
    std::vector<Vec> pts;
    if (has(sec, "points")) {
        const json& p = sec["points"];
        if (!p.is_array()) throw ConfigError(where + ".points must be an array of points");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto x = numbers(p[i], where + ".points[" + std::to_string(i) + "]");
            if (static_cast<int>(x.size()) != dim) throw ConfigError(where + ".points entries must match chart1.dim");
            pts.push_back(Eigen::Map<const Vec>(x.data(), dim));
        }
    }
    if (has(sec, "grid")) {
        const json& g = sec["grid"];
        const std::string w = where + ".grid";
        only_keys(g, {"lower", "upper", "counts"}, w);
        const Vec lo = vec_at(g, "lower", w, dim), hi = vec_at(g, "upper", w, dim);
        const auto counts = numbers(member(g, "counts", w), w + ".counts");
        if (static_cast<int>(counts.size()) != dim) throw ConfigError(w + ".counts must match chart1.dim");
        std::vector<int> n(counts.begin(), counts.end());
        for (int c : n) {
            if (c < 1) throw ConfigError(w + ".counts entries must be positive");
        }
        std::vector<int> idx(static_cast<std::size_t>(dim), 0);
        for (;;) {
            Vec p(dim);
            for (int d = 0; d < dim; ++d) {
                const int c = n[static_cast<std::size_t>(d)];
                p[d] = c == 1 ? lo[d] : lo[d] + (hi[d] - lo[d]) * idx[static_cast<std::size_t>(d)] / (c - 1);
            }
            pts.push_back(p);
            int d = dim - 1;
            while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == n[static_cast<std::size_t>(d)]) {
                idx[static_cast<std::size_t>(d)] = 0;
                --d;
            }
            if (d < 0) break;
        }
    }
    if (pts.empty()) throw ConfigError(where + " needs points or a grid");
    return pts;
}

std::vector<double> parse_r_values(const json& sec, const std::string& where, double k1) {
    if (has(sec, "r")) {
        auto r = numbers(sec["r"], where + ".r");
        if (r.empty()) throw ConfigError(where + ".r is empty");
        return r;
    }
    if (has(sec, "r_grid")) {
        const json& g = sec["r_grid"];
        const std::string w = where + ".r_grid";
        only_keys(g, {"points", "r_max", "left_offset"}, w);
        ConnectOptions o;
        if (has(g, "points")) o.grid_points = integer_at(g, "points", w);
        o.r_max = number_or(g, "r_max", w, o.r_max);
        o.left_offset = number_or(g, "left_offset", w, o.left_offset);
        if (o.grid_points < 1) throw ConfigError(w + ".points must be positive");
        return beta_grid(k1, o);
    }
    throw ConfigError(where + " needs r or r_grid");
}

TaskParams parse_params(const TaskConfig& cfg, const json& sec, int d1, int d2, double k1) {
    const std::string& t = cfg.task;
    if (t == "integrate") {
        only_keys(sec, {"x0", "y0", "X", "Y", "span"}, t);
        IntegrateParams p{vec_at(sec, "x0", t, d1), vec_at(sec, "y0", t, d2), vec_at(sec, "X", t, d1),
                          vec_at(sec, "Y", t, d2), number_or(sec, "span", t, 1.0)};
        if (!(p.span > 0.0)) throw ConfigError("integrate.span must be positive");
        return p;
    }
    if (t == "riemannize") {
        only_keys(sec, {"x0", "y0", "X", "Y", "r", "X_tilde", "Y_tilde"}, t);
        RiemannizeParams p;
        p.x0 = vec_at(sec, "x0", t, d1);
        p.y0 = vec_at(sec, "y0", t, d2);
        const bool tilde = has(sec, "X_tilde") || has(sec, "Y_tilde");
        if (tilde == has(sec, "r")) throw ConfigError("riemannize takes either r with X, Y or X_tilde with Y_tilde");
        if (tilde) {
            p.X = vec_at(sec, "X_tilde", t, d1);
            p.Y = vec_at(sec, "Y_tilde", t, d2);
        } else {
            p.r = number_at(sec, "r", t);
            p.X = vec_at(sec, "X", t, d1);
            p.Y = vec_at(sec, "Y", t, d2);
        }
        return p;
    }
    if (t == "connect") {
        only_keys(sec, {"x0", "y0", "x1", "y1", "options"}, t);
        return ConnectParams{vec_at(sec, "x0", t, d1), vec_at(sec, "y0", t, d2), vec_at(sec, "x1", t, d1),
                             vec_at(sec, "y1", t, d2), parse_connect_options(sec, t)};
    }
    if (t == "partial-connect") {
        only_keys(sec, {"r", "x0", "X", "y0", "Y", "alpha", "theta_t"}, t);
        PartialConnectParams p;
        p.r = number_at(sec, "r", t);
        p.x0 = vec_at(sec, "x0", t, d1);
        p.X = vec_at(sec, "X", t, d1);
        p.y0 = vec_at(sec, "y0", t, d2);
        p.Y = vec_at(sec, "Y", t, d2);
        p.alpha = number_at(sec, "alpha", t);
        if (has(sec, "theta_t")) p.theta_t = numbers(sec["theta_t"], t + ".theta_t");
        return p;
    }
    if (t == "flrw") {
        only_keys(sec, {"t0", "t1", "y0", "y1", "f", "options"}, t);
        FlrwParams p;
        p.t0 = number_at(sec, "t0", t);
        p.t1 = number_at(sec, "t1", t);
        p.y0 = vec_at(sec, "y0", t, d2);
        p.y1 = vec_at(sec, "y1", t, d2);
        if (has(sec, "f")) {
            if (!sec["f"].is_string()) throw ConfigError("flrw.f must be an expression string");
            p.f = sec["f"].get<std::string>();
            (void)dsl::parse(*p.f, 1);
        }
        p.options = parse_connect_options(sec, t);
        return p;
    }
    if (t == "curvature-scan") {
        only_keys(sec, {"points", "grid", "r", "planes"}, t);
        CurvatureScanParams p;
        p.points = parse_points(sec, t, d1);
        p.r_values = numbers(member(sec, "r", t), t + ".r");
        if (p.r_values.empty()) throw ConfigError("curvature-scan.r is empty");
        if (has(sec, "planes")) p.planes = integer_at(sec, "planes", t);
        if (p.planes < 1) throw ConfigError("curvature-scan.planes must be positive");
        return p;
    }
    only_keys(sec, {"x0", "x1", "r", "r_grid"}, t);
    return BetaScanParams{vec_at(sec, "x0", t, d1), vec_at(sec, "x1", t, d1), parse_r_values(sec, t, k1)};
}

WarpField make_warp(const WarpSpec& s, int dim) {
    return WarpField::from_expression(dsl::parse(s.k, dim), s.k0, s.K0);
}

std::string fmt(double x) { return format_double(x); }

double oracle_distance(const MetricChart& g1, const MetricChart& g2, const WarpField& w,
                       const RiemannianGeodesic& geo, const IntegratorConfig& ic) {
    const auto [g, t] = integrate_g_geodesic_oracle(g1, g2, w, geo.gamma.front(), geo.tau.front(), geo.X_tilde,
                                                     geo.Y_tilde, ic);
    return std::max(max_pointwise_distance(geo.gamma, g), max_pointwise_distance(geo.tau, t));
}

void add_geodesic_files(TaskResult& res, const RiemannianGeodesic& geo, bool with_product) {
    res.files["gamma.csv"] = geo.gamma.to_csv();
    res.files["tau.csv"] = geo.tau.to_csv();
    if (with_product) {
        res.files["mu.csv"] = geo.mu.to_csv();
        res.files["nu.csv"] = geo.nu.to_csv();
    }
}

std::string geodesic_summary(const RiemannianGeodesic& geo) {
    std::ostringstream os;
    os << "r = " << fmt(geo.r) << ", a_r = " << fmt(geo.a_r) << ", b_r = " << fmt(geo.b_r) << '\n'
       << "g-system residual: base " << fmt(geo.residual.base) << ", fiber " << fmt(geo.residual.fiber) << '\n'
       << "norm identities: base " << fmt(geo.base_norm_error) << ", fiber " << fmt(geo.fiber_norm_error) << '\n';
    return os.str();
}

TaskResult report_connection(const ShootingReport& rep, const MetricChart& g1, const MetricChart& g2,
                             const WarpField& w, const IntegratorConfig& ic) {
    TaskResult res;
    res.report = to_json(rep);
    res.report["oracle_distance"] = oracle_distance(g1, g2, w, rep.geodesic, ic);
    add_geodesic_files(res, rep.geodesic, true);
    if (!rep.scanned.empty()) res.files["beta_scan.csv"] = beta_table_csv(rep.scanned);
    std::ostringstream os;
    os << rep.method << " connection: r0 = " << fmt(rep.r) << ", beta = " << fmt(rep.beta)
       << ", target = " << fmt(rep.target_beta) << '\n'
       << "endpoint error " << fmt(rep.endpoint_error) << ", oracle distance "
       << fmt(res.report["oracle_distance"].get<double>()) << '\n'
       << geodesic_summary(rep.geodesic);
    if (rep.first_integral_residual) os << "first-integral residual " << fmt(*rep.first_integral_residual) << '\n';
    if (rep.sandwich) {
        os << "beta^2 bounds: " << fmt(rep.sandwich->lower) << " <= " << fmt(rep.sandwich->beta_sq)
           << " <= " << fmt(rep.sandwich->upper) << (rep.sandwich->lower_holds ? "" : " (lower fails)")
           << (rep.sandwich->upper_holds ? "" : " (upper fails)") << '\n';
    }
    res.summary = os.str();
    return res;
}

}  // namespace

MetricChart make_chart(const ChartSpec& s) {
    if (s.dim < 1 || s.dim > dsl::kMaxDim) {
        throw InputError("chart dimension out of range", {{"dim", static_cast<double>(s.dim)}});
    }
    if (s.name == "euclidean") return charts::euclidean(s.dim);
    if (s.name == "poincare-half-space") return charts::poincare_half_space(s.dim);
    if (s.name == "poincare-ball") return charts::poincare_ball(s.dim);
    if (s.name == "sphere") return charts::sphere(s.dim, s.radius);
    if (s.name == "weighted-line") return charts::weighted_line(dsl::parse(s.f, 1));
    throw ConfigError("unknown chart '" + s.name +
                      "' (expected euclidean, poincare-half-space, poincare-ball, sphere or weighted-line)");
}

TaskConfig parse_task_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(root, {"task", "description", "chart1", "chart2", "warp", "integrator", "output", "seed", "integrate",
                     "riemannize", "connect", "partial-connect", "flrw", "curvature-scan", "beta-scan"},
              "config");
    TaskConfig cfg;
    const json& task = member(root, "task", "config");
    if (!task.is_string() || !kTasks.count(task.get<std::string>())) {
        throw ConfigError("config.task must be one of integrate, riemannize, connect, partial-connect, flrw, "
                          "curvature-scan, beta-scan");
    }
    cfg.task = task.get<std::string>();
    const bool needs_chart1 = cfg.task != "flrw";
    const bool needs_chart2 = cfg.task != "curvature-scan" && cfg.task != "beta-scan";
    if (needs_chart1) cfg.chart1 = parse_chart(member(root, "chart1", "config"), "chart1");
    else if (has(root, "chart1")) throw ConfigError("flrw fixes the base to the line; drop chart1");
    if (needs_chart2) cfg.chart2 = parse_chart(member(root, "chart2", "config"), "chart2");

    const json& warp = member(root, "warp", "config");
    only_keys(warp, {"k", "k0", "K0"}, "warp");
    if (!member(warp, "k", "warp").is_string()) throw ConfigError("warp.k must be an expression string");
    cfg.warp.k = warp["k"].get<std::string>();
    cfg.warp.k0 = number_at(warp, "k0", "warp");
    if (has(warp, "K0") && !warp["K0"].is_null()) cfg.warp.K0 = number_at(warp, "K0", "warp");
    if (!(cfg.warp.k0 > 0.0)) throw ConfigError("warp.k0 must be positive");
    if (cfg.warp.K0 && !(*cfg.warp.K0 >= cfg.warp.k0)) throw ConfigError("warp.K0 must be at least warp.k0");
    const int d1 = cfg.chart1 ? cfg.chart1->dim : 1;
    const int d2 = cfg.chart2 ? cfg.chart2->dim : 1;
    const WarpField w = make_warp(cfg.warp, d1);

    if (has(root, "integrator")) {
        const json& ig = root["integrator"];
        only_keys(ig, {"steps", "tolerance"}, "integrator");
        if (has(ig, "steps")) cfg.integrator.steps = integer_at(ig, "steps", "integrator");
        cfg.integrator.tolerance = number_or(ig, "tolerance", "integrator", cfg.integrator.tolerance);
    }
    cfg.integrator.validate();
    if (has(root, "output")) {
        if (!root["output"].is_string()) throw ConfigError("config.output must be a path string");
        cfg.output_dir = root["output"].get<std::string>();
    }
    if (has(root, "seed")) {
        if (!root["seed"].is_number_unsigned()) throw ConfigError("config.seed must be a non-negative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    cfg.params = parse_params(cfg, member(root, cfg.task, "config"), d1, d2, admissible_range(w).k1);
    return cfg;
}

TaskConfig load_task_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_task_config(os.str());
}

TaskResult run_task(const TaskConfig& cfg) {
    const IntegratorConfig& ic = cfg.integrator;
    const int d1 = cfg.chart1 ? cfg.chart1->dim : 1;
    const WarpField w = make_warp(cfg.warp, d1);
    const MetricChart g1 = cfg.chart1 ? make_chart(*cfg.chart1) : charts::euclidean(1);
    const std::optional<MetricChart> g2 = cfg.chart2 ? std::optional(make_chart(*cfg.chart2)) : std::nullopt;
    TaskResult res;
    std::ostringstream os;
    os << "task " << cfg.task << " on " << g1.name() << (g2 ? " x " + g2->name() : "") << ", k = " << cfg.warp.k
       << ", " << ic.steps << " steps\n";

    if (const auto* p = std::get_if<IntegrateParams>(&cfg.params)) {
        const auto [gamma, tau] = integrate_g_geodesic_oracle(g1, *g2, w, p->x0, p->y0, p->X, p->Y, ic, p->span);
        const SystemResidual r = residual_g_system(g1, *g2, w, gamma, tau);
        double energy_drift = 0.0, e0 = 0.0;
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            const Vec& x = gamma.points()[i];
            const double e = metric_eval(g1, x, gamma.velocities()[i], gamma.velocities()[i]) -
                             w.value_at(x) * metric_eval(*g2, tau.points()[i], tau.velocities()[i], tau.velocities()[i]);
            if (i == 0) e0 = e;
            energy_drift = std::max(energy_drift, std::abs(e - e0));
        }
        std::optional<double> rc;
        if (metric_eval(*g2, p->y0, p->Y, p->Y) > 0.0) rc = classify_riemannian(g1, *g2, w, p->x0, p->X, p->y0, p->Y);
        res.report = {{"residual", {{"base", r.base}, {"fiber", r.fiber}}},
                      {"fiber_first_integral_drift", fiber_first_integral_drift(*g2, w, gamma, tau)},
                      {"energy", e0},
                      {"energy_drift", energy_drift},
                      {"riemannian_r", rc ? json(*rc) : json(nullptr)},
                      {"end", {{"base", to_json(gamma.back())}, {"fiber", to_json(tau.back())}}}};
        res.files["gamma.csv"] = gamma.to_csv();
        res.files["tau.csv"] = tau.to_csv();
        os << "g-system residual: base " << fmt(r.base) << ", fiber " << fmt(r.fiber) << '\n'
           << "energy " << fmt(e0) << ", drift " << fmt(energy_drift) << '\n'
           << "Riemannian for r = " << (rc ? fmt(*rc) : std::string("none")) << '\n';
    } else if (const auto* p = std::get_if<RiemannizeParams>(&cfg.params)) {
        RiemannianGeodesic geo;
        if (p->r) {
            geo = construct_riemannian_geodesic(g1, *g2, w, *p->r, p->x0, p->X, p->y0, p->Y, ic);
        } else {
            const auto r = classify_riemannian(g1, *g2, w, p->x0, p->X, p->y0, p->Y);
            if (!r) throw PreconditionError("the initial tangents do not belong to any G_r family member");
            const TangentPair tp = recover_product_tangents(g1, *g2, w, *r, p->x0, p->X, p->y0, p->Y, ic);
            const auto [mu, nu] =
                integrate_product_geodesic(conformal_metric(g1, w, *r), *g2, p->x0, p->y0, tp.X, tp.Y, ic);
            geo = riemannize(g1, *g2, w, *r, mu, nu);
            res.report["tangent_recovery_error"] = std::max((geo.X_tilde - p->X).cwiseAbs().maxCoeff(),
                                                            (geo.Y_tilde - p->Y).cwiseAbs().maxCoeff());
        }
        res.report["geodesic"] = to_json(geo);
        res.report["oracle_distance"] = oracle_distance(g1, *g2, w, geo, ic);
        res.report["fiber_first_integral_drift"] = fiber_first_integral_drift(*g2, w, geo.gamma, geo.tau);
        add_geodesic_files(res, geo, true);
        os << geodesic_summary(geo) << "oracle distance " << fmt(res.report["oracle_distance"].get<double>()) << '\n';
    } else if (const auto* p = std::get_if<ConnectParams>(&cfg.params)) {
        const ShootingReport rep = connect_points(g1, *g2, w, p->x0, p->y0, p->x1, p->y1, ic, p->options);
        TaskResult c = report_connection(rep, g1, *g2, w, ic);
        c.summary = os.str() + c.summary;
        return c;
    } else if (const auto* p = std::get_if<FlrwParams>(&cfg.params)) {
        std::optional<dsl::Expr> f;
        if (p->f) f = dsl::parse(*p->f, 1);
        const ShootingReport rep = flrw_connect(w, f, p->t0, p->t1, *g2, p->y0, p->y1, ic, p->options);
        const MetricChart line = f ? charts::weighted_line(*f) : charts::euclidean(1);
        TaskResult c = report_connection(rep, line, *g2, w, ic);
        c.summary = os.str() + c.summary;
        return c;
    } else if (const auto* p = std::get_if<PartialConnectParams>(&cfg.params)) {
        const PartialConnection pc = partial_connect(g1, *g2, w, p->r, p->x0, p->X, p->y0, p->Y, p->alpha, ic);
        res.report = to_json(pc);
        res.report["theta"] = json::array();
        for (double t : p->theta_t) {
            res.report["theta"].push_back(to_json(theta_map(g1, *g2, w, p->r, p->x0, p->X, p->y0, p->Y, t, ic)));
        }
        res.files["gamma.csv"] = pc.plus.gamma.to_csv();
        res.files["tau_plus.csv"] = pc.plus.tau.to_csv();
        res.files["tau_minus.csv"] = pc.minus.tau.to_csv();
        os << "alpha = " << fmt(pc.alpha) << ", r = " << fmt(pc.r) << ": beta = +-" << fmt(pc.beta_plus) << '\n'
           << "residuals: plus " << fmt(pc.plus.residual.max()) << ", minus " << fmt(pc.minus.residual.max()) << '\n';
        for (const auto& th : res.report["theta"]) {
            os << "theta(t = " << fmt(th["t"].get<double>()) << "): beta " << fmt(th["beta"].get<double>())
               << (th["displayed_joinable"].get<bool>() ? "" : " (displayed linear form differs)") << '\n';
        }
    } else if (const auto* p = std::get_if<CurvatureScanParams>(&cfg.params)) {
        const auto samples = curvature_scan(g1, w, p->points, p->r_values, p->planes, cfg.seed);
        std::size_t negative = 0, bound = 0;
        double max_K = -INFINITY, min_margin = INFINITY;
        for (const auto& s : samples) {
            negative += s.K_r < 0.0;
            bound += s.bound_holds();
            max_K = std::max(max_K, s.K_r);
            min_margin = std::min({min_margin, s.margin_e1, s.margin_e2});
        }
        res.report = {{"samples", samples.size()},     {"negative", negative},
                      {"all_negative", negative == samples.size()},
                      {"bound_holds", bound},          {"max_K_r", max_K},
                      {"min_margin", min_margin}};
        res.files["curvature.csv"] = curvature_csv(samples);
        os << negative << " of " << samples.size() << " samples have K_r < 0 (max " << fmt(max_K) << ")\n"
           << "negativity bound holds on " << bound << " samples\n";
    } else if (const auto* p = std::get_if<BetaScanParams>(&cfg.params)) {
        const auto samples = beta_scan(g1, w, p->x0, p->x1, p->r_values, ic);
        std::vector<BetaSample> sorted = samples;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.r < b.r; });
        bool decreasing = true;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) decreasing = decreasing && sorted[i + 1].beta < sorted[i].beta;
        res.report = {{"points", samples.size()},
                      {"strictly_decreasing", decreasing},
                      {"beta_left", sorted.front().beta},
                      {"beta_right", sorted.back().beta},
                      {"ratio", sorted.front().beta / sorted.back().beta},
                      {"samples", json::array()}};
        for (const auto& s : samples) res.report["samples"].push_back(to_json(s));
        res.files["beta.csv"] = beta_table_csv(samples);
        os << samples.size() << " samples, beta from " << fmt(sorted.front().beta) << " to " << fmt(sorted.back().beta)
           << (decreasing ? ", strictly decreasing" : ", not monotone") << '\n';
    }
    res.summary = os.str();
    return res;
}

void write_artifacts(const TaskResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw InputError("cannot write " + (dir / name).string());
        out << text;
    };
    write("report.json", result.report.dump(2) + "\n");
    write("summary.txt", result.summary);
    for (const auto& [name, text] : result.files) write(name, text);
}

}  // namespace warpgeo
