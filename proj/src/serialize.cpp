#include "warpgeo/serialize.hpp"

#include <cmath>
#include <sstream>

#include "warpgeo/expr.hpp"

namespace warpgeo {

namespace {

nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

nlohmann::json to_json(const RiemannianGeodesic& g) {
    return {
        {"r", num(g.r)},
        {"a_r", num(g.a_r)},
        {"b_r", num(g.b_r)},
        {"b_from_base_curve", num(g.b_base)},
        {"X_r", to_json(g.X_r)},
        {"Y_r", to_json(g.Y_r)},
        {"X_tilde", to_json(g.X_tilde)},
        {"Y_tilde", to_json(g.Y_tilde)},
        {"residual", {{"base", num(g.residual.base)}, {"fiber", num(g.residual.fiber)}}},
        {"base_norm_error", num(g.base_norm_error)},
        {"fiber_norm_error", num(g.fiber_norm_error)},
        {"tangent_defect", num(g.tangent_defect)},
        {"compatibility_defect", num(g.compatibility_defect)},
        {"endpoint_mismatch", num(g.endpoint_mismatch)},
        {"start", {{"base", to_json(g.gamma.front())}, {"fiber", to_json(g.tau.front())}}},
        {"end", {{"base", to_json(g.gamma.back())}, {"fiber", to_json(g.tau.back())}}},
        {"samples", g.gamma.size()},
    };
}

nlohmann::json to_json(const BetaSample& s) {
    return {{"r", num(s.r)},       {"beta", num(s.beta)},       {"a_r", num(s.a_r)},
            {"b_r", num(s.b_r)},   {"X_r", to_json(s.X_r)},    {"iterations", s.iterations},
            {"endpoint_error", num(s.endpoint_error)}};
}

nlohmann::json to_json(const SandwichBounds& s) {
    return {{"lower", num(s.lower)},
            {"beta_squared", num(s.beta_sq)},
            {"upper", num(s.upper)},
            {"lower_holds", s.lower_holds},
            {"upper_holds", s.upper_holds}};
}

nlohmann::json to_json(const ShootingReport& rep) {
    nlohmann::json j = {
        {"method", rep.method},
        {"r", num(rep.r)},
        {"X_r", to_json(rep.X_r)},
        {"Y_r", to_json(rep.Y_r)},
        {"beta", num(rep.beta)},
        {"target_beta", num(rep.target_beta)},
        {"endpoint_error", num(rep.endpoint_error)},
        {"root_iterations", rep.iterations},
        {"shoot_iterations", rep.shoot_iterations},
        {"geodesic", to_json(rep.geodesic)},
        {"scanned", rep.scanned.size()},
    };
    j["sandwich"] = rep.sandwich ? to_json(*rep.sandwich) : nlohmann::json(nullptr);
    if (rep.c_r) j["c_r"] = num(*rep.c_r);
    if (rep.first_integral_residual) j["first_integral_residual"] = num(*rep.first_integral_residual);
    return j;
}

nlohmann::json to_json(const PartialConnection& pc) {
    return {{"alpha", num(pc.alpha)},         {"r", num(pc.r)},
            {"a", num(pc.a)},                 {"b", num(pc.b)},
            {"beta_plus", num(pc.beta_plus)}, {"beta_minus", num(pc.beta_minus)},
            {"plus", to_json(pc.plus)},       {"minus", to_json(pc.minus)}};
}

nlohmann::json to_json(const ThetaValue& th) {
    return {{"t", num(th.t)},
            {"a", num(th.a)},
            {"b", num(th.b)},
            {"beta", num(th.beta)},
            {"beta_displayed", num(th.beta_displayed)},
            {"point", to_json(th.point)},
            {"point_displayed", to_json(th.point_displayed)},
            {"displayed_joinable", th.displayed_joinable},
            {"residual", num(th.residual)}};
}

nlohmann::json to_json(const CurvatureSample& s) {
    return {{"point", to_json(s.point)}, {"r", num(s.r)},           {"e1", to_json(s.e1)},
            {"e2", to_json(s.e2)},       {"K1", num(s.K1)},         {"K_r", num(s.K_r)},
            {"margin_e1", num(s.margin_e1)}, {"margin_e2", num(s.margin_e2)}};
}

nlohmann::json to_json(const Error& e) {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [name, value] : e.fields()) fields[name] = num(value);
    nlohmann::json j = {{"kind", e.kind()}, {"message", e.what()}, {"fields", fields}};
    if (const auto* pe = dynamic_cast<const dsl::ParseError*>(&e)) {
        j["offset"] = pe->offset();
        j["expected"] = pe->expected();
    }
    if (const auto* ee = dynamic_cast<const dsl::EvaluationError*>(&e)) j["subexpression"] = ee->subexpression();
    return j;
}

std::string beta_table_csv(const std::vector<BetaSample>& samples) {
    std::ostringstream os;
    os << "r,beta,a_r,b_r,iterations\n";
    for (const auto& s : samples) {
        os << format_double(s.r) << ',' << format_double(s.beta) << ',' << format_double(s.a_r) << ','
           << format_double(s.b_r) << ',' << s.iterations << '\n';
    }
    return os.str();
}

std::string curvature_csv(const std::vector<CurvatureSample>& samples) {
    std::ostringstream os;
    const long n = samples.empty() ? 0 : samples.front().point.size();
    for (long i = 1; i <= n; ++i) os << 'x' << i << ',';
    os << "r,K1,K_r,margin_e1,margin_e2,bound_holds\n";
    for (const auto& s : samples) {
        for (long i = 0; i < n; ++i) os << format_double(s.point[i]) << ',';
        os << format_double(s.r) << ',' << format_double(s.K1) << ',' << format_double(s.K_r) << ','
           << format_double(s.margin_e1) << ',' << format_double(s.margin_e2) << ','
           << (s.bound_holds() ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace warpgeo
