#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "warpgeo/connect.hpp"

namespace warpgeo {

// Non-finite doubles serialize as null.
nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const RiemannianGeodesic& g);  // scalars and residuals, no samples
nlohmann::json to_json(const BetaSample& s);
nlohmann::json to_json(const SandwichBounds& s);
nlohmann::json to_json(const ShootingReport& rep);
nlohmann::json to_json(const PartialConnection& pc);
nlohmann::json to_json(const ThetaValue& th);
nlohmann::json to_json(const CurvatureSample& s);
nlohmann::json to_json(const Error& e);

// r, beta, a_r, b_r, iterations
std::string beta_table_csv(const std::vector<BetaSample>& samples);
// x1.., r, K1, K_r, margin_e1, margin_e2, bound_holds
std::string curvature_csv(const std::vector<CurvatureSample>& samples);

}  // namespace warpgeo
