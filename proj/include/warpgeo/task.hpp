#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "warpgeo/connect.hpp"

namespace warpgeo {

struct ChartSpec {
    std::string name;  // euclidean | poincare-half-space | poincare-ball | sphere | weighted-line
    int dim = 1;
    double radius = 1.0;
    std::string f;  // weighted-line only
};

MetricChart make_chart(const ChartSpec& spec);

struct WarpSpec {
    std::string k;
    double k0 = 1.0;
    std::optional<double> K0;
};

struct IntegrateParams {
    Vec x0, y0, X, Y;
    double span = 1.0;
};

// Either r with the base velocity X of mu and a fiber direction Y, or the
// initial tangents (X~, Y~) of the g-geodesic, with r classified from them.
struct RiemannizeParams {
    Vec x0, y0, X, Y;
    std::optional<double> r;
};

struct ConnectParams {
    Vec x0, y0, x1, y1;
    ConnectOptions options;
};

struct PartialConnectParams {
    double r = 0.0;
    Vec x0, X, y0, Y;
    double alpha = 0.0;
    std::vector<double> theta_t;
};

struct FlrwParams {
    double t0 = 0.0, t1 = 0.0;
    Vec y0, y1;
    std::optional<std::string> f;
    ConnectOptions options;
};

struct CurvatureScanParams {
    std::vector<Vec> points;
    std::vector<double> r_values;
    int planes = 1;
};

struct BetaScanParams {
    Vec x0, x1;
    std::vector<double> r_values;
};

using TaskParams = std::variant<IntegrateParams, RiemannizeParams, ConnectParams, PartialConnectParams,
                                FlrwParams, CurvatureScanParams, BetaScanParams>;

struct TaskConfig {
    std::string task;
    std::optional<ChartSpec> chart1;  // absent for flrw
    std::optional<ChartSpec> chart2;  // absent for curvature-scan and beta-scan
    WarpSpec warp;
    IntegratorConfig integrator;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    TaskParams params;
};

// Parses JSON (comments allowed) and validates that every field the task
// needs is present and consistent. Throws ConfigError, ParseError,
// InputError or ParameterError.
TaskConfig parse_task_config(std::string_view text);
TaskConfig load_task_config(const std::filesystem::path& path);

struct TaskResult {
    nlohmann::json report;
    std::map<std::string, std::string> files;  // name -> contents
    std::string summary;
};

TaskResult run_task(const TaskConfig& cfg);

// Writes report.json, summary.txt and every file of the result into dir.
void write_artifacts(const TaskResult& result, const std::filesystem::path& dir);

}  // namespace warpgeo
