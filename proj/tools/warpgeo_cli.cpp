#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "warpgeo/serialize.hpp"
#include "warpgeo/task.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

void write_error(const std::optional<std::filesystem::path>& dir, const nlohmann::json& payload) {
    if (!dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    std::ofstream out(*dir / "error.json");
    if (out) out << payload.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Riemannian geodesics of warped products g1 - k g2"};
    std::string config_path;
    std::string out_dir;
    int steps = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "Task configuration (JSON, comments allowed)")->required();
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--steps", steps, "Integrator steps (overrides the config)");
    app.add_flag("--quiet", quiet, "Print nothing on success");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    std::optional<std::filesystem::path> dir;
    if (!out_dir.empty()) dir = out_dir;
    try {
        warpgeo::TaskConfig cfg = warpgeo::load_task_config(config_path);
        if (steps != 0) {
            cfg.integrator.steps = steps;
            cfg.integrator.validate();
        }
        if (!dir) dir = cfg.output_dir;
        const warpgeo::TaskResult result = warpgeo::run_task(cfg);
        warpgeo::write_artifacts(result, *dir);
        if (!quiet) std::cout << result.summary << "artifacts written to " << dir->string() << '\n';
        return kOk;
    } catch (const warpgeo::Error& e) {
        const nlohmann::json payload = warpgeo::to_json(e);
        write_error(dir, payload);
        std::cerr << "error (" << e.kind() << "): " << e.what() << '\n' << payload.dump() << '\n';
        return e.is_validation() ? kValidation : kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error (io): " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
}
