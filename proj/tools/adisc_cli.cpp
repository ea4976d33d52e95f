// Command-line runner for the analytic-disc scenarios. One JSON config in,
// results.json plus CSV artifacts out; exit 0 iff every check passes, 1 on a
// failed check, 2 on config or IO errors. Outputs are written atomically
// (temp file then rename) so interrupted runs leave no partial artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "adisc/scenarios.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adisc: analytic discs attached to CR graphs - Bishop solves, partial indices, "
                 "index-raising twists, and nearby-disc family checks"};
    app.get_formatter()->column_width(28);

    std::string scenario;
    std::string config_path;
    std::string out_dir = ".";
    long grid_size = 0;
    double tol = 0.0;

    app.add_option("scenario", scenario,
                   "one of: bishop-solve, reference-disc, r1-indices, twist-indices, "
                   "globevnik-family, step4-verify, full-pipeline")
        ->required();
    app.add_option("config", config_path, "path to the JSON config")->required();
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--grid-size", grid_size, "override config grid_size");
    app.add_option("--tol", tol, "override config tol");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read config " << config_path << "\n";
            return 2;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();

        // Flag overrides are spliced into the config before validation.
        std::string config_text = buffer.str();
        if (grid_size != 0 || tol != 0.0) {
            nlohmann::json cfg = nlohmann::json::parse(config_text);
            if (grid_size != 0) cfg["grid_size"] = grid_size;
            if (tol != 0.0) cfg["tol"] = tol;
            config_text = cfg.dump();
        }

        const adisc::scenarios::ScenarioOutcome outcome =
            adisc::scenarios::run_scenario(scenario, config_text);

        try {
            fs::create_directories(out_dir);
            write_atomic(fs::path(out_dir) / "results.json", outcome.results_json);
            for (const auto& [name, content] : outcome.files)
                write_atomic(fs::path(out_dir) / name, content);
        } catch (const std::exception& e) {
            std::cerr << "io error: " << e.what() << "\n";
            return 2;
        }

        std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << scenario << "\n";
        return outcome.pass ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
