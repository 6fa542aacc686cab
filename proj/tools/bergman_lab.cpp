// bergman-lab <scenario> --config <path> --out <dir> [--seed <u64>]
// Exit status: 0 all checks pass, 1 a check failed or the scenario stopped on a module error, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bergman/errors.hpp"
#include "bergman/experiment.hpp"

namespace {

void print_scenarios() {
    for (const auto& s : bergman::list_scenarios())
        std::printf("%-16s %s -> %s\n", s.name.c_str(), s.description.c_str(), s.exercises.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bergman kernel experiment runner"};
    std::string scenario, config_path, out_dir;
    std::optional<std::uint64_t> seed;
    bool list = false;
    app.add_flag("--list", list, "List scenarios and exit");
    app.add_option("scenario", scenario, "Scenario name");
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "Output directory for <scenario>.csv and <scenario>.json");
    app.add_option("--seed", seed, "Seed for generated sample points (overrides the config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (list || scenario == "list") {
        print_scenarios();
        return 0;
    }
    if (scenario.empty() || config_path.empty() || out_dir.empty()) {
        std::cerr << "usage: bergman-lab <scenario> --config <path> --out <dir> [--seed <u64>]\n";
        return 2;
    }

    nlohmann::json j;
    try {
        std::ifstream f(config_path);
        if (!f) throw std::runtime_error("cannot open " + config_path);
        j = nlohmann::json::parse(f);
        if (!j.is_object()) throw bergman::ConfigError("", "config must be a JSON object");
        if (j.contains("scenario") && j["scenario"] != scenario)
            throw bergman::ConfigError("/scenario", "does not match the command line scenario '" + scenario + "'");
        j["scenario"] = scenario;
        if (seed) j["seed"] = *seed;
        auto cfg = bergman::ExperimentConfig::from_json(j);
        auto rep = bergman::run(cfg);
        bergman::write_report(rep, out_dir);
        for (const auto& c : rep.checks)
            std::printf("%s %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.empty() ? "" : ": ",
                        c.detail.c_str());
        if (!rep.error.empty()) std::printf("ERROR %s\n", rep.error.c_str());
        return rep.pass() ? 0 : 1;
    } catch (const bergman::ConfigError& e) {
        std::cerr << "config error at " << (e.field.empty() ? "/" : e.field) << ": "
                  << std::string(e.what()).substr(e.field.size() + 2) << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
