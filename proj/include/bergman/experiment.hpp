#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/criteria.hpp"
#include "bergman/geometry.hpp"

namespace bergman {

/// Scenario names in listing order.
const std::vector<std::string>& scenario_names();

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::string exercises;  // result the scenario checks
};

std::vector<ScenarioInfo> list_scenarios();

/// All knobs of every scenario; unused ones keep their defaults and are still echoed.
struct ExperimentConfig {
    std::string scenario;
    PlanarDomain domain = PlanarDomain::unit_disc();
    double alpha = 0.0;  // weight exponent (planar) or Hartogs exponent
    int N = 12;
    int M = 8;
    int J = 20;
    int depth = 9;
    double k = 1.0;
    std::vector<double> schedule;  // t values, r_k values or eta schedule, by scenario
    std::vector<cplx> probes;      // planar probe points or the boundary target
    std::vector<std::array<cplx, 2>> points;  // Hartogs points (z, w) or Levi samples (x, y)
    cplx direction = 1.0;
    cplx w = 0.0;  // fiber coordinate held fixed along Hartogs paths
    int k_lo = 3;
    int k_hi = 6;
    int samples = 16;
    int enrich_lo = 0;  // approach poles 2^-i, i = enrich_lo..enrich_hi; none when enrich_hi < enrich_lo
    int enrich_hi = -1;
    int enrich_order = 2;
    int target_hole = 0;
    EtaProfile eta;
    int dyadic_steps = 48;
    int j_lo = 18;
    int j_hi = 24;
    std::vector<double> ks{1.0, 4.0};
    int random_samples = 0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    /// Throws ConfigError naming the JSON pointer of the offending field.
    static ExperimentConfig from_json(const nlohmann::json& j);
    bool operator==(const ExperimentConfig&) const;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    nlohmann::json config;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json results = nlohmann::json::object();
    std::vector<CheckResult> checks;
    std::string error;  // module error that stopped the scenario early

    bool pass() const;
    std::string csv() const;
    nlohmann::json summary() const;
};

/// Dispatches to the scenario; module errors are recorded in rows or in `error`.
ExperimentReport run(const ExperimentConfig& config);

/// Writes <dir>/<scenario>.csv and <dir>/<scenario>.json.
void write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace bergman
