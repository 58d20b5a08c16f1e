#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "report.hpp"

namespace fbasis {

// Configuration of one verification run. The seed fully determines every
// generated table; two runs with equal config produce identical reports.
struct SuiteConfig {
    std::string suite = "all";       // weights-check | factorization | twist-compare | dwpf-agree | all
    std::string model = "del_pezzo"; // del_pezzo | perk_schultz | custom
    std::uint64_t seed = 0;
    int lmax = 4;
    double tol = 0;      // 0 keeps each check's default
    int instances = 100; // weight relation instances
    int dwpf_seeds = 10;
    std::string format = "json"; // json | csv
    nlohmann::json custom_table; // inline table document when model == custom

    static SuiteConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct SuiteResult {
    nlohmann::json report;
    int exit_code = 0; // 0 all pass, 1 check failures
};

SuiteResult run_suite(const SuiteConfig& config);

std::string report_to_csv(const nlohmann::json& report);

// DWPF instance document -> result document (per-route values and residuals)
nlohmann::json compute_dwpf(const nlohmann::json& instance_doc);

} // namespace fbasis
