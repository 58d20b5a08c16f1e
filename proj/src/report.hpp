#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fbasis {

// One residual per (relation, index tuple, rapidity arguments). The relative
// residual divides by the largest individual term magnitude so cancellations
// cannot mask a violation.
struct ResidualReport {
    std::string relation;                 // stable id, e.g. "yb.eq13:{3,1}"
    std::vector<std::string> rapidities;  // ordered arguments
    double absolute = 0;
    double relative = 0;
    double tolerance = 0;
    bool pass = false;
};

inline constexpr double default_check_tol = 1e-9;

ResidualReport make_report(std::string relation, std::vector<std::string> rapidities,
                           double absolute, double term_scale, double tol);

bool all_pass(const std::vector<ResidualReport>& reports);
double worst_relative(const std::vector<ResidualReport>& reports);

nlohmann::json reports_to_json(const std::vector<ResidualReport>& reports);
std::string reports_to_csv(const std::vector<ResidualReport>& reports);

} // namespace fbasis
