#pragma once

#include <string>
#include <vector>

#include "report.hpp"
#include "weights.hpp"

namespace fbasis {

// Unitarity at weight level: a_i pair products (eq7), b/c closure (eq8),
// b/c antisymmetry (eq9). N + 2*N(N-1) reports.
std::vector<ResidualReport> check_unitarity_weights(const WeightTable& table, const std::string& x,
                                                    const std::string& y,
                                                    double tol = default_check_tol);

// The twelve Yang-Baxter weight relations (eq10..eq21) over an ordered triple.
std::vector<ResidualReport> check_yb_weights(const WeightTable& table, const std::string& x,
                                             const std::string& y, const std::string& z,
                                             double tol = default_check_tol);

// Matrix-level checks: Yang-Baxter on three sites, unitarity on every ordered
// pair, azimuthal symmetry commutators, and the Yang-Baxter algebra of the
// monodromy matrix when two auxiliaries are available.
std::vector<ResidualReport> check_matrix_relations(const WeightTable& table,
                                                   const RapiditySet& rapidities,
                                                   double tol = default_check_tol);

// Constancy of the ten algebraic invariants across the first rapidity
// argument (second argument fixed), plus the branch closures.
std::vector<ResidualReport> check_algebraic_invariants(const WeightTable& table,
                                                        double tol = default_check_tol);

} // namespace fbasis
