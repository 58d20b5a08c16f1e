#pragma once

#include <functional>
#include <string>
#include <vector>

#include "report.hpp"
#include "tensor.hpp"

namespace fbasis {

// F = N * curlyF; F is lower triangular in the canonical multi-index order
// with nonzero diagonal, which makes the inverse a forward substitution.
struct FMatrixBundle {
    TensorOperator curly_f;
    TensorOperator n_matrix;  // diagonal
    TensorOperator f;
    TensorOperator f_inverse;

    TensorOperator curly_f_inverse() const { return f_inverse * n_matrix; }
};

// enumerate the ordered index sequences of the lower-triangular sum: the
// sigma-ordered indices are nondecreasing, strictly increasing across a
// descent of sigma. fn receives the digits by site (1-based values).
void for_each_ordered_sequence(const Permutation& sigma, Dims dims,
                               const std::function<void(const std::vector<int>&)>& fn);

TensorOperator build_curly_f(const WeightTable& table, const std::vector<std::string>& xis, Dims dims);
TensorOperator build_n_matrix(const WeightTable& table, const std::vector<std::string>& xis, Dims dims);
FMatrixBundle build_f_bundle(const WeightTable& table, const std::vector<std::string>& xis, Dims dims);

// inverse of a lower-triangular operator; SingularDiagonal below 1e-12
TensorOperator invert_lower_triangular(const TensorOperator& op);

// X_{sigma(1..L)}: rebuild with the permuted rapidity list, then conjugate
// the site order with permutation operators.
TensorOperator at_permuted_sites(
    const Permutation& sigma, const std::vector<std::string>& xis,
    const std::function<TensorOperator(const std::vector<std::string>&)>& builder);

// residuals of F_{sigma(1..L)} R^{sigma} - F_{1..L} for the given permutations
std::vector<ResidualReport> verify_factorization(const WeightTable& table,
                                                 const std::vector<std::string>& xis, Dims dims,
                                                 const std::vector<Permutation>& sigmas,
                                                 double tol = default_check_tol);

// residual of the diagonal-twist identity N^{-1}_{sigma(1..L)} N_{1..L} = curlyR^{sigma}
ResidualReport n_ratio_identity_residual(const WeightTable& table, const std::vector<std::string>& xis,
                                     Dims dims, const Permutation& sigma,
                                     double tol = default_check_tol);

// residual of curlyR_{1,2..L} curlyR_{2..L,1} - Id (global unitarity)
ResidualReport curly_r_unitarity_residual(const WeightTable& table,
                                          const std::vector<std::string>& xis, Dims dims,
                                          double tol = default_check_tol);

} // namespace fbasis
