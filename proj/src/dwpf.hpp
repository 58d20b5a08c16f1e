#pragma once

#include <string>
#include <vector>

#include "monodromy.hpp"

namespace fbasis {

enum class DwpfKind { C2, B2, C1, B1, MixedC, MixedB };

DwpfKind dwpf_kind_parse(const std::string& s);
std::string dwpf_kind_str(DwpfKind k);
bool dwpf_kind_is_mixed(DwpfKind k);

// A fully specified partition-function problem. aux holds nu_1..nu_L for C
// kinds and mu_1..mu_L for B kinds; q lists the charge positions of the
// mixed boundary (1-based, strictly increasing, M entries).
struct DwpfInstance {
    DwpfKind kind = DwpfKind::C2;
    int l = 0;
    int m = 0;  // mixed kinds only
    std::vector<std::string> aux;
    std::vector<std::string> xis;
    std::vector<int> q;

    void validate() const;
};

// expectation value by direct contraction of untwisted monodromy blocks
cplx dwpf_direct(const DwpfInstance& inst, const WeightTable& table);

// L-term recursion peeling one auxiliary and one inhomogeneity per step
cplx dwpf_recurrence(const DwpfInstance& inst, const WeightTable& table);

// permutation sum over S_L (capped at L = 7); sorted-magnitude compensated
// summation keeps results deterministic
cplx dwpf_exact(const DwpfInstance& inst, const WeightTable& table);

// single matrix element <bra| curlyF |ket> (or curlyF^{-1}); patterns give
// the local state per site
cplx f_sandwich(const FMatrixBundle& bundle, const std::vector<int>& bra,
                const std::vector<int>& ket, bool use_inverse);

// mixed DWPF as a sum over charge positions of F-matrix elements, weight
// prefactors and the two single-type partition functions
cplx mixed_dwpf_formula(const DwpfInstance& inst, const WeightTable& table,
                        const FMatrixBundle& bundle);

enum class CommuteKind { CC, BB };

// operator residual of the two-field exchange relation on the quantum space
ResidualReport commute_check(CommuteKind kind, const WeightTable& table, const std::string& mu,
                             const std::string& nu, const std::vector<std::string>& xis,
                             double tol = default_check_tol);

// deterministic sum: sort by magnitude, then Kahan-accumulate
cplx compensated_sum(std::vector<cplx> terms);

} // namespace fbasis
