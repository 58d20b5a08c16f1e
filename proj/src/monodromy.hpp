#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fmatrix.hpp"
#include "tensor.hpp"

namespace fbasis {

// Auxiliary-space block decomposition of T_a(mu) = R_{aL} ... R_{a1}. For
// N=3 the named blocks sit at A^(ij) = (i,j), B^(i) = (i,3), C^(i) = (3,i),
// D = (3,3), indices 1-based.
class MonodromyBlocks {
  public:
    MonodromyBlocks(int rank, Dims dims);

    int rank() const { return rank_; }
    Dims dims() const { return dims_; }
    const TensorOperator& at(int i, int j) const;
    TensorOperator& at(int i, int j);

    const TensorOperator& b_op(int i) const { return at(i, rank_); }
    const TensorOperator& c_op(int i) const { return at(rank_, i); }
    const TensorOperator& d_op() const { return at(rank_, rank_); }

    // reassemble <bra_a| T |ket_a> for arbitrary auxiliary vectors
    TensorOperator project(std::span<const cplx> bra, std::span<const cplx> ket) const;

  private:
    int rank_;
    Dims dims_;
    std::vector<TensorOperator> blocks_;
};

MonodromyBlocks build_monodromy(const WeightTable& table, const std::string& mu,
                                const std::vector<std::string>& xis);

// similarity transform into the F-basis: curlyF X curlyF^{-1}
TensorOperator twist(const TensorOperator& x, const FMatrixBundle& bundle);

// theta_i(xi_j, xi_k): a_i of the pair when position j precedes k, else 1
cplx theta(const WeightTable& table, int i, const std::string& xj, const std::string& xk, int pos_j,
           int pos_k);

enum class TwistKind { D, C2, B2, C1, B1 };

// quasilocal closed forms of the twisted monodromy blocks for rank 3
TensorOperator conjectured_twisted(TwistKind kind, const WeightTable& table, const std::string& mu,
                                   const std::vector<std::string>& xis);

// max-norm residual and term scale of
// R_ab T_a T_b - T_b T_a R_ab on the doubled auxiliary space
std::pair<double, double> yang_baxter_algebra_residual(const WeightTable& table,
                                                       const std::string& mu, const std::string& nu,
                                                       const std::vector<std::string>& xis);

} // namespace fbasis
