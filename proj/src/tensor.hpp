#pragma once

#include <span>
#include <string>
#include <vector>

#include "weights.hpp"

namespace fbasis {

// Local dimension n at each of l sites; operators act on the n^l product space.
struct Dims {
    int n = 0;
    int l = 0;

    int dim() const {
        int d = 1;
        for (int k = 0; k < l; ++k)
            d *= n;
        return d;
    }
    bool operator==(const Dims&) const = default;
};

// Multi-index helpers. Site 1 is the most significant digit of the
// linearized index; digits run over 1..n.
int mi_digit(int code, int site, Dims dims);
int mi_with_digit(int code, int site, int digit, Dims dims);
int mi_swap(int code, int site_a, int site_b, Dims dims);
std::string mi_str(int code, Dims dims);

// Immutable sparse complex operator with a dense fallback once fill exceeds
// 25%. Entries below 1e-14 of the largest magnitude are dropped.
class TensorOperator {
  public:
    TensorOperator() = default;
    explicit TensorOperator(Dims dims);  // zero operator

    static TensorOperator identity(Dims dims);
    static TensorOperator diagonal(Dims dims, std::span<const cplx> d);

    Dims dims() const { return dims_; }
    int dim() const { return dims_.dim(); }
    bool is_dense() const { return dense_; }
    std::size_t nnz() const;
    double max_abs() const;

    cplx entry(int row, int col) const;
    void set_entry(int row, int col, cplx v);  // builder use; keeps row order
    void add_entry(int row, int col, cplx v);

    // finalize storage: drop tiny entries, promote to dense above 25% fill
    void compress();

    TensorOperator operator*(const TensorOperator& rhs) const;
    TensorOperator operator+(const TensorOperator& rhs) const;
    TensorOperator operator-(const TensorOperator& rhs) const;
    TensorOperator scaled(cplx factor) const;
    TensorOperator adjoint() const;

    std::vector<cplx> apply(std::span<const cplx> vec) const;

    // row/col visiting (used by exports and entry scans)
    template <class Fn>  // Fn(int row, int col, cplx v)
    void for_each(Fn&& fn) const {
        if (dense_) {
            const int d = dim();
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    if (data_[static_cast<std::size_t>(r) * d + c] != cplx{})
                        fn(r, c, data_[static_cast<std::size_t>(r) * d + c]);
        } else {
            for (int r = 0; r < static_cast<int>(rows_.size()); ++r)
                for (const auto& [c, v] : rows_[r])
                    fn(r, c, v);
        }
    }

    bool approx_equal(const TensorOperator& rhs, double rel_tol = 1e-9) const;

  private:
    Dims dims_{};
    bool dense_ = false;
    std::vector<std::vector<std::pair<int, cplx>>> rows_;  // sorted by column
    std::vector<cplx> data_;                               // row-major when dense
    void promote_to_dense();
    friend double max_abs_diff(const TensorOperator&, const TensorOperator&);
};

double max_abs_diff(const TensorOperator& a, const TensorOperator& b);
// max-norm difference relative to the larger of the two operator norms
double rel_max_diff(const TensorOperator& a, const TensorOperator& b);

// e^{(alpha beta)} at one site, identity elsewhere
TensorOperator weyl(int alpha, int beta, int site, Dims dims);

// total azimuthal generator sum_j S^{(z,i)}_j = sum_j (e^{(ii)}_j - e^{((i+1)(i+1))}_j)
TensorOperator total_sz(int i, Dims dims);

// R(x, y) on the ordered site pair (j, k); site j carries the first tensor slot
TensorOperator embed_r(const WeightTable& table, int site_j, int site_k, const std::string& x,
                       const std::string& y, Dims dims);

// diagonal twisted counterpart: a_i(x, y) on the coincidence subspace of (j, k)
TensorOperator embed_curly_r(const WeightTable& table, int site_j, int site_k, const std::string& x,
                             const std::string& y, Dims dims);

// Element of S_L as images sigma(1..L) plus a canonical reduced word into
// adjacent transpositions (bubble-sort order, one factor per inversion).
struct Permutation {
    std::vector<int> images;            // 1-based, images[m-1] = sigma(m)
    std::vector<int> adjacent_factors;  // positions alpha_1..alpha_p

    int size() const { return static_cast<int>(images.size()); }
    int operator()(int m) const { return images[m - 1]; }
    bool is_identity() const;
    Permutation inverse() const;
    // (sigma o tau)(m) = sigma(tau(m))
    static Permutation compose(const Permutation& sigma, const Permutation& tau);
    static std::vector<Permutation> all(int l);
};

Permutation minimal_decomposition(const std::vector<int>& images);

// P^{sigma}: product of adjacent permutators over the reduced word
TensorOperator permutation_op(const Permutation& sigma, Dims dims);

// X at permuted sites: P^{sigma} X P^{sigma^{-1}}
TensorOperator conjugate_sites(const Permutation& sigma, const TensorOperator& x);

// R^{sigma}: permutator times the product of adjacent-transposition factors,
// each evaluated at the rapidities occupying its positions at that step.
TensorOperator r_sigma(const Permutation& sigma, const WeightTable& table,
                       const std::vector<std::string>& xis, Dims dims);
TensorOperator curly_r_sigma(const Permutation& sigma, const WeightTable& table,
                             const std::vector<std::string>& xis, Dims dims);

// operator snapshot document: dims plus lexicographically sorted entries
nlohmann::json operator_snapshot(const TensorOperator& op);

} // namespace fbasis
