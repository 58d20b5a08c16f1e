#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

#include <nlohmann/json_fwd.hpp>

namespace fbasis {

using cplx = std::complex<double>;

// Genericity screen applied to every denominator of the weight parameterization.
inline constexpr double eps_singular = 1e-6;

// Weight classes of the U(1)^(N-1) vertex model: a_i (i=j=state), b_ij and
// c_ij with i != j. Kind strings use 1-based single-digit indices ("a1",
// "b12", "c32"), which restricts documents to rank <= 9.
struct WeightKind {
    char cls;  // 'a', 'b' or 'c'
    int i;
    int j;  // ignored for class 'a'

    static WeightKind a(int i) { return {'a', i, i}; }
    static WeightKind b(int i, int j) { return {'b', i, j}; }
    static WeightKind c(int i, int j) { return {'c', i, j}; }

    static WeightKind parse(const std::string& s);
    std::string str() const;
    bool valid_for_rank(int n) const;

    // dense index in [0, n(2n-1)): a_1..a_n, then b_ij, then c_ij row-major
    int index(int n) const;
    static int count(int n) { return n * (2 * n - 1); }
    static std::vector<WeightKind> all(int n);
};

// Site labels for inhomogeneities and auxiliary rapidities. Labels are the
// stable identity; complex values are optional and only required by
// generators that evaluate functions of the spectral parameter.
struct RapiditySet {
    std::vector<std::string> inhomogeneities;
    std::vector<std::string> auxiliaries;
    std::map<std::string, cplx> values;

    std::vector<std::string> all() const;
};

class WeightTable {
  public:
    WeightTable() = default;
    WeightTable(int rank, std::vector<std::string> labels);

    int rank() const { return rank_; }
    const std::vector<std::string>& labels() const { return labels_; }
    int label_index(const std::string& label) const;  // -1 if absent
    bool has_label(const std::string& label) const { return label_index(label) >= 0; }

    cplx value_of(const std::string& label) const;
    void set_value(const std::string& label, cplx v);

    void set(const std::string& x, const std::string& y, const WeightKind& k, cplx v);
    cplx weight(const std::string& x, const std::string& y, const WeightKind& k) const;
    cplx weight(int ix, int iy, const WeightKind& k) const;

    // true once every kind is set for the ordered pair
    bool pair_complete(int ix, int iy) const;
    void require_complete() const;  // MissingEntry naming the first gap

    // restriction to the states {1..m}: an m-state table over the same labels
    WeightTable restrict_rank(int m) const;

  private:
    int rank_ = 0;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
    std::vector<cplx> values_;
    std::vector<cplx> entries_;          // [pair][kind]
    std::vector<std::uint8_t> present_;  // same shape
    int pair_id(int ix, int iy) const { return ix * static_cast<int>(labels_.size()) + iy; }
};

// Free constants and per-rapidity free variables of the N=3 hypersurface
// parameterization. delta_cap1/2 are the capital constants of the cubic,
// delta1/delta2 the small ones.
struct DelPezzoParams {
    cplx delta_cap1, delta_cap2;
    cplx delta1, delta2;
    struct Site {
        cplx a, b_bar, c, c_bar, h1, h2;
    };
    std::map<std::string, Site> sites;
};

DelPezzoParams sample_del_pezzo_params(std::uint64_t seed, const std::vector<std::string>& labels);

// N=3 table over all ordered pairs of {inhomogeneities + auxiliaries}.
// Raises SingularParameter when a denominator or the linear-in-b coefficient
// of the hypersurface falls below eps_singular; callers resample.
WeightTable build_del_pezzo(const DelPezzoParams& params, const RapiditySet& rapidities);

// Perk-Schultz specialization; every label must carry a value.
WeightTable build_perk_schultz(cplx q, const RapiditySet& rapidities);

// N=2 six-vertex table a1=a2=1, b = sin(u)/sin(u+eta), c = sin(eta)/sin(u+eta)
// with u the rapidity difference. Used as the rank-2 regression fixture.
WeightTable build_six_vertex(cplx eta, const RapiditySet& rapidities);

// N=2 free-fermion style table a1=a2=1, b12=b21=sinh(u), c12=c21=cosh(u).
WeightTable build_free_fermion(const RapiditySet& rapidities);

// Document import/export. import_custom performs no relation validation.
WeightTable import_custom(const nlohmann::json& doc);
nlohmann::json export_table(const WeightTable& table);

} // namespace fbasis
