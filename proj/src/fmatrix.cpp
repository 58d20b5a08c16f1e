#include "fmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"

namespace fbasis {

void for_each_ordered_sequence(const Permutation& sigma, Dims dims,
                               const std::function<void(const std::vector<int>&)>& fn) {
    const int l = dims.l, n = dims.n;
    std::vector<int> by_slot(l), by_site(l);
    auto rec = [&](auto&& self, int slot, int prev) -> void {
        if (slot == l) {
            for (int m = 0; m < l; ++m)
                by_site[sigma(m + 1) - 1] = by_slot[m];
            fn(by_site);
            return;
        }
        int lo = 1;
        if (slot > 0)
            lo = prev + (sigma(slot) > sigma(slot + 1) ? 1 : 0);
        for (int v = lo; v <= n; ++v) {
            by_slot[slot] = v;
            self(self, slot + 1, v);
        }
    };
    rec(rec, 0, 0);
}

TensorOperator build_curly_f(const WeightTable& table, const std::vector<std::string>& xis, Dims dims) {
    TensorOperator total(dims);
    for (const Permutation& sigma : Permutation::all(dims.l)) {
        TensorOperator rs = r_sigma(sigma, table, xis, dims);
        // row filter by the projector sum of admissible index sequences
        std::vector<char> keep(dims.dim(), 0);
        for_each_ordered_sequence(sigma, dims, [&](const std::vector<int>& digits) {
            int code = 0;
            for (int d : digits)
                code = code * dims.n + (d - 1);
            keep[code] = 1;
        });
        rs.for_each([&](int r, int c, cplx v) {
            if (keep[r])
                total.add_entry(r, c, v);
        });
    }
    total.compress();
    return total;
}

TensorOperator build_n_matrix(const WeightTable& table, const std::vector<std::string>& xis, Dims dims) {
    if (static_cast<int>(xis.size()) != dims.l)
        raise(errc::dimension_mismatch, "rapidity list does not match site count");
    std::vector<cplx> diag(dims.dim(), cplx{1.0});
    // ordered product of pairwise factors N_{ij}, i < j; each contributes
    // sqrt(a_k(xi_i, xi_j)) on the coincidence subspace. Diagonal factors
    // commute, so the nesting of partial products collapses to one pass.
    for (int i = 1; i < dims.l; ++i)
        for (int j = i + 1; j <= dims.l; ++j)
            for (int code = 0; code < dims.dim(); ++code) {
                int di = mi_digit(code, i, dims);
                if (di != mi_digit(code, j, dims))
                    continue;
                cplx ak = table.weight(xis[i - 1], xis[j - 1], WeightKind::a(di));
                if (ak.real() < 0 && std::abs(ak.imag()) <= 1e-12 * std::abs(ak))
                    raise(errc::branch_cut, "a_" + std::to_string(di) + "(" + xis[i - 1] + ", " +
                                                xis[j - 1] + ") lies on the square-root cut");
                diag[code] *= std::sqrt(ak);
            }
    return TensorOperator::diagonal(dims, diag);
}

TensorOperator invert_lower_triangular(const TensorOperator& op) {
    const int d = op.dim();
    std::vector<cplx> diag(d);
    for (int r = 0; r < d; ++r) {
        diag[r] = op.entry(r, r);
        if (std::abs(diag[r]) < 1e-12)
            raise(errc::singular_diagonal,
                  "triangular diagonal entry below 1e-12 at row " + std::to_string(r));
    }
    // forward substitution on op * X = I, column by column
    TensorOperator inv(op.dims());
    std::vector<std::vector<std::pair<int, cplx>>> lower(d);  // strictly lower rows
    op.for_each([&](int r, int c, cplx v) {
        if (c < r)
            lower[r].emplace_back(c, v);
    });
    std::vector<cplx> col(d);
    for (int j = 0; j < d; ++j) {
        std::fill(col.begin(), col.end(), cplx{});
        col[j] = 1.0 / diag[j];
        for (int r = j + 1; r < d; ++r) {
            cplx s{};
            for (const auto& [c, v] : lower[r])
                if (c >= j)
                    s += v * col[c];
            if (s != cplx{})
                col[r] = -s / diag[r];
        }
        for (int r = j; r < d; ++r)
            if (col[r] != cplx{})
                inv.add_entry(r, j, col[r]);
    }
    inv.compress();
    return inv;
}

FMatrixBundle build_f_bundle(const WeightTable& table, const std::vector<std::string>& xis, Dims dims) {
    FMatrixBundle b;
    b.curly_f = build_curly_f(table, xis, dims);
    b.n_matrix = build_n_matrix(table, xis, dims);
    b.f = b.n_matrix * b.curly_f;
    b.f_inverse = invert_lower_triangular(b.f);
    return b;
}

TensorOperator at_permuted_sites(
    const Permutation& sigma, const std::vector<std::string>& xis,
    const std::function<TensorOperator(const std::vector<std::string>&)>& builder) {
    std::vector<std::string> permuted(xis.size());
    for (int m = 1; m <= sigma.size(); ++m)
        permuted[m - 1] = xis[sigma(m) - 1];
    return conjugate_sites(sigma, builder(permuted));
}

std::vector<ResidualReport> verify_factorization(const WeightTable& table,
                                                 const std::vector<std::string>& xis, Dims dims,
                                                 const std::vector<Permutation>& sigmas, double tol) {
    FMatrixBundle base = build_f_bundle(table, xis, dims);
    std::vector<ResidualReport> out(sigmas.size());
    parallel_for(sigmas.size(), [&](std::size_t k) {
        const Permutation& sigma = sigmas[k];
        TensorOperator f_perm = at_permuted_sites(sigma, xis, [&](const auto& perm_xis) {
            return build_n_matrix(table, perm_xis, dims) * build_curly_f(table, perm_xis, dims);
        });
        TensorOperator lhs = f_perm * r_sigma(sigma, table, xis, dims);
        std::string word;
        for (int m = 1; m <= sigma.size(); ++m)
            word += std::to_string(sigma(m));
        out[k] = make_report("factorization:{" + word + "}", xis, max_abs_diff(lhs, base.f),
                             std::max({lhs.max_abs(), base.f.max_abs(), 1e-300}), tol);
    });
    return out;
}

ResidualReport n_ratio_identity_residual(const WeightTable& table, const std::vector<std::string>& xis,
                                     Dims dims, const Permutation& sigma, double tol) {
    TensorOperator n_base = build_n_matrix(table, xis, dims);
    TensorOperator n_perm = at_permuted_sites(
        sigma, xis, [&](const auto& perm_xis) { return build_n_matrix(table, perm_xis, dims); });
    // diagonal inverse
    std::vector<cplx> inv_diag(dims.dim());
    for (int r = 0; r < dims.dim(); ++r) {
        cplx v = n_perm.entry(r, r);
        if (std::abs(v) < 1e-12)
            raise(errc::singular_diagonal, "N-matrix diagonal entry below 1e-12");
        inv_diag[r] = 1.0 / v;
    }
    TensorOperator lhs = TensorOperator::diagonal(dims, inv_diag) * n_base;
    TensorOperator rhs = curly_r_sigma(sigma, table, xis, dims);
    std::string word;
    for (int m = 1; m <= sigma.size(); ++m)
        word += std::to_string(sigma(m));
    return make_report("n_ratio_identity:{" + word + "}", xis, max_abs_diff(lhs, rhs),
                       std::max({lhs.max_abs(), rhs.max_abs(), 1e-300}), tol);
}

ResidualReport curly_r_unitarity_residual(const WeightTable& table,
                                          const std::vector<std::string>& xis, Dims dims,
                                          double tol) {
    // cyclic sigma_c: (2, 3, ..., L, 1) and its inverse at the permuted sites
    const int l = dims.l;
    std::vector<int> cyc(l), cyc_inv(l);
    for (int m = 1; m <= l; ++m) {
        cyc[m - 1] = m % l + 1;
        cyc_inv[m - 1] = (m + l - 2) % l + 1;
    }
    Permutation c = minimal_decomposition(cyc);
    TensorOperator a = curly_r_sigma(c, table, xis, dims);
    TensorOperator b = at_permuted_sites(c, xis, [&](const auto& perm_xis) {
        return curly_r_sigma(minimal_decomposition(cyc_inv), table, perm_xis, dims);
    });
    TensorOperator prod = b * a;
    return make_report("curly_r.global_unitarity", xis,
                       max_abs_diff(prod, TensorOperator::identity(dims)),
                       std::max(prod.max_abs(), 1.0), tol);
}

} // namespace fbasis
