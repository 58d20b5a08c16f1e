#include "monodromy.hpp"

#include <algorithm>
#include <cmath>

namespace fbasis {

MonodromyBlocks::MonodromyBlocks(int rank, Dims dims) : rank_(rank), dims_(dims) {
    blocks_.assign(static_cast<std::size_t>(rank) * rank, TensorOperator(dims));
}

const TensorOperator& MonodromyBlocks::at(int i, int j) const {
    if (i < 1 || i > rank_ || j < 1 || j > rank_)
        raise(errc::index_out_of_range, "monodromy block index out of range");
    return blocks_[static_cast<std::size_t>(i - 1) * rank_ + (j - 1)];
}

TensorOperator& MonodromyBlocks::at(int i, int j) {
    if (i < 1 || i > rank_ || j < 1 || j > rank_)
        raise(errc::index_out_of_range, "monodromy block index out of range");
    return blocks_[static_cast<std::size_t>(i - 1) * rank_ + (j - 1)];
}

TensorOperator MonodromyBlocks::project(std::span<const cplx> bra, std::span<const cplx> ket) const {
    if (static_cast<int>(bra.size()) != rank_ || static_cast<int>(ket.size()) != rank_)
        raise(errc::dimension_mismatch, "auxiliary vector length does not match rank");
    TensorOperator out(dims_);
    for (int i = 1; i <= rank_; ++i)
        for (int j = 1; j <= rank_; ++j) {
            cplx w = std::conj(bra[i - 1]) * ket[j - 1];
            if (w != cplx{})
                out = out + at(i, j).scaled(w);
        }
    return out;
}

MonodromyBlocks build_monodromy(const WeightTable& table, const std::string& mu,
                                const std::vector<std::string>& xis) {
    const int n = table.rank();
    Dims dims{n, static_cast<int>(xis.size())};
    MonodromyBlocks t(n, dims);
    for (int i = 1; i <= n; ++i)
        t.at(i, i) = TensorOperator::identity(dims);
    // T <- R_{ak} T for k = 1..L ends at R_{aL} ... R_{a1}
    for (int k = 1; k <= dims.l; ++k) {
        // R_{ak}(mu, xi_k) auxiliary blocks: diagonal (i,i) carries
        // a_i e^{(ii)}_k + sum_{t != i} b_it e^{(tt)}_k, off-diagonal (i,j)
        // carries c_ij e^{(ji)}_k
        std::vector<TensorOperator> rblk(static_cast<std::size_t>(n) * n, TensorOperator(dims));
        for (int i = 1; i <= n; ++i) {
            TensorOperator diag(dims);
            for (int col = 0; col < dims.dim(); ++col) {
                int d = mi_digit(col, k, dims);
                diag.set_entry(col, col,
                               d == i ? table.weight(mu, xis[k - 1], WeightKind::a(i))
                                      : table.weight(mu, xis[k - 1], WeightKind::b(i, d)));
            }
            rblk[static_cast<std::size_t>(i - 1) * n + (i - 1)] = std::move(diag);
            for (int j = 1; j <= n; ++j) {
                if (i == j)
                    continue;
                cplx c = table.weight(mu, xis[k - 1], WeightKind::c(i, j));
                rblk[static_cast<std::size_t>(i - 1) * n + (j - 1)] = weyl(j, i, k, dims).scaled(c);
            }
        }
        MonodromyBlocks next(n, dims);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                TensorOperator acc(dims);
                for (int m = 1; m <= n; ++m) {
                    const TensorOperator& left = rblk[static_cast<std::size_t>(i - 1) * n + (m - 1)];
                    if (left.nnz() == 0 || t.at(m, j).nnz() == 0)
                        continue;
                    acc = acc + left * t.at(m, j);
                }
                next.at(i, j) = std::move(acc);
            }
        t = std::move(next);
    }
    return t;
}

TensorOperator twist(const TensorOperator& x, const FMatrixBundle& bundle) {
    return bundle.curly_f * x * bundle.curly_f_inverse();
}

cplx theta(const WeightTable& table, int i, const std::string& xj, const std::string& xk, int pos_j,
           int pos_k) {
    return pos_j < pos_k ? table.weight(xj, xk, WeightKind::a(i)) : cplx{1.0};
}

namespace {

cplx guarded_b(const WeightTable& t, int i, int j, const std::string& x, const std::string& y) {
    cplx v = t.weight(x, y, WeightKind::b(i, j));
    if (std::abs(v) < eps_singular)
        raise(errc::division_near_zero, "b" + std::to_string(i) + std::to_string(j) + "(" + x +
                                            ", " + y + ") below singularity threshold");
    return v;
}

// diagonal dressing: vals_by_site[s] is a length-n vector or empty (identity)
TensorOperator dressed_insertion(Dims dims, const std::vector<std::vector<cplx>>& vals_by_site,
                                 const std::vector<std::pair<int, std::pair<int, int>>>& insertions,
                                 cplx coeff) {
    TensorOperator op(dims);
    for (int col = 0; col < dims.dim(); ++col) {
        cplx v = coeff;
        bool ok = true;
        int row = col;
        for (const auto& [site, ab] : insertions) {
            if (mi_digit(col, site, dims) != ab.second) {
                ok = false;
                break;
            }
            row = mi_with_digit(row, site, ab.first, dims);
        }
        if (!ok)
            continue;
        for (int s = 1; s <= dims.l && v != cplx{}; ++s) {
            if (vals_by_site[s - 1].empty())
                continue;
            v *= vals_by_site[s - 1][mi_digit(col, s, dims) - 1];
        }
        if (v != cplx{})
            op.add_entry(row, col, v);
    }
    return op;
}

} // namespace

TensorOperator conjectured_twisted(TwistKind kind, const WeightTable& table, const std::string& mu,
                                   const std::vector<std::string>& xis) {
    if (table.rank() != 3)
        raise(errc::rank_mismatch, "twisted closed forms apply to rank 3");
    Dims dims{3, static_cast<int>(xis.size())};
    const int l_count = dims.l;
    auto w = [&](const std::string& x, const std::string& y, const char* k) {
        return table.weight(x, y, WeightKind::parse(k));
    };
    if (kind == TwistKind::D) {
        std::vector<std::vector<cplx>> vals(l_count);
        for (int i = 1; i <= l_count; ++i)
            vals[i - 1] = {w(mu, xis[i - 1], "b31"), w(mu, xis[i - 1], "b32"), w(mu, xis[i - 1], "a3")};
        return dressed_insertion(dims, vals, {}, 1.0);
    }
    TensorOperator total(dims);
    if (kind == TwistKind::C2 || kind == TwistKind::B2) {
        for (int l = 1; l <= l_count; ++l) {
            const std::string& xl = xis[l - 1];
            std::vector<std::vector<cplx>> vals(l_count);
            for (int i = 1; i <= l_count; ++i) {
                if (i == l)
                    continue;
                const std::string& xi = xis[i - 1];
                if (kind == TwistKind::C2)
                    vals[i - 1] = {w(mu, xi, "b21"),
                                   w(mu, xi, "b32") / (guarded_b(table, 3, 2, xl, xi) *
                                                       theta(table, 2, xi, xl, i, l)),
                                   w(mu, xi, "a3") * theta(table, 3, xi, xl, i, l)};
                else
                    vals[i - 1] = {w(mu, xi, "b31"),
                                   w(mu, xi, "b32") * theta(table, 2, xl, xi, l, i),
                                   w(mu, xi, "a3") / (guarded_b(table, 3, 2, xi, xl) *
                                                      theta(table, 3, xl, xi, l, i))};
            }
            cplx coeff = kind == TwistKind::C2 ? w(mu, xl, "c32") : w(mu, xl, "c23");
            auto ins = kind == TwistKind::C2 ? std::pair(2, 3) : std::pair(3, 2);
            total = total + dressed_insertion(dims, vals, {{l, ins}}, coeff);
        }
        total.compress();
        return total;
    }
    // C1 / B1: single sum plus ordered double sum
    for (int l = 1; l <= l_count; ++l) {
        const std::string& xl = xis[l - 1];
        std::vector<std::vector<cplx>> vals(l_count);
        for (int i = 1; i <= l_count; ++i) {
            if (i == l)
                continue;
            const std::string& xi = xis[i - 1];
            if (kind == TwistKind::C1)
                vals[i - 1] = {w(mu, xi, "b21") / (guarded_b(table, 2, 1, xl, xi) *
                                                   theta(table, 1, xi, xl, i, l)),
                               w(mu, xi, "b32") / guarded_b(table, 3, 2, xl, xi),
                               w(mu, xi, "a3") * theta(table, 3, xi, xl, i, l)};
            else
                vals[i - 1] = {w(mu, xi, "b31") * theta(table, 1, xl, xi, l, i),
                               w(mu, xi, "b32") / guarded_b(table, 2, 1, xi, xl),
                               w(mu, xi, "a3") / (guarded_b(table, 3, 1, xi, xl) *
                                                  theta(table, 3, xl, xi, l, i))};
        }
        cplx coeff = kind == TwistKind::C1 ? w(mu, xl, "c31") : w(mu, xl, "c13");
        auto ins = kind == TwistKind::C1 ? std::pair(1, 3) : std::pair(3, 1);
        total = total + dressed_insertion(dims, vals, {{l, ins}}, coeff);
    }
    for (int l1 = 1; l1 <= l_count; ++l1)
        for (int l2 = 1; l2 <= l_count; ++l2) {
            if (l1 == l2)
                continue;
            const std::string &x1 = xis[l1 - 1], &x2 = xis[l2 - 1];
            std::vector<std::vector<cplx>> vals(l_count);
            for (int i = 1; i <= l_count; ++i) {
                if (i == l1 || i == l2)
                    continue;
                const std::string& xi = xis[i - 1];
                if (kind == TwistKind::C1)
                    vals[i - 1] = {w(mu, xi, "b21") / (guarded_b(table, 2, 1, x2, xi) *
                                                       theta(table, 1, xi, x2, i, l2)),
                                   w(mu, xi, "b32") * theta(table, 2, xi, x2, i, l2) /
                                       (guarded_b(table, 3, 2, x1, xi) *
                                        theta(table, 2, xi, x1, i, l1)),
                                   w(mu, xi, "a3") * theta(table, 3, xi, x1, i, l1)};
                else
                    vals[i - 1] = {w(mu, xi, "b31") * theta(table, 1, x2, xi, l2, i),
                                   w(mu, xi, "b32") * theta(table, 2, x1, xi, l1, i) /
                                       (guarded_b(table, 2, 1, xi, x2) *
                                        theta(table, 2, x2, xi, l2, i)),
                                   w(mu, xi, "a3") / (guarded_b(table, 3, 1, xi, x1) *
                                                      theta(table, 3, x1, xi, l1, i))};
            }
            cplx coeff;
            std::vector<std::pair<int, std::pair<int, int>>> ins;
            if (kind == TwistKind::C1) {
                coeff = w(mu, x1, "c31") * w(mu, x2, "b32") * w(x1, x2, "c21") /
                        guarded_b(table, 3, 2, x1, x2);
                ins = {{l1, {2, 3}}, {l2, {1, 2}}};
            } else {
                coeff = w(mu, x1, "c13") * w(mu, x2, "b32") * w(x1, x2, "c12") /
                        guarded_b(table, 2, 1, x1, x2);
                ins = {{l1, {3, 2}}, {l2, {2, 1}}};
            }
            total = total + dressed_insertion(dims, vals, ins, coeff);
        }
    total.compress();
    return total;
}

std::pair<double, double> yang_baxter_algebra_residual(const WeightTable& table,
                                                       const std::string& mu, const std::string& nu,
                                                       const std::vector<std::string>& xis) {
    const int n = table.rank();
    MonodromyBlocks ta = build_monodromy(table, mu, xis);
    MonodromyBlocks tb = build_monodromy(table, nu, xis);
    Dims dims = ta.dims();
    // scalar R_ab(mu, nu) on the doubled auxiliary space, row (ra, rb)
    auto rab = [&](int ra, int rb, int ca, int cb) -> cplx {
        if (ra == rb)
            return (ca == ra && cb == ra) ? table.weight(mu, nu, WeightKind::a(ra)) : cplx{};
        if (ca == ra && cb == rb)
            return table.weight(mu, nu, WeightKind::b(ra, rb));
        if (ca == rb && cb == ra)
            return table.weight(mu, nu, WeightKind::c(ra, rb));
        return cplx{};
    };
    double worst = 0, scale = 1e-300;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = 1; l <= n; ++l) {
                    // LHS block = sum_{p,q} R[(i,j),(p,q)] Ta(p,k) Tb(q,l)
                    // RHS block = sum_{p,q} Tb(j,q) Ta(i,p) R[(p,q),(k,l)]
                    TensorOperator lhs(dims), rhs(dims);
                    for (int p = 1; p <= n; ++p)
                        for (int q = 1; q <= n; ++q) {
                            cplx rl = rab(i, j, p, q);
                            if (rl != cplx{})
                                lhs = lhs + (ta.at(p, k) * tb.at(q, l)).scaled(rl);
                            cplx rr = rab(p, q, k, l);
                            if (rr != cplx{})
                                rhs = rhs + (tb.at(j, q) * ta.at(i, p)).scaled(rr);
                        }
                    worst = std::max(worst, max_abs_diff(lhs, rhs));
                    scale = std::max({scale, lhs.max_abs(), rhs.max_abs()});
                }
    return {worst, scale};
}

} // namespace fbasis
