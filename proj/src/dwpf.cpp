#include "dwpf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fbasis {

DwpfKind dwpf_kind_parse(const std::string& s) {
    if (s == "C2")
        return DwpfKind::C2;
    if (s == "B2")
        return DwpfKind::B2;
    if (s == "C1")
        return DwpfKind::C1;
    if (s == "B1")
        return DwpfKind::B1;
    if (s == "mixedC")
        return DwpfKind::MixedC;
    if (s == "mixedB")
        return DwpfKind::MixedB;
    raise(errc::config, "unknown DWPF kind '" + s + "'");
}

std::string dwpf_kind_str(DwpfKind k) {
    switch (k) {
    case DwpfKind::C2: return "C2";
    case DwpfKind::B2: return "B2";
    case DwpfKind::C1: return "C1";
    case DwpfKind::B1: return "B1";
    case DwpfKind::MixedC: return "mixedC";
    case DwpfKind::MixedB: return "mixedB";
    }
    raise(errc::internal, "bad DWPF kind");
}

bool dwpf_kind_is_mixed(DwpfKind k) { return k == DwpfKind::MixedC || k == DwpfKind::MixedB; }

void DwpfInstance::validate() const {
    if (l < 1)
        raise(errc::config, "DWPF instance needs L >= 1");
    if (static_cast<int>(aux.size()) != l || static_cast<int>(xis.size()) != l)
        raise(errc::config, "DWPF instance needs L auxiliary and L site rapidities");
    if (dwpf_kind_is_mixed(kind)) {
        if (m < 0 || m > l)
            raise(errc::config, "mixed DWPF needs 0 <= M <= L");
        if (static_cast<int>(q.size()) != m)
            raise(errc::config, "mixed DWPF needs M charge positions");
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] < 1 || q[i] > l || (i > 0 && q[i] <= q[i - 1]))
                raise(errc::config, "charge positions must be strictly increasing in 1..L");
        }
    } else if (m != 0 || !q.empty()) {
        raise(errc::config, "single-type DWPF takes no charge positions");
    }
}

cplx compensated_sum(std::vector<cplx> terms) {
    std::sort(terms.begin(), terms.end(),
              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    // Neumaier variant: the correction also covers addends larger than the sum
    auto accumulate = [&](auto proj) {
        double s = 0, c = 0;
        for (const cplx& term : terms) {
            double x = proj(term);
            double t = s + x;
            c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
            s = t;
        }
        return s + c;
    };
    return {accumulate([](const cplx& z) { return z.real(); }),
            accumulate([](const cplx& z) { return z.imag(); })};
}

namespace {

// auxiliary+quantum vector: w[alpha-1][code]; applies R_{a,site}(mu, xi_site)
void apply_r_factor(const WeightTable& table, const std::string& mu, const std::string& xi,
                    int site, Dims dims, std::vector<std::vector<cplx>>& w) {
    const int n = dims.n, d = dims.dim();
    std::vector<std::vector<cplx>> out(n, std::vector<cplx>(d, cplx{}));
    std::vector<std::vector<cplx>> a(n + 1), b(n + 1), c(n + 1);
    for (int s = 1; s <= n; ++s) {
        a[s].assign(n + 1, cplx{});
        b[s].assign(n + 1, cplx{});
        c[s].assign(n + 1, cplx{});
        for (int t = 1; t <= n; ++t) {
            if (s == t)
                a[s][t] = table.weight(mu, xi, WeightKind::a(s));
            else {
                b[s][t] = table.weight(mu, xi, WeightKind::b(s, t));
                c[s][t] = table.weight(mu, xi, WeightKind::c(s, t));
            }
        }
    }
    for (int alpha = 1; alpha <= n; ++alpha)
        for (int code = 0; code < d; ++code) {
            cplx v = w[alpha - 1][code];
            if (v == cplx{})
                continue;
            int dig = mi_digit(code, site, dims);
            out[alpha - 1][code] += (alpha == dig ? a[alpha][dig] : b[alpha][dig]) * v;
            if (alpha != dig)
                out[dig - 1][mi_with_digit(code, site, alpha, dims)] += c[dig][alpha] * v;
        }
    w = std::move(out);
}

// v <- <i|_a T(mu) |j>_a v without materializing block operators
std::vector<cplx> apply_monodromy_block(const WeightTable& table, const std::string& mu,
                                        const std::vector<std::string>& xis, int i, int j,
                                        const std::vector<cplx>& v) {
    const int n = table.rank();
    Dims dims{n, static_cast<int>(xis.size())};
    std::vector<std::vector<cplx>> w(n, std::vector<cplx>(dims.dim(), cplx{}));
    w[j - 1] = v;
    for (int k = 1; k <= dims.l; ++k)
        apply_r_factor(table, mu, xis[k - 1], k, dims, w);
    return w[i - 1];
}

std::vector<cplx> pattern_vec(const std::vector<int>& pattern, Dims dims) {
    if (static_cast<int>(pattern.size()) != dims.l)
        raise(errc::dimension_mismatch, "state pattern length does not match site count");
    int code = 0;
    for (int d : pattern) {
        if (d < 1 || d > dims.n)
            raise(errc::index_out_of_range, "state pattern digit out of range");
        code = code * dims.n + (d - 1);
    }
    std::vector<cplx> v(dims.dim(), cplx{});
    v[code] = 1.0;
    return v;
}

std::vector<int> mixed_pattern(int l, const std::vector<int>& q) {
    std::vector<int> pat(l, 2);
    for (int p : q)
        pat[p - 1] = 1;
    return pat;
}

struct KindTraits {
    const char* c_weight;    // single-site creation/annihilation weight
    const char* b_den;       // dressing denominator weight
    int theta_num, theta_den;
};

KindTraits traits_of(DwpfKind kind) {
    switch (kind) {
    case DwpfKind::C2: return {"c32", "b32", 3, 2};
    case DwpfKind::B2: return {"c23", "b32", 2, 3};
    case DwpfKind::C1: return {"c31", "b21", 3, 1};
    case DwpfKind::B1: return {"c13", "b31", 1, 3};
    default: raise(errc::config, "single-type kind required");
    }
}

cplx guarded(const WeightTable& t, const char* k, const std::string& x, const std::string& y) {
    cplx v = t.weight(x, y, WeightKind::parse(k));
    if (std::abs(v) < eps_singular)
        raise(errc::division_near_zero,
              std::string(k) + "(" + x + ", " + y + ") below singularity threshold");
    return v;
}

cplx exact_sum(DwpfKind kind, const WeightTable& table, const std::vector<std::string>& aux,
               const std::vector<std::string>& xis) {
    const int l = static_cast<int>(xis.size());
    if (l == 0)
        return 1.0;
    if (l > 7)
        raise(errc::config, "permutation sum capped at L = 7");
    KindTraits tr = traits_of(kind);
    auto th = [&](int i, int pj, int pk) {
        return pj < pk ? table.weight(xis[pj], xis[pk], WeightKind::a(i)) : cplx{1.0};
    };
    std::vector<int> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<cplx> terms;
    do {
        cplx term = 1.0;
        for (int i = 0; i < l; ++i)
            term *= table.weight(aux[i], xis[perm[i]], WeightKind::parse(tr.c_weight));
        for (int j = 0; j < l; ++j)
            for (int k = j + 1; k < l; ++k) {
                int sj = perm[j], sk = perm[k];
                term *= table.weight(aux[j], xis[sk], WeightKind::a(3)) *
                        table.weight(aux[k], xis[sj], WeightKind::parse(tr.b_den)) *
                        th(tr.theta_num, sk, sj) /
                        (guarded(table, tr.b_den, xis[sk], xis[sj]) * th(tr.theta_den, sj, sk));
            }
        terms.push_back(term);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return compensated_sum(std::move(terms));
}

cplx recurrence_sum(DwpfKind kind, const WeightTable& table, std::vector<std::string> aux,
                    std::vector<std::string> xis) {
    const int l = static_cast<int>(xis.size());
    KindTraits tr = traits_of(kind);
    if (l == 0)
        return 1.0;
    if (l == 1)
        return table.weight(aux[0], xis[0], WeightKind::parse(tr.c_weight));
    auto th = [&](int i, const std::string& xj, const std::string& xk, int pj, int pk) {
        return pj < pk ? table.weight(xj, xk, WeightKind::a(i)) : cplx{1.0};
    };
    std::vector<cplx> terms;
    for (int p = 0; p < l; ++p) {
        cplx pref = table.weight(aux[0], xis[p], WeightKind::parse(tr.c_weight));
        for (int i = 0; i < l; ++i) {
            if (i == p)
                continue;
            pref *= table.weight(aux[0], xis[i], WeightKind::a(3)) *
                    th(tr.theta_num, xis[i], xis[p], i, p) /
                    (guarded(table, tr.b_den, xis[i], xis[p]) *
                     th(tr.theta_den, xis[p], xis[i], p, i));
        }
        for (int j = 1; j < l; ++j)
            pref *= table.weight(aux[j], xis[p], WeightKind::parse(tr.b_den));
        std::vector<std::string> sub_aux(aux.begin() + 1, aux.end());
        std::vector<std::string> sub_xis = xis;
        sub_xis.erase(sub_xis.begin() + p);
        terms.push_back(pref * recurrence_sum(kind, table, std::move(sub_aux), std::move(sub_xis)));
    }
    return compensated_sum(std::move(terms));
}

} // namespace

cplx dwpf_direct(const DwpfInstance& inst, const WeightTable& table) {
    inst.validate();
    const int n = table.rank();
    Dims dims{n, inst.l};
    switch (inst.kind) {
    case DwpfKind::C2:
    case DwpfKind::C1: {
        int col = inst.kind == DwpfKind::C2 ? 2 : 1;
        std::vector<cplx> v = pattern_vec(std::vector<int>(inst.l, 3), dims);
        for (const auto& nu : inst.aux)  // nu_1 applied first
            v = apply_monodromy_block(table, nu, inst.xis, n, col, v);
        std::vector<cplx> bra = pattern_vec(std::vector<int>(inst.l, col), dims);
        cplx out{};
        for (int i = 0; i < dims.dim(); ++i)
            out += bra[i] * v[i];
        return out;
    }
    case DwpfKind::B2:
    case DwpfKind::B1: {
        int row = inst.kind == DwpfKind::B2 ? 2 : 1;
        std::vector<cplx> v = pattern_vec(std::vector<int>(inst.l, row), dims);
        for (auto it = inst.aux.rbegin(); it != inst.aux.rend(); ++it)  // mu_L applied first
            v = apply_monodromy_block(table, *it, inst.xis, row, n, v);
        std::vector<cplx> bra = pattern_vec(std::vector<int>(inst.l, 3), dims);
        cplx out{};
        for (int i = 0; i < dims.dim(); ++i)
            out += bra[i] * v[i];
        return out;
    }
    case DwpfKind::MixedC: {
        std::vector<cplx> v = pattern_vec(std::vector<int>(inst.l, 3), dims);
        for (int i = 0; i < inst.l; ++i)
            v = apply_monodromy_block(table, inst.aux[i], inst.xis, n, i < inst.m ? 1 : 2, v);
        std::vector<cplx> bra = pattern_vec(mixed_pattern(inst.l, inst.q), dims);
        cplx out{};
        for (int i = 0; i < dims.dim(); ++i)
            out += bra[i] * v[i];
        return out;
    }
    case DwpfKind::MixedB: {
        std::vector<cplx> v = pattern_vec(mixed_pattern(inst.l, inst.q), dims);
        for (int i = inst.l - 1; i >= 0; --i)
            v = apply_monodromy_block(table, inst.aux[i], inst.xis, i < inst.m ? 1 : 2, n, v);
        std::vector<cplx> bra = pattern_vec(std::vector<int>(inst.l, 3), dims);
        cplx out{};
        for (int i = 0; i < dims.dim(); ++i)
            out += bra[i] * v[i];
        return out;
    }
    }
    raise(errc::internal, "bad DWPF kind");
}

cplx dwpf_recurrence(const DwpfInstance& inst, const WeightTable& table) {
    inst.validate();
    if (dwpf_kind_is_mixed(inst.kind))
        raise(errc::config, "recurrence route covers single-type kinds only");
    return recurrence_sum(inst.kind, table, inst.aux, inst.xis);
}

cplx dwpf_exact(const DwpfInstance& inst, const WeightTable& table) {
    inst.validate();
    if (dwpf_kind_is_mixed(inst.kind))
        raise(errc::config, "exact sum covers single-type kinds only");
    return exact_sum(inst.kind, table, inst.aux, inst.xis);
}

cplx f_sandwich(const FMatrixBundle& bundle, const std::vector<int>& bra,
                const std::vector<int>& ket, bool use_inverse) {
    Dims dims = bundle.curly_f.dims();
    if (static_cast<int>(bra.size()) != dims.l || static_cast<int>(ket.size()) != dims.l)
        raise(errc::dimension_mismatch, "pattern length does not match site count");
    auto code_of = [&](const std::vector<int>& pat) {
        int code = 0;
        for (int d : pat) {
            if (d < 1 || d > dims.n)
                raise(errc::index_out_of_range, "state pattern digit out of range");
            code = code * dims.n + (d - 1);
        }
        return code;
    };
    if (use_inverse) {
        // curlyF^{-1} = F^{-1} N; N is diagonal so scale the column
        int col = code_of(ket);
        return bundle.f_inverse.entry(code_of(bra), col) * bundle.n_matrix.entry(col, col);
    }
    return bundle.curly_f.entry(code_of(bra), code_of(ket));
}

cplx mixed_dwpf_formula(const DwpfInstance& inst, const WeightTable& table,
                        const FMatrixBundle& bundle) {
    inst.validate();
    if (!dwpf_kind_is_mixed(inst.kind))
        raise(errc::config, "mixed formula covers mixed kinds only");
    const int l = inst.l, m = inst.m;
    auto th3 = [&](const std::string& xj, const std::string& xk, int pj, int pk) {
        return pj < pk ? table.weight(xj, xk, WeightKind::a(3)) : cplx{1.0};
    };
    std::vector<int> qpat = mixed_pattern(l, inst.q);
    std::vector<cplx> terms;
    std::vector<int> psel(m);
    std::iota(psel.begin(), psel.end(), 1);
    auto advance = [&]() {  // next M-combination of 1..L
        int i = m - 1;
        while (i >= 0 && psel[i] == l - (m - 1 - i))
            --i;
        if (i < 0)
            return false;
        ++psel[i];
        for (int k = i + 1; k < m; ++k)
            psel[k] = psel[k - 1] + 1;
        return true;
    };
    do {
        std::vector<int> ppat = mixed_pattern(l, psel);
        std::vector<std::string> xi_p, xi_rest;
        for (int p : psel)
            xi_p.push_back(inst.xis[p - 1]);
        for (int s = 1; s <= l; ++s)
            if (std::find(psel.begin(), psel.end(), s) == psel.end())
                xi_rest.push_back(inst.xis[s - 1]);
        std::vector<std::string> aux_1(inst.aux.begin(), inst.aux.begin() + m);
        std::vector<std::string> aux_2(inst.aux.begin() + m, inst.aux.end());
        cplx sandwich, pref = 1.0, z1, z2;
        if (inst.kind == DwpfKind::MixedB) {
            sandwich = f_sandwich(bundle, ppat, qpat, false);
            for (int i = m; i < l; ++i)
                for (int p : psel)
                    pref *= table.weight(inst.aux[i], inst.xis[p - 1], WeightKind::b(3, 1));
            for (int k = 0; k < m; ++k)
                for (int s = 1; s <= l; ++s) {
                    if (std::find(psel.begin(), psel.end(), s) != psel.end())
                        continue;
                    pref *= table.weight(inst.aux[k], inst.xis[s - 1], WeightKind::a(3)) /
                            (guarded(table, "b31", inst.xis[s - 1], inst.xis[psel[k] - 1]) *
                             th3(inst.xis[psel[k] - 1], inst.xis[s - 1], psel[k], s));
                }
            z1 = exact_sum(DwpfKind::B1, table, aux_1, xi_p);
            z2 = exact_sum(DwpfKind::B2, table, aux_2, xi_rest);
        } else {
            sandwich = f_sandwich(bundle, qpat, ppat, true);
            for (int i = m; i < l; ++i)
                for (int p : psel)
                    pref *= table.weight(inst.aux[i], inst.xis[p - 1], WeightKind::b(2, 1));
            for (int k = 0; k < m; ++k)
                for (int s = 1; s <= l; ++s) {
                    if (std::find(psel.begin(), psel.end(), s) != psel.end())
                        continue;
                    pref *= table.weight(inst.aux[k], inst.xis[s - 1], WeightKind::a(3)) *
                            th3(inst.xis[s - 1], inst.xis[psel[k] - 1], s, psel[k]);
                }
            z1 = exact_sum(DwpfKind::C1, table, aux_1, xi_p);
            z2 = exact_sum(DwpfKind::C2, table, aux_2, xi_rest);
        }
        terms.push_back(sandwich * pref * z1 * z2);
    } while (m > 0 && advance());
    return compensated_sum(std::move(terms));
}

ResidualReport commute_check(CommuteKind kind, const WeightTable& table, const std::string& mu,
                             const std::string& nu, const std::vector<std::string>& xis,
                             double tol) {
    MonodromyBlocks tmu = build_monodromy(table, mu, xis);
    MonodromyBlocks tnu = build_monodromy(table, nu, xis);
    cplx a3 = table.weight(mu, nu, WeightKind::a(3));
    cplx b21 = guarded(table, "b21", mu, nu);
    TensorOperator lhs(tmu.dims()), mid(tmu.dims()), swp(tmu.dims());
    if (kind == CommuteKind::CC) {
        cplx c12 = table.weight(mu, nu, WeightKind::c(1, 2));
        lhs = tnu.c_op(1) * tmu.c_op(2);
        mid = (tmu.c_op(2) * tnu.c_op(1)).scaled(a3 / b21);
        swp = (tnu.c_op(2) * tmu.c_op(1)).scaled(c12 / b21);
    } else {
        cplx c21 = table.weight(mu, nu, WeightKind::c(2, 1));
        lhs = tmu.b_op(2) * tnu.b_op(1);
        mid = (tnu.b_op(1) * tmu.b_op(2)).scaled(a3 / b21);
        swp = (tmu.b_op(1) * tnu.b_op(2)).scaled(c21 / b21);
    }
    TensorOperator resid = lhs - mid + swp;
    double scale = std::max({lhs.max_abs(), mid.max_abs(), swp.max_abs(), 1e-300});
    return make_report(kind == CommuteKind::CC ? "commute.CC" : "commute.BB", {mu, nu},
                       resid.max_abs(), scale, tol);
}

} // namespace fbasis
