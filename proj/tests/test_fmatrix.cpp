#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "fmatrix.hpp"
#include "rng.hpp"

using namespace fbasis;

namespace {

RapiditySet labels(int n) {
    RapiditySet r;
    for (int i = 1; i <= n; ++i)
        r.inhomogeneities.push_back("xi" + std::to_string(i));
    return r;
}

WeightTable dp_table(std::uint64_t seed, int n) {
    RapiditySet r = labels(n);
    return build_del_pezzo(sample_del_pezzo_params(seed, r.all()), r);
}

WeightTable sv_table(std::uint64_t seed, int n) {
    RapiditySet r = labels(n);
    SplitMix64 rng(seed);
    cplx eta = rng.annulus();
    for (const auto& lab : r.all())
        r.values[lab] = rng.annulus();
    return build_six_vertex(eta, r);
}

std::vector<std::string> xis_of(int n) {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i)
        out.push_back("xi" + std::to_string(i));
    return out;
}

} // namespace

TEST_CASE("curly F at a single site is the identity") {
    WeightTable t = dp_table(1, 1);
    Dims dims{3, 1};
    CHECK(rel_max_diff(build_curly_f(t, {"xi1"}, dims), TensorOperator::identity(dims)) == 0.0);
}

TEST_CASE("curly F at two sites matches its explicit form") {
    WeightTable t = dp_table(2, 2);
    Dims dims{3, 2};
    TensorOperator expect(dims);
    TensorOperator r12 = embed_r(t, 1, 2, "xi1", "xi2", dims);
    for (int a1 = 1; a1 <= 3; ++a1)
        for (int a2 = 1; a2 <= 3; ++a2) {
            TensorOperator proj = weyl(a1, a1, 1, dims) * weyl(a2, a2, 2, dims);
            expect = expect + (a1 <= a2 ? proj : proj * r12);
        }
    CHECK(rel_max_diff(build_curly_f(t, xis_of(2), dims), expect) < 1e-13);
}

TEST_CASE("all-equal indices receive only the identity permutation") {
    WeightTable t = dp_table(3, 3);
    Dims dims{3, 3};
    TensorOperator cf = build_curly_f(t, xis_of(3), dims);
    for (int a = 1; a <= 3; ++a) {
        int code = 0;
        for (int s = 0; s < 3; ++s)
            code = code * 3 + (a - 1);
        CHECK(std::abs(cf.entry(code, code) - 1.0) < 1e-12);
        for (int c = 0; c < dims.dim(); ++c)
            if (c != code)
                CHECK(std::abs(cf.entry(code, c)) < 1e-12);
    }
}

TEST_CASE("sum structure: sigma-count per diagonal index pattern") {
    // replacing R^{sigma} with the identity makes curly F diagonal; each
    // diagonal entry counts the permutations compatible with its pattern,
    // which a brute-force inequality scan over S_L reproduces
    Dims dims{3, 4};
    std::vector<int> from_enumeration(dims.dim(), 0);
    for (const auto& sigma : Permutation::all(4))
        for_each_ordered_sequence(sigma, dims, [&](const std::vector<int>& digits) {
            int code = 0;
            for (int d : digits)
                code = code * dims.n + (d - 1);
            ++from_enumeration[code];
        });
    for (int code = 0; code < dims.dim(); ++code) {
        int by_site[4];
        for (int s = 1; s <= 4; ++s)
            by_site[s - 1] = mi_digit(code, s, dims);
        int count = 0;
        for (const auto& sigma : Permutation::all(4)) {
            bool ok = true;
            for (int slot = 1; slot < 4; ++slot) {
                int a = by_site[sigma(slot) - 1], b = by_site[sigma(slot + 1) - 1];
                if (sigma(slot) < sigma(slot + 1) ? a > b : a >= b)
                    ok = false;
            }
            count += ok;
        }
        CHECK(from_enumeration[code] == count);
        CHECK(count >= 1);
        // all-distinct digit patterns admit exactly one permutation
        bool distinct = true;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                distinct = distinct && by_site[a] != by_site[b];
        if (distinct)
            CHECK(count == 1);
    }
}

TEST_CASE("N matrix at two sites carries sqrt(a_k) on coincidences") {
    WeightTable t = dp_table(5, 2);
    Dims dims{3, 2};
    TensorOperator nm = build_n_matrix(t, xis_of(2), dims);
    for (int a = 1; a <= 3; ++a) {
        int code = (a - 1) * 3 + (a - 1);
        cplx expect = std::sqrt(t.weight("xi1", "xi2", WeightKind::a(a)));
        CHECK(std::abs(nm.entry(code, code) - expect) < 1e-14);
    }
    CHECK(std::abs(nm.entry(1, 1) - 1.0) == 0.0);
}

TEST_CASE("N matrix at three sites equals the product of its pairwise factors") {
    WeightTable t = dp_table(7, 3);
    Dims dims{3, 3};
    auto pair_factor = [&](int i, int j) {
        std::vector<cplx> d(dims.dim(), cplx{1.0});
        for (int code = 0; code < dims.dim(); ++code) {
            int di = mi_digit(code, i, dims);
            if (di == mi_digit(code, j, dims))
                d[code] = std::sqrt(t.weight(xis_of(3)[i - 1], xis_of(3)[j - 1], WeightKind::a(di)));
        }
        return TensorOperator::diagonal(dims, d);
    };
    TensorOperator expect = pair_factor(2, 3) * pair_factor(1, 3) * pair_factor(1, 2);
    CHECK(rel_max_diff(build_n_matrix(t, xis_of(3), dims), expect) < 1e-14);
}

TEST_CASE("unit a weights make the N matrix the identity") {
    RapiditySet raps = labels(2);
    WeightTable t(3, raps.all());
    for (const auto& x : t.labels())
        for (const auto& y : t.labels())
            for (const auto& k : WeightKind::all(3))
                t.set(x, y, k, k.cls == 'a' ? cplx{1.0} : cplx{0.5, 0.1});
    Dims dims{3, 2};
    CHECK(rel_max_diff(build_n_matrix(t, xis_of(2), dims), TensorOperator::identity(dims)) == 0.0);
}

TEST_CASE("negative real a weight raises the branch cut error") {
    RapiditySet raps = labels(2);
    WeightTable t(3, raps.all());
    for (const auto& x : t.labels())
        for (const auto& y : t.labels())
            for (const auto& k : WeightKind::all(3))
                t.set(x, y, k, cplx{1.0});
    t.set("xi1", "xi2", WeightKind::a(2), cplx{-2.0, 0.0});
    CHECK_THROWS_AS(build_n_matrix(t, xis_of(2), Dims{3, 2}), Error);
}

TEST_CASE("bundle invariants at three sites") {
    WeightTable t = dp_table(9, 3);
    Dims dims{3, 3};
    FMatrixBundle b = build_f_bundle(t, xis_of(3), dims);
    CHECK(rel_max_diff(b.n_matrix * b.curly_f, b.f) == 0.0);
    CHECK(rel_max_diff(b.f * b.f_inverse, TensorOperator::identity(dims)) < 1e-12);
    CHECK(rel_max_diff(b.f_inverse * b.f, TensorOperator::identity(dims)) < 1e-12);
    // lower triangular with nonzero diagonal
    b.f.for_each([&](int r, int c, cplx v) {
        if (std::abs(v) > 1e-13 * b.f.max_abs())
            CHECK(r >= c);
    });
    for (int r = 0; r < dims.dim(); ++r)
        CHECK(std::abs(b.f.entry(r, r)) > 1e-12);
}

TEST_CASE("reference states are fixed points of curly F and its inverse") {
    WeightTable t = dp_table(11, 3);
    Dims dims{3, 3};
    FMatrixBundle b = build_f_bundle(t, xis_of(3), dims);
    TensorOperator cf_inv = b.curly_f_inverse();
    for (int a = 1; a <= 3; ++a) {
        std::vector<cplx> v(dims.dim(), cplx{});
        int code = 0;
        for (int s = 0; s < 3; ++s)
            code = code * 3 + (a - 1);
        v[code] = 1.0;
        for (const TensorOperator* op : {&b.curly_f, &cf_inv}) {
            auto w = op->apply(v);
            for (int i = 0; i < dims.dim(); ++i)
                CHECK(std::abs(w[i] - v[i]) < 1e-12);
            // transpose reference states likewise
            auto wt = op->adjoint().apply(v);
            for (int i = 0; i < dims.dim(); ++i)
                CHECK(std::abs(std::conj(wt[i]) - v[i]) < 1e-12);
        }
    }
}

TEST_CASE("curly R sigma: identity permutation and the N-ratio identity") {
    WeightTable t = dp_table(13, 3);
    Dims dims{3, 3};
    CHECK(rel_max_diff(curly_r_sigma(minimal_decomposition({1, 2, 3}), t, xis_of(3), dims),
                       TensorOperator::identity(dims)) == 0.0);
    for (const auto& sigma : Permutation::all(3)) {
        ResidualReport r = n_ratio_identity_residual(t, xis_of(3), dims, sigma);
        CHECK(r.pass);
        CHECK(r.relative < 1e-11);
    }
}

TEST_CASE("curly R satisfies global unitarity") {
    for (int l : {2, 3, 4}) {
        WeightTable t = dp_table(15 + l, l);
        ResidualReport r = curly_r_unitarity_residual(t, xis_of(l), Dims{3, l});
        CHECK(r.pass);
        CHECK(r.relative < 1e-11);
    }
}

TEST_CASE("factorization at two sites") {
    WeightTable t = dp_table(17, 2);
    auto rows = verify_factorization(t, xis_of(2), Dims{3, 2}, Permutation::all(2));
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.pass);
        CHECK(r.relative < 1e-11);
    }
}

TEST_CASE("factorization is exhaustive over S4 for both table families") {
    WeightTable dp = dp_table(19, 4);
    auto rows = verify_factorization(dp, xis_of(4), Dims{3, 4}, Permutation::all(4));
    CHECK(rows.size() == 24);
    for (const auto& r : rows)
        CHECK(r.relative < 1e-9);
    WeightTable sv = sv_table(21, 4);
    rows = verify_factorization(sv, xis_of(4), Dims{2, 4}, Permutation::all(4));
    CHECK(rows.size() == 24);
    for (const auto& r : rows)
        CHECK(r.relative < 1e-9);
}

TEST_CASE("equivalent factorization form through the twisted product") {
    // Rhat^{sigma^{-1}} = F^{-1} curlyRhat^{sigma^{-1}} F with the left
    // inverse built on the permuted rapidity list (the notation suppresses
    // the inhomogeneities); Rhat^{sigma^{-1}} = P^{sigma^{-1}} R^{sigma}
    WeightTable t = dp_table(23, 3);
    Dims dims{3, 3};
    std::vector<std::string> xis = xis_of(3);
    FMatrixBundle b = build_f_bundle(t, xis, dims);
    for (const auto& sigma : Permutation::all(3)) {
        TensorOperator p_inv = permutation_op(sigma.inverse(), dims);
        TensorOperator rhat = p_inv * r_sigma(sigma, t, xis, dims);
        TensorOperator crhat = p_inv * curly_r_sigma(sigma, t, xis, dims);
        std::vector<std::string> permuted(3);
        for (int m = 1; m <= 3; ++m)
            permuted[m - 1] = xis[sigma(m) - 1];
        TensorOperator cf_perm_inv = invert_lower_triangular(build_curly_f(t, permuted, dims));
        CHECK(rel_max_diff(cf_perm_inv * crhat * b.curly_f, rhat) < 1e-10);
    }
}

TEST_CASE("singular diagonal raises") {
    Dims dims{2, 1};
    TensorOperator op(dims);
    op.set_entry(0, 0, 1.0);
    op.set_entry(1, 0, 0.5);
    op.set_entry(1, 1, 1e-14);
    CHECK_THROWS_AS(invert_lower_triangular(op), Error);
}
