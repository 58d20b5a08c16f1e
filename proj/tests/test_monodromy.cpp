#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwpf.hpp"
#include "monodromy.hpp"
#include "rng.hpp"

using namespace fbasis;

namespace {

RapiditySet labels(int n_inh, int n_aux = 1) {
    RapiditySet r;
    for (int i = 1; i <= n_inh; ++i)
        r.inhomogeneities.push_back("xi" + std::to_string(i));
    for (int i = 1; i <= n_aux; ++i)
        r.auxiliaries.push_back(i == 1 ? "mu" : "nu");
    return r;
}

WeightTable dp_table(std::uint64_t seed, int n_inh, int n_aux = 1) {
    RapiditySet r = labels(n_inh, n_aux);
    return build_del_pezzo(sample_del_pezzo_params(seed, r.all()), r);
}

std::vector<std::string> xis_of(int n) {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i)
        out.push_back("xi" + std::to_string(i));
    return out;
}

} // namespace

TEST_CASE("single-site monodromy blocks read off the R-matrix") {
    WeightTable t = dp_table(1, 1);
    MonodromyBlocks m = build_monodromy(t, "mu", {"xi1"});
    Dims dims{3, 1};
    auto w = [&](const char* k) { return t.weight("mu", "xi1", WeightKind::parse(k)); };
    TensorOperator d_expect(dims);
    d_expect.set_entry(0, 0, w("b31"));
    d_expect.set_entry(1, 1, w("b32"));
    d_expect.set_entry(2, 2, w("a3"));
    CHECK(rel_max_diff(m.d_op(), d_expect) == 0.0);
    CHECK(rel_max_diff(m.b_op(1), weyl(3, 1, 1, dims).scaled(w("c13"))) == 0.0);
    CHECK(rel_max_diff(m.c_op(2), weyl(2, 3, 1, dims).scaled(w("c32"))) == 0.0);
}

TEST_CASE("the all-3 state is a D eigenstate with product eigenvalue") {
    WeightTable t = dp_table(3, 3);
    MonodromyBlocks m = build_monodromy(t, "mu", xis_of(3));
    Dims dims{3, 3};
    std::vector<cplx> v(dims.dim(), cplx{});
    v[dims.dim() - 1] = 1.0;  // |333>
    auto w = m.d_op().apply(v);
    cplx expect = 1.0;
    for (const auto& xi : xis_of(3))
        expect *= t.weight("mu", xi, WeightKind::a(3));
    for (int i = 0; i < dims.dim(); ++i)
        CHECK(std::abs(w[i] - (i == dims.dim() - 1 ? expect : cplx{})) < 1e-12 * std::abs(expect));
}

TEST_CASE("monodromy satisfies the Yang-Baxter algebra") {
    RapiditySet raps = labels(3, 2);
    WeightTable t = build_del_pezzo(sample_del_pezzo_params(5, raps.all()), raps);
    auto [resid, scale] = yang_baxter_algebra_residual(t, "mu", "nu", xis_of(3));
    CHECK(resid / scale < 1e-9);
}

TEST_CASE("twist is a conjugation: identity and products") {
    WeightTable t = dp_table(7, 2);
    Dims dims{3, 2};
    FMatrixBundle b = build_f_bundle(t, xis_of(2), dims);
    CHECK(rel_max_diff(twist(TensorOperator::identity(dims), b), TensorOperator::identity(dims)) <
          1e-12);
    MonodromyBlocks m = build_monodromy(t, "mu", xis_of(2));
    TensorOperator xy = twist(m.c_op(2) * m.d_op(), b);
    TensorOperator xt_yt = twist(m.c_op(2), b) * twist(m.d_op(), b);
    CHECK(rel_max_diff(xy, xt_yt) < 1e-10);
}

TEST_CASE("twisted D is diagonal and matches its closed form up to L=4") {
    for (int l : {1, 2, 3, 4}) {
        WeightTable t = dp_table(11 + l, l);
        Dims dims{3, l};
        FMatrixBundle b = build_f_bundle(t, xis_of(l), dims);
        MonodromyBlocks m = build_monodromy(t, "mu", xis_of(l));
        TensorOperator tw = twist(m.d_op(), b);
        tw.for_each([&](int r, int c, cplx v) {
            if (std::abs(v) > 1e-10 * tw.max_abs())
                CHECK(r == c);
        });
        CHECK(rel_max_diff(tw, conjectured_twisted(TwistKind::D, t, "mu", xis_of(l))) < 1e-10);
    }
}

TEST_CASE("twisted C and B operators match their closed forms up to L=4") {
    for (int l : {1, 2, 3, 4}) {
        WeightTable t = dp_table(17 + l, l);
        Dims dims{3, l};
        FMatrixBundle b = build_f_bundle(t, xis_of(l), dims);
        MonodromyBlocks m = build_monodromy(t, "mu", xis_of(l));
        const std::pair<TwistKind, const TensorOperator*> cases[] = {
            {TwistKind::C2, &m.c_op(2)},
            {TwistKind::B2, &m.b_op(2)},
            {TwistKind::C1, &m.c_op(1)},
            {TwistKind::B1, &m.b_op(1)},
        };
        for (const auto& [kind, block] : cases) {
            TensorOperator tw = twist(*block, b);
            TensorOperator conj = conjectured_twisted(kind, t, "mu", xis_of(l));
            CHECK(rel_max_diff(tw, conj) < 1e-10);
        }
    }
}

TEST_CASE("single-site closed forms reduce to one weight") {
    WeightTable t = dp_table(23, 1);
    TensorOperator b1 = conjectured_twisted(TwistKind::B1, t, "mu", {"xi1"});
    Dims dims{3, 1};
    CHECK(rel_max_diff(b1, weyl(3, 1, 1, dims).scaled(t.weight("mu", "xi1", WeightKind::c(1, 3)))) ==
          0.0);
}

TEST_CASE("vanishing and pinned entries of the two-site twisted operators") {
    WeightTable t = dp_table(29, 2);
    Dims dims{3, 2};
    std::vector<std::string> xis = xis_of(2);
    FMatrixBundle b = build_f_bundle(t, xis, dims);
    MonodromyBlocks m = build_monodromy(t, "mu", xis);
    auto code = [](int d1, int d2) { return (d1 - 1) * 3 + (d2 - 1); };
    TensorOperator twd = twist(m.d_op(), b);
    // vanishing off-diagonal entries of the twisted D
    CHECK(std::abs(twd.entry(code(2, 1), code(1, 2))) < 1e-11);
    CHECK(std::abs(twd.entry(code(3, 1), code(1, 3))) < 1e-11);
    CHECK(std::abs(twd.entry(code(3, 2), code(2, 3))) < 1e-11);
    TensorOperator twc2 = twist(m.c_op(2), b);
    CHECK(std::abs(twc2.entry(code(2, 1), code(1, 3))) < 1e-11);
    TensorOperator twb2 = twist(m.b_op(2), b);
    CHECK(std::abs(twb2.entry(code(3, 1), code(1, 2))) < 1e-11);
    // the coefficient of the double insertion in the twisted C^(1)
    TensorOperator twc1 = twist(m.c_op(1), b);
    cplx coeff = t.weight("mu", "xi1", WeightKind::c(3, 1)) *
                  t.weight("mu", "xi2", WeightKind::b(3, 2)) *
                  t.weight("xi1", "xi2", WeightKind::c(2, 1)) /
                  t.weight("xi1", "xi2", WeightKind::b(3, 2));
    CHECK(std::abs(twc1.entry(code(2, 1), code(3, 2)) - coeff) < 1e-11 * std::abs(coeff));
}

TEST_CASE("insertion entry families of the three-site twisted C1 and B1") {
    WeightTable t = dp_table(31, 3);
    Dims dims{3, 3};
    std::vector<std::string> xis = xis_of(3);
    FMatrixBundle b = build_f_bundle(t, xis, dims);
    MonodromyBlocks m = build_monodromy(t, "mu", xis);
    auto code = [](int d1, int d2, int d3) { return (d1 - 1) * 9 + (d2 - 1) * 3 + (d3 - 1); };
    TensorOperator twc1 = twist(m.c_op(1), b);
    TensorOperator conj = conjectured_twisted(TwistKind::C1, t, "mu", xis);
    // alpha family: e^{(12)} x e^{(23)} x diag -- rows (1,2,d), cols (2,3,d)
    for (int d = 1; d <= 3; ++d)
        CHECK(std::abs(twc1.entry(code(1, 2, d), code(2, 3, d)) -
                       conj.entry(code(1, 2, d), code(2, 3, d))) < 1e-11 * conj.max_abs());
    // delta family: e^{(23)} x e^{(12)} x diag -- rows (2,1,d), cols (3,2,d)
    for (int d = 1; d <= 3; ++d)
        CHECK(std::abs(twc1.entry(code(2, 1, d), code(3, 2, d)) -
                       conj.entry(code(2, 1, d), code(3, 2, d))) < 1e-11 * conj.max_abs());
    TensorOperator twb1 = twist(m.b_op(1), b);
    TensorOperator conjb = conjectured_twisted(TwistKind::B1, t, "mu", xis);
    for (int d = 1; d <= 3; ++d)
        CHECK(std::abs(twb1.entry(code(3, 2, d), code(2, 1, d)) -
                       conjb.entry(code(3, 2, d), code(2, 1, d))) < 1e-11 * conjb.max_abs());
}

TEST_CASE("twisted operators preserve the charge block structure") {
    WeightTable t = dp_table(37, 3);
    Dims dims{3, 3};
    FMatrixBundle b = build_f_bundle(t, xis_of(3), dims);
    MonodromyBlocks m = build_monodromy(t, "mu", xis_of(3));
    // twisted D commutes with both total generators
    TensorOperator twd = twist(m.d_op(), b);
    for (int i = 1; i <= 2; ++i) {
        TensorOperator sz = total_sz(i, dims);
        CHECK(max_abs_diff(twd * sz, sz * twd) < 1e-10 * twd.max_abs());
    }
    // twisted C2 shifts the charges exactly as the untwisted block: every
    // entry connects column patterns with one 3 replaced by a 2
    TensorOperator twc2 = twist(m.c_op(2), b);
    auto charges = [&](int codev) {
        int n2 = 0, n3 = 0;
        for (int s = 1; s <= 3; ++s) {
            int d = mi_digit(codev, s, dims);
            n2 += d == 2;
            n3 += d == 3;
        }
        return std::pair{n2, n3};
    };
    twc2.for_each([&](int r, int c, cplx v) {
        if (std::abs(v) < 1e-10 * twc2.max_abs())
            return;
        auto [r2, r3] = charges(r);
        auto [c2, c3] = charges(c);
        CHECK(r2 == c2 + 1);
        CHECK(r3 == c3 - 1);
    });
}

TEST_CASE("near-zero dressing denominators raise DivisionNearZero") {
    WeightTable t = dp_table(41, 2);
    t.set("xi1", "xi2", WeightKind::b(3, 2), cplx{1e-9, 0});
    CHECK_THROWS_AS(conjectured_twisted(TwistKind::C2, t, "mu", xis_of(2)), Error);
}

TEST_CASE("projecting with auxiliary basis vectors reassembles the blocks") {
    WeightTable t = dp_table(43, 2);
    MonodromyBlocks m = build_monodromy(t, "mu", xis_of(2));
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            std::vector<cplx> bra(3, cplx{}), ket(3, cplx{});
            bra[i - 1] = 1.0;
            ket[j - 1] = 1.0;
            CHECK(rel_max_diff(m.project(bra, ket), m.at(i, j)) == 0.0);
        }
}

TEST_CASE("blocks shift the azimuthal charges by fixed amounts") {
    WeightTable t = dp_table(47, 3);
    Dims dims{3, 3};
    MonodromyBlocks m = build_monodromy(t, "mu", xis_of(3));
    auto commutator_shift = [&](const TensorOperator& x, int gen) {
        TensorOperator sz = total_sz(gen, dims);
        return sz * x - x * sz;
    };
    // D conserves both charges
    for (int gen : {1, 2})
        CHECK(commutator_shift(m.d_op(), gen).max_abs() < 1e-12 * m.d_op().max_abs());
    // C^(2) = <3|T|2> adds a 2 and removes a 3 on the quantum space
    CHECK(rel_max_diff(commutator_shift(m.c_op(2), 2), m.c_op(2).scaled(2.0)) < 1e-12);
    CHECK(rel_max_diff(commutator_shift(m.c_op(2), 1), m.c_op(2).scaled(-1.0)) < 1e-12);
    // B^(2) = <2|T|3> does the opposite
    CHECK(rel_max_diff(commutator_shift(m.b_op(2), 2), m.b_op(2).scaled(-2.0)) < 1e-12);
    // C^(1) = <3|T|1> adds a 1 and removes a 3
    CHECK(rel_max_diff(commutator_shift(m.c_op(1), 1), m.c_op(1).scaled(1.0)) < 1e-12);
}
