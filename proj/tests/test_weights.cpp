#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "relations.hpp"
#include "rng.hpp"
#include "weights.hpp"

using namespace fbasis;

namespace {

RapiditySet labels(int n_inh, int n_aux = 0) {
    RapiditySet r;
    for (int i = 1; i <= n_inh; ++i)
        r.inhomogeneities.push_back("xi" + std::to_string(i));
    for (int i = 1; i <= n_aux; ++i)
        r.auxiliaries.push_back("au" + std::to_string(i));
    return r;
}

WeightTable dp_table(std::uint64_t seed, int n_inh, int n_aux = 0) {
    RapiditySet r = labels(n_inh, n_aux);
    return build_del_pezzo(sample_del_pezzo_params(seed, r.all()), r);
}

RapiditySet valued(std::uint64_t seed, int n) {
    RapiditySet r = labels(n);
    SplitMix64 rng(seed);
    for (const auto& lab : r.all())
        r.values[lab] = rng.annulus();
    return r;
}

} // namespace

TEST_CASE("weight kind parsing and dense index") {
    CHECK(WeightKind::parse("a1").cls == 'a');
    CHECK(WeightKind::parse("b12").i == 1);
    CHECK(WeightKind::parse("c32").j == 2);
    CHECK_THROWS_AS(WeightKind::parse("d11"), Error);
    CHECK_THROWS_AS(WeightKind::parse("b11"), Error);
    CHECK_THROWS_AS(WeightKind::parse("a"), Error);
    for (int n : {2, 3, 4}) {
        auto all = WeightKind::all(n);
        CHECK(static_cast<int>(all.size()) == n * (2 * n - 1));
        std::vector<bool> seen(all.size(), false);
        for (const auto& k : all) {
            int idx = k.index(n);
            REQUIRE(idx >= 0);
            REQUIRE(idx < static_cast<int>(all.size()));
            CHECK(!seen[idx]);
            seen[idx] = true;
        }
    }
}

TEST_CASE("del pezzo satisfies a1 unitarity exactly by normalization") {
    WeightTable t = dp_table(42, 4, 2);
    for (const auto& x : t.labels())
        for (const auto& y : t.labels()) {
            cplx p = t.weight(x, y, WeightKind::a(1)) * t.weight(y, x, WeightKind::a(1));
            CHECK(std::abs(p - 1.0) < 1e-13);
        }
}

TEST_CASE("del pezzo passes all weight relations at seed 42") {
    WeightTable t = dp_table(42, 4, 2);
    const auto& labs = t.labels();
    double worst = 0;
    for (std::size_t i = 0; i < labs.size(); ++i)
        for (std::size_t j = i; j < labs.size(); ++j)
            worst = std::max(worst, worst_relative(check_unitarity_weights(t, labs[i], labs[j])));
    CHECK(worst < 1e-12);
    worst = 0;
    for (std::size_t i = 0; i < labs.size(); ++i)
        for (std::size_t j = 0; j < labs.size(); ++j)
            for (std::size_t k = 0; k < labs.size(); ++k) {
                if (i == j || j == k || i == k)
                    continue;
                worst = std::max(worst, worst_relative(check_yb_weights(t, labs[i], labs[j], labs[k])));
            }
    CHECK(worst < 1e-10);
}

TEST_CASE("degenerate hypersurface factor still builds when b coefficient is generic") {
    // Delta_1*Delta_2 = 1 removes the a^2 b term of the cubic
    DelPezzoParams p = sample_del_pezzo_params(7, labels(3).all());
    p.delta_cap2 = 1.0 / p.delta_cap1;
    WeightTable t = build_del_pezzo(p, labels(3));
    CHECK(worst_relative(check_yb_weights(t, "xi1", "xi2", "xi3")) < 1e-10);
}

TEST_CASE("singular parameters are screened") {
    DelPezzoParams p = sample_del_pezzo_params(3, labels(2).all());
    p.sites["xi1"].c = 1e-9;
    CHECK_THROWS_AS(build_del_pezzo(p, labels(2)), Error);
    DelPezzoParams p2 = sample_del_pezzo_params(3, labels(2).all());
    p2.sites["xi2"].b_bar = p2.sites["xi2"].a / p2.delta_cap1;  // a - D1*bbar = 0
    CHECK_THROWS_AS(build_del_pezzo(p2, labels(2)), Error);
}

TEST_CASE("weight lookup errors") {
    WeightTable t = dp_table(1, 2);
    CHECK_THROWS_AS(t.weight("xi1", "zz", WeightKind::a(1)), Error);
    CHECK_THROWS_AS(t.weight("xi1", "xi2", WeightKind::c(1, 3 + 1)), Error);
    WeightTable r2 = t.restrict_rank(2);
    CHECK_THROWS_AS(r2.weight("xi1", "xi2", WeightKind::c(1, 3)), Error);
    // diagonal pair is regular: a_i = 1, b = 0, c = 1
    CHECK(std::abs(t.weight("xi1", "xi1", WeightKind::a(2)) - 1.0) < 1e-12);
    CHECK(std::abs(t.weight("xi1", "xi1", WeightKind::b(1, 2))) < 1e-12);
    CHECK(std::abs(t.weight("xi1", "xi1", WeightKind::c(2, 1)) - 1.0) < 1e-12);
}

TEST_CASE("b32 matches an independent evaluation of its defining ratio") {
    auto params = sample_del_pezzo_params(11, labels(2).all());
    WeightTable t = build_del_pezzo(params, labels(2));
    const auto& s1 = params.sites.at("xi1");
    const auto& s2 = params.sites.at("xi2");
    cplx D1 = params.delta_cap1, D2 = params.delta_cap2, d1 = params.delta1;
    cplx f1 = (D1 * D2 - 1.0) * s1.a - D1 * s1.b_bar;
    cplx g1 = s1.a - D1 * s1.b_bar, g2 = s2.a - D1 * s2.b_bar;
    cplx W = s2.a * s1.b_bar - s1.a * s2.b_bar;
    cplx ratio = D1 * D1 * d1 * s2.c * s1.c_bar * s2.c_bar / (s2.h1 * s2.h2) * W / (f1 * g1 * g2);
    // pair (xi1, xi2) is registered in increasing order, so c12 = 1
    CHECK(std::abs(t.weight("xi1", "xi2", WeightKind::b(3, 2)) - ratio) < 1e-12 * std::abs(ratio));
    CHECK(std::abs(t.weight("xi1", "xi2", WeightKind::c(1, 2)) - 1.0) == 0.0);
}

TEST_CASE("scaling one ordered pair by lambda and its reverse by 1/lambda preserves relations") {
    WeightTable t = dp_table(5, 3);
    cplx lambda{0.7, 1.1};
    for (const auto& k : WeightKind::all(3)) {
        t.set("xi1", "xi2", k, t.weight("xi1", "xi2", k) * lambda);
        t.set("xi2", "xi1", k, t.weight("xi2", "xi1", k) / lambda);
    }
    CHECK(all_pass(check_unitarity_weights(t, "xi1", "xi2")));
    CHECK(all_pass(check_yb_weights(t, "xi1", "xi2", "xi3")));
    CHECK(all_pass(check_yb_weights(t, "xi3", "xi1", "xi2")));
}

TEST_CASE("perk schultz weights depend only on rapidity ratios") {
    cplx q{0.6, 0.3};
    RapiditySet r = labels(4);
    cplx v1{0.7, 0.2}, v2{1.3, -0.4}, ratio{1.9, 0.3};
    r.values = {{"xi1", v1}, {"xi2", v2}, {"xi3", v1 * ratio}, {"xi4", v2 * ratio}};
    WeightTable t = build_perk_schultz(q, r);
    for (const auto& k : WeightKind::all(3)) {
        CHECK(std::abs(t.weight("xi1", "xi2", k) - t.weight("xi3", "xi4", k)) < 1e-12);
        CHECK(std::abs(t.weight("xi2", "xi1", k) - t.weight("xi4", "xi3", k)) < 1e-12);
    }
}

TEST_CASE("perk schultz passes every weight relation") {
    WeightTable t = build_perk_schultz(cplx{0.6, 0.3}, valued(31, 4));
    const auto& labs = t.labels();
    for (std::size_t i = 0; i < labs.size(); ++i)
        for (std::size_t j = i; j < labs.size(); ++j)
            CHECK(worst_relative(check_unitarity_weights(t, labs[i], labs[j])) < 1e-11);
    CHECK(worst_relative(check_yb_weights(t, "xi1", "xi3", "xi2")) < 1e-10);
}

TEST_CASE("perk schultz with equal values under distinct labels stays consistent") {
    cplx q{0.8, 0.1};
    RapiditySet r = labels(3);
    cplx v{1.1, 0.4};
    r.values = {{"xi1", v}, {"xi2", v}, {"xi3", cplx{0.5, -0.2}}};
    WeightTable t = build_perk_schultz(q, r);
    // equal values: the pair behaves like the unit-ratio point, b vanishes
    CHECK(std::abs(t.weight("xi1", "xi2", WeightKind::b(1, 2))) < 1e-12);
    CHECK(all_pass(check_unitarity_weights(t, "xi1", "xi2")));
    CHECK(all_pass(check_yb_weights(t, "xi1", "xi2", "xi3")));
}

TEST_CASE("free fermion table is accepted and satisfies unitarity") {
    WeightTable t = build_free_fermion(valued(17, 3));
    nlohmann::json doc = export_table(t);
    WeightTable back = import_custom(doc);
    CHECK(back.rank() == 2);
    for (const auto& x : back.labels())
        for (const auto& y : back.labels())
            CHECK(worst_relative(check_unitarity_weights(back, x, y)) < 1e-12);
}

TEST_CASE("document round trip is bit identical") {
    WeightTable t = dp_table(23, 3, 1);
    nlohmann::json doc = export_table(t);
    std::string text = doc.dump();
    WeightTable back = import_custom(nlohmann::json::parse(text));
    for (const auto& x : t.labels())
        for (const auto& y : t.labels())
            for (const auto& k : WeightKind::all(3)) {
                cplx a = t.weight(x, y, k), b = back.weight(x, y, k);
                CHECK(a.real() == b.real());
                CHECK(a.imag() == b.imag());
            }
    CHECK(export_table(back).dump() == text);
}

TEST_CASE("import rejects incomplete and malformed documents") {
    WeightTable t = dp_table(29, 2);
    nlohmann::json doc = export_table(t);
    nlohmann::json pruned = doc;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : doc["entries"])
        if (!(e["kind"] == "c21" && e["pair"][0] == "xi1" && e["pair"][1] == "xi2"))
            entries.push_back(e);
    pruned["entries"] = entries;
    CHECK_THROWS_WITH_AS(import_custom(pruned), doctest::Contains("c21"), Error);
    CHECK_THROWS_AS(import_custom(nlohmann::json{{"rank", 3}}), Error);
    nlohmann::json bad = doc;
    bad["rank"] = 1;
    CHECK_THROWS_AS(import_custom(bad), Error);
}

TEST_CASE("restriction to the first two states keeps the six vertex relations") {
    WeightTable t = dp_table(77, 3);
    WeightTable r2 = t.restrict_rank(2);
    CHECK(r2.rank() == 2);
    CHECK(all_pass(check_unitarity_weights(r2, "xi1", "xi2")));
    CHECK(all_pass(check_yb_weights(r2, "xi1", "xi2", "xi3")));
}
