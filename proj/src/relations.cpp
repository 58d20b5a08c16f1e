#include "relations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "monodromy.hpp"
#include "tensor.hpp"

namespace fbasis {

ResidualReport make_report(std::string relation, std::vector<std::string> rapidities,
                           double absolute, double term_scale, double tol) {
    ResidualReport r;
    r.relation = std::move(relation);
    r.rapidities = std::move(rapidities);
    r.absolute = absolute;
    r.relative = term_scale > 0 ? absolute / term_scale : 0.0;
    r.tolerance = tol;
    r.pass = r.relative <= tol;
    return r;
}

bool all_pass(const std::vector<ResidualReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

double worst_relative(const std::vector<ResidualReport>& reports) {
    double w = 0;
    for (const auto& r : reports)
        w = std::max(w, r.relative);
    return w;
}

nlohmann::json reports_to_json(const std::vector<ResidualReport>& reports) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : reports)
        out.push_back({{"relation", r.relation},
                       {"rapidities", r.rapidities},
                       {"absolute", r.absolute},
                       {"relative", r.relative},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass}});
    return out;
}

std::string reports_to_csv(const std::vector<ResidualReport>& reports) {
    std::ostringstream os;
    os.precision(17);
    os << "relation,rapidities,absolute,relative,tolerance,pass\n";
    for (const auto& r : reports) {
        os << "\"" << r.relation << "\",\"";
        for (std::size_t i = 0; i < r.rapidities.size(); ++i)
            os << (i ? " " : "") << r.rapidities[i];
        os << "\"," << r.absolute << "," << r.relative << "," << r.tolerance << ","
           << (r.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

namespace {

struct RelationAccum {
    std::vector<ResidualReport>& out;
    double tol;

    // residual of sum(lhs) - sum(rhs), scaled by the largest term magnitude
    void operator()(const std::string& id, const std::vector<std::string>& raps,
                    std::initializer_list<cplx> lhs, std::initializer_list<cplx> rhs) {
        cplx L{}, R{};
        double scale = 0;
        for (cplx t : lhs) {
            L += t;
            scale = std::max(scale, std::abs(t));
        }
        for (cplx t : rhs) {
            R += t;
            scale = std::max(scale, std::abs(t));
        }
        out.push_back(make_report(id, raps, std::abs(L - R), scale, tol));
    }
};

std::string idx(std::initializer_list<int> is) {
    std::string s = ":{";
    bool first = true;
    for (int i : is) {
        if (!first)
            s += ",";
        s += std::to_string(i);
        first = false;
    }
    return s + "}";
}

} // namespace

std::vector<ResidualReport> check_unitarity_weights(const WeightTable& table, const std::string& x,
                                                    const std::string& y, double tol) {
    std::vector<ResidualReport> out;
    RelationAccum rel{out, tol};
    const int n = table.rank();
    auto w = [&](const std::string& p, const std::string& q, WeightKind k) {
        return table.weight(p, q, k);
    };
    for (int i = 1; i <= n; ++i)
        rel("unitarity.a" + idx({i}), {x, y},
            {w(x, y, WeightKind::a(i)) * w(y, x, WeightKind::a(i))}, {cplx{1.0}});
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            if (i == j)
                continue;
            rel("unitarity.b" + idx({i, j}), {x, y},
                {w(x, y, WeightKind::b(i, j)) * w(y, x, WeightKind::b(j, i)),
                 w(x, y, WeightKind::c(i, j)) * w(y, x, WeightKind::c(i, j))},
                {cplx{1.0}});
            rel("unitarity.c" + idx({i, j}), {x, y},
                {w(x, y, WeightKind::b(i, j)) * w(y, x, WeightKind::c(j, i)),
                 w(x, y, WeightKind::c(i, j)) * w(y, x, WeightKind::b(i, j))},
                {cplx{0.0}});
        }
    return out;
}

std::vector<ResidualReport> check_yb_weights(const WeightTable& table, const std::string& x,
                                             const std::string& y, const std::string& z,
                                             double tol) {
    std::vector<ResidualReport> out;
    RelationAccum rel{out, tol};
    const int n = table.rank();
    auto a = [&](int i, const std::string& p, const std::string& q) {
        return table.weight(p, q, WeightKind::a(i));
    };
    auto b = [&](int i, int j, const std::string& p, const std::string& q) {
        return table.weight(p, q, WeightKind::b(i, j));
    };
    auto c = [&](int i, int j, const std::string& p, const std::string& q) {
        return table.weight(p, q, WeightKind::c(i, j));
    };
    const std::vector<std::string> raps{x, y, z};
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            if (i == j)
                continue;
            rel("yb.eq10" + idx({i, j}), raps,
                {c(i, j, x, y) * c(j, i, x, z) * c(i, j, y, z)},
                {c(j, i, x, y) * c(i, j, x, z) * c(j, i, y, z)});
            rel("yb.eq13" + idx({i, j}), raps,
                {b(i, j, x, y) * a(i, x, z) * c(i, j, y, z),
                 c(j, i, x, y) * c(i, j, x, z) * b(i, j, y, z)},
                {a(i, x, y) * b(i, j, x, z) * c(i, j, y, z)});
            rel("yb.eq14" + idx({i, j}), raps,
                {b(i, j, x, y) * a(i, x, z) * c(j, i, y, z),
                 c(i, j, x, y) * c(j, i, x, z) * b(i, j, y, z)},
                {a(i, x, y) * b(i, j, x, z) * c(j, i, y, z)});
            rel("yb.eq15" + idx({i, j}), raps,
                {b(j, i, x, y) * c(i, j, x, z) * b(i, j, y, z),
                 c(i, j, x, y) * a(i, x, z) * c(i, j, y, z)},
                {a(i, x, y) * c(i, j, x, z) * a(i, y, z)});
            rel("yb.eq16" + idx({i, j}), raps,
                {b(i, j, x, y) * c(i, j, x, z) * b(j, i, y, z),
                 c(i, j, x, y) * a(j, x, z) * c(i, j, y, z)},
                {a(j, x, y) * c(i, j, x, z) * a(j, y, z)});
            rel("yb.eq17" + idx({i, j}), raps,
                {c(i, j, x, y) * a(i, x, z) * b(j, i, y, z),
                 b(j, i, x, y) * c(i, j, x, z) * c(j, i, y, z)},
                {c(i, j, x, y) * b(j, i, x, z) * a(i, y, z)});
            rel("yb.eq18" + idx({i, j}), raps,
                {c(i, j, x, y) * a(j, x, z) * b(i, j, y, z),
                 b(i, j, x, y) * c(i, j, x, z) * c(j, i, y, z)},
                {c(i, j, x, y) * b(i, j, x, z) * a(j, y, z)});
        }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                if (i == j || j == k || i == k)
                    continue;
                rel("yb.eq11" + idx({i, j, k}), raps,
                    {b(i, j, x, y) * b(i, k, x, z)}, {b(i, k, x, y) * b(i, j, x, z)});
                rel("yb.eq12" + idx({i, j, k}), raps,
                    {b(j, k, x, z) * b(i, k, y, z)}, {b(i, k, x, z) * b(j, k, y, z)});
                rel("yb.eq19" + idx({i, j, k}), raps,
                    {c(i, j, x, y) * c(j, k, x, z) * b(i, j, y, z),
                     b(i, j, x, y) * c(i, k, x, z) * c(j, i, y, z)},
                    {c(i, k, x, y) * b(i, j, x, z) * c(j, k, y, z)});
                rel("yb.eq20" + idx({i, j, k}), raps,
                    {c(k, j, x, y) * c(i, k, x, z) * b(j, k, y, z),
                     b(j, k, x, y) * c(i, j, x, z) * c(j, k, y, z)},
                    {c(i, j, x, y) * b(j, k, x, z) * c(i, k, y, z)});
                rel("yb.eq21" + idx({i, j, k}), raps,
                    {b(i, j, x, y) * c(i, k, x, z) * b(j, i, y, z),
                     c(i, j, x, y) * c(j, k, x, z) * c(i, j, y, z)},
                    {b(k, j, x, y) * c(i, k, x, z) * b(j, k, y, z),
                     c(j, k, x, y) * c(i, j, x, z) * c(j, k, y, z)});
            }
    return out;
}

std::vector<ResidualReport> check_matrix_relations(const WeightTable& table,
                                                   const RapiditySet& rapidities, double tol) {
    std::vector<ResidualReport> out;
    const int n = table.rank();
    const auto& xs = rapidities.inhomogeneities;
    if (xs.size() >= 2) {
        Dims d2{n, 2};
        for (const auto& x : xs)
            for (const auto& y : xs) {
                if (x == y)
                    continue;
                TensorOperator prod = embed_r(table, 1, 2, x, y, d2) * embed_r(table, 2, 1, y, x, d2);
                double diff = max_abs_diff(prod, TensorOperator::identity(d2));
                out.push_back(make_report("matrix.unitarity", {x, y}, diff,
                                          std::max(prod.max_abs(), 1.0), tol));
            }
        Dims d2u{n, 2};
        const std::string &x = xs[0], &y = xs[1];
        TensorOperator r = embed_r(table, 1, 2, x, y, d2u);
        for (int i = 1; i < n; ++i) {
            TensorOperator sz = total_sz(i, d2u);
            double diff = max_abs_diff(r * sz, sz * r);
            out.push_back(make_report("matrix.u1" + idx({i}), {x, y}, diff,
                                      std::max(r.max_abs() * sz.max_abs(), 1.0), tol));
        }
    }
    if (xs.size() >= 3) {
        Dims d3{n, 3};
        const std::string &x = xs[0], &y = xs[1], &z = xs[2];
        TensorOperator lhs = embed_r(table, 1, 2, x, y, d3) * embed_r(table, 1, 3, x, z, d3) *
                             embed_r(table, 2, 3, y, z, d3);
        TensorOperator rhs = embed_r(table, 2, 3, y, z, d3) * embed_r(table, 1, 3, x, z, d3) *
                             embed_r(table, 1, 2, x, y, d3);
        out.push_back(make_report("matrix.yb", {x, y, z}, max_abs_diff(lhs, rhs),
                                  std::max({lhs.max_abs(), rhs.max_abs(), 1e-300}), tol));
    }
    if (rapidities.auxiliaries.size() >= 2 && !xs.empty()) {
        const std::string &mu = rapidities.auxiliaries[0], &nu = rapidities.auxiliaries[1];
        auto [abs_res, scale] = yang_baxter_algebra_residual(table, mu, nu, xs);
        out.push_back(make_report("matrix.yb_algebra", {mu, nu}, abs_res, scale, tol));
    }
    return out;
}

namespace {

struct FormValue {
    cplx value;
    double scale;  // largest constituent term magnitude
};

// the ten invariant forms evaluated on one ordered pair, given delta_1
std::vector<std::pair<std::string, FormValue>> invariant_forms(const WeightTable& t,
                                                               const std::string& x,
                                                               const std::string& y, cplx d1) {
    auto w = [&](const char* k) { return t.weight(x, y, WeightKind::parse(k)); };
    auto ratio = [](cplx num, cplx den) { return FormValue{num / den, std::abs(num / den)}; };
    auto comb = [](std::initializer_list<cplx> nums, cplx den) {
        cplx s{};
        double sc = 0;
        for (cplx v : nums) {
            s += v;
            sc = std::max(sc, std::abs(v));
        }
        return FormValue{s / den, sc / std::abs(den)};
    };
    std::vector<std::pair<std::string, FormValue>> out;
    out.emplace_back("delta1", ratio(w("b32"), w("b12")));
    out.emplace_back("delta2", ratio(w("b31"), w("b21")));
    out.emplace_back("delta3", ratio(w("b13"), w("b23")));
    out.emplace_back("delta4", comb({w("a1") * w("a2"), w("b12") * w("b21"), -w("c12") * w("c21")},
                                    w("a1") * w("b12")));
    out.emplace_back("delta5",
                     comb({w("a3") * w("a2"), d1 * w("b12") * w("b23"), -w("c23") * w("c32")},
                          w("a3") * w("b12")));
    out.emplace_back("delta6", comb({d1 * w("a1") * w("b23"), -w("a3") * w("b21")},
                                    w("b23") * w("b21")));
    out.emplace_back("delta7", comb({d1 * w("a1") * w("c23"), -d1 * w("c13") * w("c21")},
                                    w("c23") * w("b21")));
    out.emplace_back("delta8",
                     comb({d1 * w("a1") * w("c12") * w("b23"), -w("c13") * w("b21") * w("c32")},
                          w("c12") * w("b23") * w("b21")));
    out.emplace_back("delta9", comb({d1 * w("a1") * w("c32"), -d1 * w("c12") * w("c31")},
                                    w("b21") * w("c32")));
    out.emplace_back("delta10",
                     comb({d1 * w("a1") * w("b23") * w("c21"), -w("c23") * w("b21") * w("c31")},
                          w("b23") * w("b21") * w("c21")));
    out.emplace_back("branchA12.a", ratio(w("a2") * w("b21"), w("a1") * w("b12")));
    out.emplace_back("branchA12.b", ratio(d1 * w("a2") * w("b23"), w("a3") * w("b12")));
    return out;
}

} // namespace

std::vector<ResidualReport> check_algebraic_invariants(const WeightTable& table, double tol) {
    if (table.rank() != 3)
        raise(errc::rank_mismatch, "invariant checks apply to rank 3 tables");
    const auto& labels = table.labels();
    if (labels.size() < 3)
        raise(errc::insufficient_rapidities,
              "invariant constancy needs at least three registered rapidities");
    std::vector<ResidualReport> out;
    // invariants hold across the first argument; the second argument plays
    // the reference rapidity of the parameterization
    for (const auto& y : labels) {
        std::vector<std::string> xs;
        for (const auto& x : labels)
            if (x != y)
                xs.push_back(x);
        cplx d1 = table.weight(xs[0], y, WeightKind::b(3, 2)) /
                  table.weight(xs[0], y, WeightKind::b(1, 2));
        std::vector<std::vector<std::pair<std::string, FormValue>>> forms;
        for (const auto& x : xs)
            forms.push_back(invariant_forms(table, x, y, d1));
        for (std::size_t k = 0; k < forms[0].size(); ++k) {
            double spread = 0, scale = 0;
            for (const auto& f : forms) {
                spread = std::max(spread, std::abs(f[k].second.value - forms[0][k].second.value));
                scale = std::max(scale, f[k].second.scale);
            }
            out.push_back(make_report("invariant.const." + forms[0][k].first, {y}, spread,
                                      std::max(scale, 1e-300), tol));
        }
        auto get = [&](const char* name) {
            for (const auto& [nm, fv] : forms[0])
                if (nm == std::string(name))
                    return fv.value;
            raise(errc::internal, "unknown invariant form");
        };
        cplx d2 = get("delta2"), d3 = get("delta3"), d4 = get("delta4"), d5 = get("delta5");
        cplx d6 = get("delta6"), d7 = get("delta7"), d8 = get("delta8"), d9 = get("delta9");
        cplx d10 = get("delta10");
        auto close = [&](const std::string& id, cplx lhs, cplx rhs, double scale) {
            out.push_back(make_report("invariant.branch." + id, {y}, std::abs(lhs - rhs),
                                      std::max(scale, 1e-300), tol));
        };
        double sc = std::max({std::abs(d4), std::abs(d7), std::abs(d1), 1.0});
        close("delta3", d3, d7 * d7 / (d2 * (d4 * d7 - d1)), sc);
        close("delta5_eq_delta4", d5, d4, sc);
        close("delta6_zero", d6, cplx{}, sc);
        close("delta8_eq_delta7", d8, d7, sc);
        close("delta9_eq_delta10", d9, d10, sc);
        close("delta9", d9, d1 * d7 / (d4 * d7 - d1), sc);
        close("A12.a", get("branchA12.a"), d1 * (d4 * d7 - d1) / (d7 * d7), sc);
        close("A12.b", get("branchA12.b"), d1 * (d4 * d7 - d1) / (d7 * d7), sc);
    }
    return out;
}

} // namespace fbasis
