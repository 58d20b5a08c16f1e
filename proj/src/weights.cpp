#include "weights.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rng.hpp"

namespace fbasis {

WeightKind WeightKind::parse(const std::string& s) {
    if (s.size() < 2 || s.size() > 3)
        raise(errc::unknown_kind, "unknown weight kind '" + s + "'");
    char cls = s[0];
    if (cls != 'a' && cls != 'b' && cls != 'c')
        raise(errc::unknown_kind, "unknown weight kind '" + s + "'");
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] < '1' || s[k] > '9')
            raise(errc::unknown_kind, "unknown weight kind '" + s + "'");
    if (cls == 'a') {
        if (s.size() != 2)
            raise(errc::unknown_kind, "unknown weight kind '" + s + "'");
        return a(s[1] - '0');
    }
    if (s.size() != 3)
        raise(errc::unknown_kind, "unknown weight kind '" + s + "'");
    int i = s[1] - '0', j = s[2] - '0';
    if (i == j)
        raise(errc::unknown_kind, "kind '" + s + "' requires distinct indices");
    return {cls, i, j};
}

std::string WeightKind::str() const {
    std::string s(1, cls);
    s += static_cast<char>('0' + i);
    if (cls != 'a')
        s += static_cast<char>('0' + j);
    return s;
}

bool WeightKind::valid_for_rank(int n) const {
    if (i < 1 || i > n)
        return false;
    if (cls == 'a')
        return true;
    return j >= 1 && j <= n && j != i;
}

int WeightKind::index(int n) const {
    auto off = [n](int i, int j) { return (i - 1) * (n - 1) + (j - 1) - (j > i ? 1 : 0); };
    if (cls == 'a')
        return i - 1;
    if (cls == 'b')
        return n + off(i, j);
    return n + n * (n - 1) + off(i, j);
}

std::vector<WeightKind> WeightKind::all(int n) {
    std::vector<WeightKind> out;
    out.reserve(count(n));
    for (int i = 1; i <= n; ++i)
        out.push_back(a(i));
    for (char cls : {'b', 'c'})
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                if (i != j)
                    out.push_back({cls, i, j});
    return out;
}

std::vector<std::string> RapiditySet::all() const {
    std::vector<std::string> out = inhomogeneities;
    out.insert(out.end(), auxiliaries.begin(), auxiliaries.end());
    return out;
}

WeightTable::WeightTable(int rank, std::vector<std::string> labels)
    : rank_(rank), labels_(std::move(labels)) {
    if (rank_ < 2)
        raise(errc::rank_mismatch, "model rank must be >= 2");
    for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
        if (index_.count(labels_[i]))
            raise(errc::config, "duplicate rapidity label '" + labels_[i] + "'");
        index_[labels_[i]] = i;
    }
    values_.assign(labels_.size(), cplx{});
    const std::size_t n_pairs = labels_.size() * labels_.size();
    entries_.assign(n_pairs * WeightKind::count(rank_), cplx{});
    present_.assign(n_pairs * WeightKind::count(rank_), 0);
}

int WeightTable::label_index(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

cplx WeightTable::value_of(const std::string& label) const {
    int i = label_index(label);
    if (i < 0)
        raise(errc::unknown_pair, "unknown rapidity label '" + label + "'");
    return values_[i];
}

void WeightTable::set_value(const std::string& label, cplx v) {
    int i = label_index(label);
    if (i < 0)
        raise(errc::unknown_pair, "unknown rapidity label '" + label + "'");
    values_[i] = v;
}

void WeightTable::set(const std::string& x, const std::string& y, const WeightKind& k, cplx v) {
    int ix = label_index(x), iy = label_index(y);
    if (ix < 0 || iy < 0)
        raise(errc::unknown_pair, "pair (" + x + ", " + y + ") not registered");
    if (!k.valid_for_rank(rank_))
        raise(errc::unknown_kind, "kind '" + k.str() + "' invalid for rank " + std::to_string(rank_));
    std::size_t at = static_cast<std::size_t>(pair_id(ix, iy)) * WeightKind::count(rank_) + k.index(rank_);
    entries_[at] = v;
    present_[at] = 1;
}

cplx WeightTable::weight(int ix, int iy, const WeightKind& k) const {
    if (!k.valid_for_rank(rank_))
        raise(errc::unknown_kind, "kind '" + k.str() + "' invalid for rank " + std::to_string(rank_));
    std::size_t at = static_cast<std::size_t>(pair_id(ix, iy)) * WeightKind::count(rank_) + k.index(rank_);
    if (!present_[at])
        raise(errc::missing_entry, "entry " + k.str() + " missing for pair (" + labels_[ix] + ", " + labels_[iy] + ")");
    return entries_[at];
}

cplx WeightTable::weight(const std::string& x, const std::string& y, const WeightKind& k) const {
    int ix = label_index(x), iy = label_index(y);
    if (ix < 0 || iy < 0)
        raise(errc::unknown_pair, "pair (" + x + ", " + y + ") not registered");
    return weight(ix, iy, k);
}

bool WeightTable::pair_complete(int ix, int iy) const {
    std::size_t base = static_cast<std::size_t>(pair_id(ix, iy)) * WeightKind::count(rank_);
    for (int k = 0; k < WeightKind::count(rank_); ++k)
        if (!present_[base + k])
            return false;
    return true;
}

void WeightTable::require_complete() const {
    for (int ix = 0; ix < static_cast<int>(labels_.size()); ++ix)
        for (int iy = 0; iy < static_cast<int>(labels_.size()); ++iy) {
            std::size_t base = static_cast<std::size_t>(pair_id(ix, iy)) * WeightKind::count(rank_);
            for (const auto& k : WeightKind::all(rank_))
                if (!present_[base + k.index(rank_)])
                    raise(errc::missing_entry, "entry " + k.str() + " missing for pair (" +
                                                   labels_[ix] + ", " + labels_[iy] + ")");
        }
}

WeightTable WeightTable::restrict_rank(int m) const {
    if (m < 2 || m > rank_)
        raise(errc::rank_mismatch, "cannot restrict rank " + std::to_string(rank_) + " to " + std::to_string(m));
    WeightTable out(m, labels_);
    out.values_ = values_;
    for (int ix = 0; ix < static_cast<int>(labels_.size()); ++ix)
        for (int iy = 0; iy < static_cast<int>(labels_.size()); ++iy)
            for (const auto& k : WeightKind::all(m))
                out.set(labels_[ix], labels_[iy], k, weight(ix, iy, k));
    return out;
}

DelPezzoParams sample_del_pezzo_params(std::uint64_t seed, const std::vector<std::string>& labels) {
    SplitMix64 rng(seed);
    DelPezzoParams p;
    p.delta_cap1 = rng.annulus();
    p.delta_cap2 = rng.annulus();
    p.delta1 = rng.annulus();
    p.delta2 = rng.annulus();
    for (const auto& lab : labels) {
        DelPezzoParams::Site s;
        s.a = rng.annulus();
        s.b_bar = rng.annulus();
        s.c = rng.annulus();
        s.c_bar = rng.annulus();
        s.h1 = rng.annulus();
        s.h2 = rng.annulus();
        p.sites[lab] = s;
    }
    return p;
}

namespace {

void screen(cplx v, const std::string& what) {
    if (std::abs(v) < eps_singular)
        raise(errc::singular_parameter, what + " below singularity threshold");
}

// the 14 weight ratios relative to c12 for an ordered pair, plus c12 = 1
std::map<std::string, cplx> pair_ratios(const DelPezzoParams::Site& s1, const DelPezzoParams::Site& s2,
                                        cplx D1, cplx D2, cplx d1, cplx d2) {
    cplx g1 = s1.a - D1 * s1.b_bar;
    cplx g2 = s2.a - D1 * s2.b_bar;
    cplx f1 = (D1 * D2 - 1.0) * s1.a - D1 * s1.b_bar;
    cplx f2 = (D1 * D2 - 1.0) * s2.a - D1 * s2.b_bar;
    cplx W = s2.a * s1.b_bar - s1.a * s2.b_bar;
    cplx S = (D1 * D2 - 1.0) * s1.a * s2.a - D1 * D1 * s2.b_bar * (D2 * s1.a - s1.b_bar);
    std::map<std::string, cplx> r;
    r["a1"] = (s2.c / s1.c) * S / (g2 * f2);
    r["b12"] = D1 * D1 * (D1 * D2 - 1.0) * s2.c * s1.c_bar * W / (g1 * g2 * f1 * f2);
    r["b13"] = (D1 * D1 * (D1 * D2 - 1.0) * s2.c * s1.h1 * s1.h2 / (d2 * s1.c * s1.c_bar)) * W / (g2 * f1 * f2);
    r["b21"] = W / (s1.c * s2.c_bar);
    r["a2"] = (s1.c_bar / s2.c_bar) * S / (g1 * f1);
    r["b23"] = ((D1 * D2 - 1.0) * s1.h1 * s1.h2 / (d1 * s1.c * s1.c_bar * s2.c_bar)) * W / f1;
    r["c13"] = (s2.c * s2.c_bar * s1.h1 / (s1.c * s1.c_bar * s2.h1)) * g1 / g2;
    r["c21"] = s2.c * s1.c_bar / (s1.c * s2.c_bar);
    r["c23"] = s2.c * s1.h1 / (s1.c * s2.h1);
    r["c31"] = s2.c * s1.h2 / (s1.c * s2.h2);
    r["b31"] = (d2 * s2.c * s2.c_bar / (s2.h1 * s1.c * s2.h2)) * W / g2;
    r["c32"] = (s1.h2 / s2.h2) * f2 / f1;
    r["b32"] = (D1 * D1 * d1 * s2.c * s1.c_bar * s2.c_bar / (s2.h1 * s2.h2)) * W / (f1 * g1 * g2);
    r["a3"] = (s1.h1 * s2.c * s2.c_bar * s1.h2 / (s2.h1 * s1.c * s1.c_bar * s2.h2)) * S / (f1 * g2);
    r["c12"] = 1.0;
    return r;
}

WeightTable table_from_sites(const std::map<std::string, DelPezzoParams::Site>& sites,
                             cplx D1, cplx D2, cplx d1, cplx d2, const RapiditySet& rapidities) {
    screen(D1, "constant Delta_1");
    screen(d1, "constant delta_1");
    screen(d2, "constant delta_2");
    std::vector<std::string> labels = rapidities.all();
    for (const auto& lab : labels) {
        auto it = sites.find(lab);
        if (it == sites.end())
            raise(errc::config, "no free variables for rapidity '" + lab + "'");
        const auto& s = it->second;
        screen(s.c, "c(" + lab + ")");
        screen(s.c_bar, "cbar(" + lab + ")");
        screen(s.h1, "h1(" + lab + ")");
        screen(s.h2, "h2(" + lab + ")");
        screen(s.a - D1 * s.b_bar, "a - Delta_1*bbar at " + lab);
        screen((D1 * D2 - 1.0) * s.a - D1 * s.b_bar, "(Delta_1*Delta_2-1)a - Delta_1*bbar at " + lab);
        // linear-in-b coefficient of the hypersurface
        cplx K = ((D1 * D2 - 1.0) / (D1 * D1)) * s.a * s.a - D2 * s.a * s.b_bar + s.b_bar * s.b_bar;
        screen(K, "hypersurface coefficient of b at " + lab);
    }

    WeightTable tab(3, labels);
    for (const auto& [lab, val] : rapidities.values)
        if (tab.has_label(lab))
            tab.set_value(lab, val);

    const int n_lab = static_cast<int>(labels.size());
    std::vector<std::map<std::string, cplx>> ratios(static_cast<std::size_t>(n_lab) * n_lab);
    for (int ix = 0; ix < n_lab; ++ix)
        for (int iy = 0; iy < n_lab; ++iy)
            ratios[ix * n_lab + iy] =
                pair_ratios(sites.at(labels[ix]), sites.at(labels[iy]), D1, D2, d1, d2);

    // normalization of c12: pairs with ix <= iy keep c12 = 1; the reversed
    // pair is scaled so that the a1 unitarity relation holds exactly
    for (int ix = 0; ix < n_lab; ++ix)
        for (int iy = 0; iy < n_lab; ++iy) {
            cplx c12 = 1.0;
            if (ix > iy) {
                cplx prod = ratios[ix * n_lab + iy]["a1"] * ratios[iy * n_lab + ix]["a1"];
                screen(prod, "a1 ratio product for (" + labels[ix] + ", " + labels[iy] + ")");
                c12 = 1.0 / prod;
            }
            for (const auto& [kind, ratio] : ratios[ix * n_lab + iy])
                tab.set(labels[ix], labels[iy], WeightKind::parse(kind), ratio * c12);
        }
    return tab;
}

} // namespace

WeightTable build_del_pezzo(const DelPezzoParams& params, const RapiditySet& rapidities) {
    return table_from_sites(params.sites, params.delta_cap1, params.delta_cap2, params.delta1,
                            params.delta2, rapidities);
}

WeightTable build_perk_schultz(cplx q, const RapiditySet& rapidities) {
    screen(q, "q");
    screen(q * q - 1.0, "q^2 - 1");
    std::map<std::string, DelPezzoParams::Site> sites;
    RapiditySet rap = rapidities;
    for (const auto& lab : rapidities.all()) {
        auto it = rapidities.values.find(lab);
        if (it == rapidities.values.end())
            raise(errc::config, "Perk-Schultz requires a value for rapidity '" + lab + "'");
        cplx xi = it->second;
        screen(xi, "xi(" + lab + ")");
        screen(xi * xi - q * q, "xi^2 - q^2 at " + lab);
        DelPezzoParams::Site s;
        s.a = 1.0;
        s.b_bar = q * (xi * xi - 1.0) / (xi * xi - q * q);
        s.c = xi * (q * q - 1.0) / (q * q - xi * xi);
        s.c_bar = s.c;
        s.h1 = s.c;
        s.h2 = s.c / xi;
        sites[lab] = s;
    }
    return table_from_sites(sites, q, q + 1.0 / q, 1.0, 1.0, rap);
}

WeightTable build_six_vertex(cplx eta, const RapiditySet& rapidities) {
    std::vector<std::string> labels = rapidities.all();
    WeightTable tab(2, labels);
    for (const auto& x : labels) {
        cplx vx = rapidities.values.at(x);
        tab.set_value(x, vx);
        for (const auto& y : labels) {
            cplx u = vx - rapidities.values.at(y);
            cplx den = std::sin(u + eta);
            screen(den, "sin(u + eta) for (" + x + ", " + y + ")");
            cplx b = std::sin(u) / den, c = std::sin(eta) / den;
            tab.set(x, y, WeightKind::a(1), 1.0);
            tab.set(x, y, WeightKind::a(2), 1.0);
            tab.set(x, y, WeightKind::b(1, 2), b);
            tab.set(x, y, WeightKind::b(2, 1), b);
            tab.set(x, y, WeightKind::c(1, 2), c);
            tab.set(x, y, WeightKind::c(2, 1), c);
        }
    }
    return tab;
}

WeightTable build_free_fermion(const RapiditySet& rapidities) {
    std::vector<std::string> labels = rapidities.all();
    WeightTable tab(2, labels);
    for (const auto& x : labels) {
        cplx vx = rapidities.values.at(x);
        tab.set_value(x, vx);
        for (const auto& y : labels) {
            cplx u = vx - rapidities.values.at(y);
            tab.set(x, y, WeightKind::a(1), 1.0);
            tab.set(x, y, WeightKind::a(2), 1.0);
            tab.set(x, y, WeightKind::b(1, 2), std::sinh(u));
            tab.set(x, y, WeightKind::b(2, 1), std::sinh(u));
            tab.set(x, y, WeightKind::c(1, 2), std::cosh(u));
            tab.set(x, y, WeightKind::c(2, 1), std::cosh(u));
        }
    }
    return tab;
}

namespace {

cplx json_complex(const nlohmann::json& v, const char* what) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        raise(errc::malformed_document, std::string(what) + " must be a [re, im] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

} // namespace

WeightTable import_custom(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("rank") || !doc.contains("rapidities") || !doc.contains("entries"))
        raise(errc::malformed_document, "table document needs 'rank', 'rapidities' and 'entries'");
    if (!doc["rank"].is_number_integer())
        raise(errc::malformed_document, "'rank' must be an integer");
    int rank = doc["rank"].get<int>();
    if (rank < 2 || rank > 9)
        raise(errc::rank_mismatch, "rank must be in [2, 9]");
    if (!doc["rapidities"].is_object())
        raise(errc::malformed_document, "'rapidities' must map labels to [re, im] values");
    if (!doc["entries"].is_array())
        raise(errc::malformed_document, "'entries' must be a list");
    // registration order comes from first appearance in the entry list, so a
    // round trip reproduces the document byte for byte
    std::vector<std::string> labels;
    for (const auto& e : doc["entries"]) {
        if (!e.is_object() || !e.contains("pair") || !e["pair"].is_array() || e["pair"].size() != 2 ||
            !e["pair"][0].is_string())
            continue;
        std::string lab = e["pair"][0].get<std::string>();
        if (std::find(labels.begin(), labels.end(), lab) == labels.end())
            labels.push_back(lab);
    }
    for (const auto& [lab, v] : doc["rapidities"].items())
        if (std::find(labels.begin(), labels.end(), lab) == labels.end())
            labels.push_back(lab);
    WeightTable tab(rank, labels);
    for (const auto& [lab, v] : doc["rapidities"].items())
        tab.set_value(lab, json_complex(v, "rapidity value"));
    for (const auto& e : doc["entries"]) {
        if (!e.is_object() || !e.contains("pair") || !e.contains("kind") || !e.contains("value"))
            raise(errc::malformed_document, "entry needs 'pair', 'kind' and 'value'");
        const auto& pr = e["pair"];
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
            raise(errc::malformed_document, "'pair' must be [label, label]");
        WeightKind k = WeightKind::parse(e["kind"].get<std::string>());
        tab.set(pr[0].get<std::string>(), pr[1].get<std::string>(), k, json_complex(e["value"], "weight value"));
    }
    tab.require_complete();
    return tab;
}

nlohmann::json export_table(const WeightTable& table) {
    nlohmann::json doc;
    doc["rank"] = table.rank();
    nlohmann::json raps = nlohmann::json::object();
    for (const auto& lab : table.labels()) {
        cplx v = table.value_of(lab);
        raps[lab] = {v.real(), v.imag()};
    }
    doc["rapidities"] = raps;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& x : table.labels())
        for (const auto& y : table.labels())
            for (const auto& k : WeightKind::all(table.rank())) {
                cplx v = table.weight(x, y, k);
                entries.push_back({{"pair", {x, y}}, {"kind", k.str()}, {"value", {v.real(), v.imag()}}});
            }
    doc["entries"] = entries;
    return doc;
}

} // namespace fbasis
