#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace fbasis {

namespace {
constexpr double kDropRel = 1e-14;
constexpr double kDenseFill = 0.25;

int stride_of(int site, Dims dims) {
    int s = 1;
    for (int k = site; k < dims.l; ++k)
        s *= dims.n;
    return s;
}
} // namespace

int mi_digit(int code, int site, Dims dims) {
    return (code / stride_of(site, dims)) % dims.n + 1;
}

int mi_with_digit(int code, int site, int digit, Dims dims) {
    int s = stride_of(site, dims);
    return code + (digit - mi_digit(code, site, dims)) * s;
}

int mi_swap(int code, int site_a, int site_b, Dims dims) {
    int da = mi_digit(code, site_a, dims), db = mi_digit(code, site_b, dims);
    return mi_with_digit(mi_with_digit(code, site_a, db, dims), site_b, da, dims);
}

std::string mi_str(int code, Dims dims) {
    std::string s(dims.l, '0');
    for (int k = 1; k <= dims.l; ++k)
        s[k - 1] = static_cast<char>('0' + mi_digit(code, k, dims));
    return s;
}

TensorOperator::TensorOperator(Dims dims) : dims_(dims), rows_(dims.dim()) {}

TensorOperator TensorOperator::identity(Dims dims) {
    TensorOperator op(dims);
    for (int r = 0; r < dims.dim(); ++r)
        op.rows_[r].emplace_back(r, cplx{1.0});
    return op;
}

TensorOperator TensorOperator::diagonal(Dims dims, std::span<const cplx> d) {
    if (static_cast<int>(d.size()) != dims.dim())
        raise(errc::dimension_mismatch, "diagonal length does not match dimension");
    TensorOperator op(dims);
    for (int r = 0; r < dims.dim(); ++r)
        if (d[r] != cplx{})
            op.rows_[r].emplace_back(r, d[r]);
    return op;
}

std::size_t TensorOperator::nnz() const {
    if (dense_) {
        std::size_t c = 0;
        for (const auto& v : data_)
            if (v != cplx{})
                ++c;
        return c;
    }
    std::size_t c = 0;
    for (const auto& r : rows_)
        c += r.size();
    return c;
}

double TensorOperator::max_abs() const {
    double m = 0;
    for_each([&](int, int, cplx v) { m = std::max(m, std::abs(v)); });
    return m;
}

cplx TensorOperator::entry(int row, int col) const {
    if (row < 0 || col < 0 || row >= dim() || col >= dim())
        raise(errc::index_out_of_range, "operator entry out of range");
    if (dense_)
        return data_[static_cast<std::size_t>(row) * dim() + col];
    const auto& r = rows_[row];
    auto it = std::lower_bound(r.begin(), r.end(), col,
                               [](const auto& p, int c) { return p.first < c; });
    return (it != r.end() && it->first == col) ? it->second : cplx{};
}

void TensorOperator::set_entry(int row, int col, cplx v) {
    if (row < 0 || col < 0 || row >= dim() || col >= dim())
        raise(errc::index_out_of_range, "operator entry out of range");
    if (dense_) {
        data_[static_cast<std::size_t>(row) * dim() + col] = v;
        return;
    }
    auto& r = rows_[row];
    auto it = std::lower_bound(r.begin(), r.end(), col,
                               [](const auto& p, int c) { return p.first < c; });
    if (it != r.end() && it->first == col)
        it->second = v;
    else
        r.insert(it, {col, v});
}

void TensorOperator::add_entry(int row, int col, cplx v) {
    if (dense_) {
        data_[static_cast<std::size_t>(row) * dim() + col] += v;
        return;
    }
    auto& r = rows_[row];
    auto it = std::lower_bound(r.begin(), r.end(), col,
                               [](const auto& p, int c) { return p.first < c; });
    if (it != r.end() && it->first == col)
        it->second += v;
    else
        r.insert(it, {col, v});
}

void TensorOperator::promote_to_dense() {
    if (dense_)
        return;
    const int d = dim();
    data_.assign(static_cast<std::size_t>(d) * d, cplx{});
    for (int r = 0; r < d; ++r)
        for (const auto& [c, v] : rows_[r])
            data_[static_cast<std::size_t>(r) * d + c] = v;
    rows_.clear();
    dense_ = true;
}

void TensorOperator::compress() {
    const double cut = kDropRel * max_abs();
    const int d = dim();
    if (dense_) {
        for (auto& v : data_)
            if (std::abs(v) < cut)
                v = cplx{};
        return;
    }
    std::size_t kept = 0;
    for (auto& r : rows_) {
        std::erase_if(r, [&](const auto& p) { return std::abs(p.second) < cut; });
        kept += r.size();
    }
    if (static_cast<double>(kept) > kDenseFill * d * d)
        promote_to_dense();
}

TensorOperator TensorOperator::operator*(const TensorOperator& rhs) const {
    if (dims_ != rhs.dims_)
        raise(errc::dimension_mismatch, "operator product dimension mismatch");
    const int d = dim();
    TensorOperator out(dims_);
    // scatter into a dense scratch row; output stays sparse until compress()
    std::vector<cplx> scratch(d, cplx{});
    std::vector<int> touched;
    touched.reserve(64);
    for (int r = 0; r < d; ++r) {
        auto emit = [&](int k, cplx a) {
            if (a == cplx{})
                return;
            if (rhs.dense_) {
                const cplx* row = &rhs.data_[static_cast<std::size_t>(k) * d];
                for (int c = 0; c < d; ++c)
                    if (row[c] != cplx{}) {
                        if (scratch[c] == cplx{})
                            touched.push_back(c);
                        scratch[c] += a * row[c];
                    }
            } else {
                for (const auto& [c, b] : rhs.rows_[k]) {
                    if (scratch[c] == cplx{})
                        touched.push_back(c);
                    scratch[c] += a * b;
                }
            }
        };
        if (dense_) {
            const cplx* row = &data_[static_cast<std::size_t>(r) * d];
            for (int k = 0; k < d; ++k)
                emit(k, row[k]);
        } else {
            for (const auto& [k, a] : rows_[r])
                emit(k, a);
        }
        std::sort(touched.begin(), touched.end());
        auto& orow = out.rows_[r];
        orow.reserve(touched.size());
        for (int c : touched) {
            if (scratch[c] != cplx{})
                orow.emplace_back(c, scratch[c]);
            scratch[c] = cplx{};
        }
        touched.clear();
    }
    out.compress();
    return out;
}

TensorOperator TensorOperator::operator+(const TensorOperator& rhs) const {
    if (dims_ != rhs.dims_)
        raise(errc::dimension_mismatch, "operator sum dimension mismatch");
    TensorOperator out = *this;
    if (!out.dense_ && rhs.dense_)
        out.promote_to_dense();
    rhs.for_each([&](int r, int c, cplx v) { out.add_entry(r, c, v); });
    out.compress();
    return out;
}

TensorOperator TensorOperator::operator-(const TensorOperator& rhs) const {
    return *this + rhs.scaled(-1.0);
}

TensorOperator TensorOperator::scaled(cplx factor) const {
    TensorOperator out = *this;
    if (out.dense_) {
        for (auto& v : out.data_)
            v *= factor;
    } else {
        for (auto& r : out.rows_)
            for (auto& [c, v] : r)
                v *= factor;
    }
    return out;
}

TensorOperator TensorOperator::adjoint() const {
    TensorOperator out(dims_);
    for_each([&](int r, int c, cplx v) { out.add_entry(c, r, std::conj(v)); });
    out.compress();
    return out;
}

std::vector<cplx> TensorOperator::apply(std::span<const cplx> vec) const {
    if (static_cast<int>(vec.size()) != dim())
        raise(errc::dimension_mismatch, "vector length does not match operator dimension");
    std::vector<cplx> out(dim(), cplx{});
    for_each([&](int r, int c, cplx v) { out[r] += v * vec[c]; });
    return out;
}

bool TensorOperator::approx_equal(const TensorOperator& rhs, double rel_tol) const {
    return rel_max_diff(*this, rhs) <= rel_tol;
}

double max_abs_diff(const TensorOperator& a, const TensorOperator& b) {
    if (a.dims() != b.dims())
        raise(errc::dimension_mismatch, "operator comparison dimension mismatch");
    double m = 0;
    a.for_each([&](int r, int c, cplx v) { m = std::max(m, std::abs(v - b.entry(r, c))); });
    b.for_each([&](int r, int c, cplx v) { m = std::max(m, std::abs(v - a.entry(r, c))); });
    return m;
}

double rel_max_diff(const TensorOperator& a, const TensorOperator& b) {
    double scale = std::max({a.max_abs(), b.max_abs(), 1e-300});
    return max_abs_diff(a, b) / scale;
}

TensorOperator weyl(int alpha, int beta, int site, Dims dims) {
    if (alpha < 1 || alpha > dims.n || beta < 1 || beta > dims.n || site < 1 || site > dims.l)
        raise(errc::index_out_of_range, "weyl matrix index out of range");
    TensorOperator op(dims);
    for (int col = 0; col < dims.dim(); ++col)
        if (mi_digit(col, site, dims) == beta)
            op.set_entry(mi_with_digit(col, site, alpha, dims), col, 1.0);
    return op;
}

TensorOperator total_sz(int i, Dims dims) {
    if (i < 1 || i >= dims.n)
        raise(errc::index_out_of_range, "azimuthal generator index out of range");
    TensorOperator op(dims);
    for (int code = 0; code < dims.dim(); ++code) {
        int q = 0;
        for (int k = 1; k <= dims.l; ++k) {
            int d = mi_digit(code, k, dims);
            if (d == i)
                ++q;
            else if (d == i + 1)
                --q;
        }
        if (q != 0)
            op.set_entry(code, code, static_cast<double>(q));
    }
    return op;
}

TensorOperator embed_r(const WeightTable& table, int site_j, int site_k, const std::string& x,
                       const std::string& y, Dims dims) {
    if (site_j == site_k)
        raise(errc::index_out_of_range, "embed_r requires distinct sites");
    if (site_j < 1 || site_j > dims.l || site_k < 1 || site_k > dims.l)
        raise(errc::index_out_of_range, "embed_r site out of range");
    TensorOperator op(dims);
    for (int col = 0; col < dims.dim(); ++col) {
        int s = mi_digit(col, site_j, dims), t = mi_digit(col, site_k, dims);
        if (s == t) {
            op.add_entry(col, col, table.weight(x, y, WeightKind::a(s)));
        } else {
            op.add_entry(col, col, table.weight(x, y, WeightKind::b(s, t)));
            // c_{ts}: |t s> component feeds row |s t> swapped on the pair
            int row = mi_swap(col, site_j, site_k, dims);
            op.add_entry(row, col, table.weight(x, y, WeightKind::c(t, s)));
        }
    }
    op.compress();
    return op;
}

TensorOperator embed_curly_r(const WeightTable& table, int site_j, int site_k, const std::string& x,
                             const std::string& y, Dims dims) {
    if (site_j == site_k)
        raise(errc::index_out_of_range, "embed_curly_r requires distinct sites");
    TensorOperator op(dims);
    for (int col = 0; col < dims.dim(); ++col) {
        int s = mi_digit(col, site_j, dims), t = mi_digit(col, site_k, dims);
        op.set_entry(col, col, s == t ? table.weight(x, y, WeightKind::a(s)) : cplx{1.0});
    }
    return op;
}

bool Permutation::is_identity() const {
    for (int m = 1; m <= size(); ++m)
        if (images[m - 1] != m)
            return false;
    return true;
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images.size());
    for (int m = 1; m <= size(); ++m)
        inv[images[m - 1] - 1] = m;
    return minimal_decomposition(inv);
}

Permutation Permutation::compose(const Permutation& sigma, const Permutation& tau) {
    if (sigma.size() != tau.size())
        raise(errc::dimension_mismatch, "permutation size mismatch");
    std::vector<int> out(sigma.images.size());
    for (int m = 1; m <= sigma.size(); ++m)
        out[m - 1] = sigma(tau(m));
    return minimal_decomposition(out);
}

std::vector<Permutation> Permutation::all(int l) {
    std::vector<int> images(l);
    std::iota(images.begin(), images.end(), 1);
    std::vector<Permutation> out;
    do {
        out.push_back(minimal_decomposition(images));
    } while (std::next_permutation(images.begin(), images.end()));
    return out;
}

Permutation minimal_decomposition(const std::vector<int>& images) {
    const int l = static_cast<int>(images.size());
    std::vector<char> seen(l + 1, 0);
    for (int v : images) {
        if (v < 1 || v > l || seen[v])
            raise(errc::not_a_bijection, "images are not a bijection on 1..L");
        seen[v] = 1;
    }
    Permutation p;
    p.images = images;
    // bubble sort: scan left to right, emit a factor per adjacent inversion
    std::vector<int> work = images;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a + 1 < l; ++a)
            if (work[a] > work[a + 1]) {
                std::swap(work[a], work[a + 1]);
                p.adjacent_factors.push_back(a + 1);
                changed = true;
            }
    }
    return p;
}

TensorOperator permutation_op(const Permutation& sigma, Dims dims) {
    if (sigma.size() != dims.l)
        raise(errc::dimension_mismatch, "permutation size does not match site count");
    // P^{sigma} is the product of adjacent permutators over the reduced word,
    // the alpha_1 factor applied first; it sends e_m to e_{sigma(m)} under
    // conjugation.
    TensorOperator op(dims);
    for (int code = 0; code < dims.dim(); ++code) {
        int img = code;
        for (int beta : sigma.adjacent_factors)
            img = mi_swap(img, beta, beta + 1, dims);
        op.set_entry(img, code, 1.0);
    }
    return op;
}

namespace {

TensorOperator adjacent_perm_op(int beta, Dims dims) {
    TensorOperator op(dims);
    for (int code = 0; code < dims.dim(); ++code)
        op.set_entry(mi_swap(code, beta, beta + 1, dims), code, 1.0);
    return op;
}

} // namespace

TensorOperator conjugate_sites(const Permutation& sigma, const TensorOperator& x) {
    TensorOperator p = permutation_op(sigma, x.dims());
    TensorOperator pinv = permutation_op(sigma.inverse(), x.dims());
    return p * x * pinv;
}

namespace {

TensorOperator r_sigma_impl(const Permutation& sigma, const WeightTable& table,
                            const std::vector<std::string>& xis, Dims dims, bool curly) {
    if (sigma.size() != dims.l || static_cast<int>(xis.size()) != dims.l)
        raise(errc::dimension_mismatch, "r_sigma arity mismatch");
    TensorOperator op = TensorOperator::identity(dims);
    std::vector<int> pos(dims.l);  // pos[m] = index of rapidity currently at position m+1
    std::iota(pos.begin(), pos.end(), 0);
    // Rhat factors act right-to-left: the last factor of the reduced word first
    const auto& word = sigma.adjacent_factors;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        int beta = *it;
        const std::string& rx = xis[pos[beta - 1]];
        const std::string& ry = xis[pos[beta]];
        TensorOperator r = curly ? embed_curly_r(table, beta, beta + 1, rx, ry, dims)
                                 : embed_r(table, beta, beta + 1, rx, ry, dims);
        op = adjacent_perm_op(beta, dims) * (r * op);
        std::swap(pos[beta - 1], pos[beta]);
    }
    // P^{sigma}: alpha_1 applied first
    for (int beta : word)
        op = adjacent_perm_op(beta, dims) * op;
    return op;
}

} // namespace

TensorOperator r_sigma(const Permutation& sigma, const WeightTable& table,
                       const std::vector<std::string>& xis, Dims dims) {
    return r_sigma_impl(sigma, table, xis, dims, false);
}

TensorOperator curly_r_sigma(const Permutation& sigma, const WeightTable& table,
                             const std::vector<std::string>& xis, Dims dims) {
    return r_sigma_impl(sigma, table, xis, dims, true);
}

nlohmann::json operator_snapshot(const TensorOperator& op) {
    nlohmann::json doc;
    doc["dims"] = {{"n", op.dims().n}, {"l", op.dims().l}};
    std::vector<std::tuple<std::string, std::string, cplx>> rows;
    op.for_each([&](int r, int c, cplx v) {
        rows.emplace_back(mi_str(r, op.dims()), mi_str(c, op.dims()), v);
    });
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [r, c, v] : rows)
        entries.push_back({{"row", r}, {"col", c}, {"value", {v.real(), v.imag()}}});
    doc["entries"] = entries;
    return doc;
}

} // namespace fbasis
