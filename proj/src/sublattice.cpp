#include "rfe/sublattice.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>

namespace rfe {

namespace {

constexpr std::int64_t kCoordLimit = std::int64_t(1) << 42;

void check_range(std::int64_t v) {
    if (v > kCoordLimit || v < -kCoordLimit)
        throw std::overflow_error("sublattice arithmetic exceeded coordinate bound");
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void row_sub(Point& a, const Point& b, std::int64_t q) {
    for (int i = 0; i < a.dim(); ++i) {
        a[i] -= q * b[i];
        check_range(a[i]);
    }
}

}  // namespace

Sublattice Sublattice::from_generators(int k, const std::vector<Point>& gens) {
    std::vector<Point> rows;
    for (const auto& g : gens) {
        if (g.dim() != k) throw std::invalid_argument("sublattice generator dimension mismatch");
        if (!g.is_zero()) rows.push_back(g);
    }
    Sublattice L(k);
    std::size_t top = 0;
    for (int col = 0; col < k && top < rows.size(); ++col) {
        // gcd elimination in this column among rows[top..]
        while (true) {
            std::size_t piv = rows.size();
            for (std::size_t r = top; r < rows.size(); ++r) {
                if (rows[r][col] != 0 &&
                    (piv == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[piv][col])))
                    piv = r;
            }
            if (piv == rows.size()) break;  // column already zero below top
            std::swap(rows[top], rows[piv]);
            bool clean = true;
            for (std::size_t r = top + 1; r < rows.size(); ++r) {
                if (rows[r][col] != 0) {
                    std::int64_t q = floor_div(rows[r][col], rows[top][col]);
                    row_sub(rows[r], rows[top], q);
                    if (rows[r][col] != 0) clean = false;
                }
            }
            if (clean) break;
        }
        if (rows[top][col] != 0) {
            if (rows[top][col] < 0) rows[top] = -rows[top];
            ++top;
        }
    }
    rows.resize(top);
    // drop all-zero rows that may remain (dependent generators)
    std::vector<Point> kept;
    for (auto& r : rows)
        if (!r.is_zero()) kept.push_back(r);
    // reduce entries above each pivot into [0, pivot)
    std::vector<int> pivots;
    for (const auto& r : kept) {
        int c = 0;
        while (r[c] == 0) ++c;
        pivots.push_back(c);
    }
    for (std::size_t i = 1; i < kept.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            std::int64_t piv = kept[i][pivots[i]];
            std::int64_t q = floor_div(kept[j][pivots[i]], piv);
            row_sub(kept[j], kept[i], q);
        }
    }
    L.rows_ = std::move(kept);
    L.pivots_ = std::move(pivots);
    return L;
}

Point Sublattice::coset_reduce(const Point& p) const {
    if (p.dim() != k_) throw std::invalid_argument("coset_reduce: dimension mismatch");
    Point r = p;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::int64_t piv = rows_[i][pivots_[i]];
        std::int64_t q = floor_div(r[pivots_[i]], piv);
        if (q != 0) row_sub(r, rows_[i], q);
    }
    return r;
}

std::vector<Point> Sublattice::enumerate(const Point& offset, std::int64_t c) const {
    std::vector<Point> out;
    if (rows_.empty()) {
        if (offset.inf_norm() <= c) out.push_back(offset);
        return out;
    }
    // Row i is the only basis row among rows >= i with a nonzero entry at
    // pivot column pivots_[i], so once n_0..n_{i-1} are fixed the coordinate
    // at that column pins down the admissible range for n_i.
    std::function<void(std::size_t, Point)> rec = [&](std::size_t i, Point acc) {
        if (i == rows_.size()) {
            if (acc.inf_norm() <= c) out.push_back(acc);
            return;
        }
        std::int64_t piv = rows_[i][pivots_[i]];
        std::int64_t base = acc[pivots_[i]];
        // base + n*piv in [-c, c]
        std::int64_t nlo = floor_div(-c - base + piv - 1, piv);
        std::int64_t nhi = floor_div(c - base, piv);
        for (std::int64_t n = nlo; n <= nhi; ++n) rec(i + 1, acc + rows_[i] * n);
    };
    rec(0, offset);
    std::sort(out.begin(), out.end());
    return out;
}

bool Sublattice::contains_lattice(const Sublattice& other) const {
    for (const auto& r : other.basis())
        if (!contains(r)) return false;
    return true;
}

std::string Sublattice::key() const {
    std::string s = "r" + std::to_string(rank());
    for (const auto& r : rows_) s += "|" + r.str();
    return s;
}

}  // namespace rfe
