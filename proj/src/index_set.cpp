#include "rfe/index_set.hpp"

#include <stdexcept>

namespace rfe {

IndexSet::IndexSet(int k, std::vector<Point> pts) : dim_(k), pts_(std::move(pts)) {
    for (const auto& p : pts_)
        if (p.dim() != dim_) throw std::invalid_argument("index set: point dimension mismatch");
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

void IndexSet::insert(const Point& p) {
    if (p.dim() != dim_) throw std::invalid_argument("index set: point dimension mismatch");
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
    if (it == pts_.end() || *it != p) pts_.insert(it, p);
}

std::string IndexSet::canonical_key() const {
    std::string s;
    for (const auto& p : pts_) {
        if (!s.empty()) s += ';';
        s += p.str();
    }
    return s;
}

IndexSet IndexSet::translated(const Point& t) const {
    std::vector<Point> out;
    out.reserve(pts_.size());
    for (const auto& p : pts_) out.push_back(p + t);
    return IndexSet(dim_, std::move(out));
}

IndexSet IndexSet::intersect_cube(std::int64_t c) const {
    std::vector<Point> out;
    for (const auto& p : pts_)
        if (p.inf_norm() <= c) out.push_back(p);
    return IndexSet(dim_, std::move(out));
}

IndexSet IndexSet::upper_orthant(const InvariantOrder& o) const {
    std::vector<Point> out;
    for (const auto& p : pts_)
        if (o.positive(p)) out.push_back(p);
    return IndexSet(dim_, std::move(out));
}

IndexSet hypercube(std::int64_t c, int k) {
    if (c < 0) throw std::invalid_argument("hypercube: negative radius");
    std::vector<Point> pts;
    Point cur = Point::zero(k);
    for (int i = 0; i < k; ++i) cur[i] = -c;
    while (true) {
        pts.push_back(cur);
        int i = k - 1;
        while (i >= 0) {
            if (++cur[i] <= c) break;
            cur[i] = -c;
            --i;
        }
        if (i < 0) break;
    }
    return IndexSet(k, std::move(pts));
}

IndexSet window_shape(const IndexSet& lambda, const Point& t, std::int64_t c,
                      const InvariantOrder& order) {
    if (!lambda.contains(t)) throw std::invalid_argument("window_shape: anchor not in index set");
    return window_shape_full(lambda, t, c).upper_orthant(order);
}

IndexSet window_shape_full(const IndexSet& lambda, const Point& t, std::int64_t c) {
    std::vector<Point> out;
    // scan K_c around t; cheaper than translating all of Λ for small c
    Point u = Point::zero(lambda.dim());
    const int k = lambda.dim();
    for (int i = 0; i < k; ++i) u[i] = -c;
    while (true) {
        if (lambda.contains(t + u)) out.push_back(u);
        int i = k - 1;
        while (i >= 0) {
            if (++u[i] <= c) break;
            u[i] = -c;
            --i;
        }
        if (i < 0) break;
    }
    return IndexSet(k, std::move(out));
}

}  // namespace rfe
