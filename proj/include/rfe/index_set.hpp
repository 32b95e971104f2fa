#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "rfe/order.hpp"
#include "rfe/point.hpp"

namespace rfe {

// Finite subset of Z^k, kept sorted (coordinate-lexicographically) and
// duplicate-free. The sorted coordinate list is the canonical serialization
// used as census hash key.
class IndexSet {
  public:
    IndexSet() = default;
    explicit IndexSet(int k) : dim_(k) {}
    IndexSet(int k, std::vector<Point> pts);

    int dim() const { return dim_; }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    const std::vector<Point>& points() const { return pts_; }

    bool contains(const Point& p) const {
        return std::binary_search(pts_.begin(), pts_.end(), p);
    }

    void insert(const Point& p);

    bool operator==(const IndexSet& o) const { return dim_ == o.dim_ && pts_ == o.pts_; }

    // "x1 x2;y1 y2;..." over the sorted point list.
    std::string canonical_key() const;

    IndexSet translated(const Point& t) const;            // S + t
    IndexSet intersect_cube(std::int64_t c) const;        // S ∩ K_c
    IndexSet upper_orthant(const InvariantOrder& o) const;  // {u ∈ S : u ≻ 0}

  private:
    int dim_ = 0;
    std::vector<Point> pts_;
};

// K_c = [-c,c]^k ∩ Z^k
IndexSet hypercube(std::int64_t c, int k);

// Υ^{(t,c)} = ((Λ)_{-t} ∩ K_c)^+   (t must belong to Λ)
IndexSet window_shape(const IndexSet& lambda, const Point& t, std::int64_t c,
                      const InvariantOrder& order);

// (Λ)_{-t} ∩ K_c, no orthant restriction (always contains 0 when t ∈ Λ)
IndexSet window_shape_full(const IndexSet& lambda, const Point& t, std::int64_t c);

// Fast membership view for repeated window queries over a large Λ.
class IndexSetView {
  public:
    explicit IndexSetView(const IndexSet& s) : set_(s.points().begin(), s.points().end()) {}
    bool contains(const Point& p) const { return set_.count(p) > 0; }

  private:
    std::unordered_set<Point, PointHash> set_;
};

}  // namespace rfe
