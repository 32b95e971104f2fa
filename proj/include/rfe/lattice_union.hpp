#pragma once

#include <vector>

#include "rfe/index_set.hpp"
#include "rfe/sublattice.hpp"

namespace rfe {

// Exact representation of a possibly infinite subset of Z^k as a finite
// union of translated sublattices plus isolated points. Shapes are never
// truncated at construction; truncation happens at query time (∩ K_c).
class LatticeUnion {
  public:
    LatticeUnion() = default;
    explicit LatticeUnion(int k) : dim_(k) {}

    int dim() const { return dim_; }

    void add_component(const Sublattice& lat, const Point& offset);
    void add_isolated(const Point& p);

    const std::vector<std::pair<Sublattice, Point>>& components() const { return comps_; }
    const std::vector<Point>& isolated() const { return iso_; }

    bool contains(const Point& p) const;

    LatticeUnion translated(const Point& t) const;

    // All points within K_c, by per-component enumeration (deduplicated).
    IndexSet intersect_cube(std::int64_t c) const;

    // Same, by a membership scan over K_c. Used as the exactness cross-check
    // against intersect_cube.
    IndexSet intersect_cube_by_scan(std::int64_t c) const;

    // Positive part within K_c: contains(p) && p ≻ 0.
    IndexSet positive_part(std::int64_t c, const InvariantOrder& order) const;

    // Checks that the translated-lattice components are pairwise disjoint
    // (and disjoint from the isolated points) on K_c.
    bool components_disjoint_on(std::int64_t c) const;

    bool empty() const { return comps_.empty() && iso_.empty(); }

  private:
    int dim_ = 0;
    std::vector<std::pair<Sublattice, Point>> comps_;
    std::vector<Point> iso_;
};

}  // namespace rfe
