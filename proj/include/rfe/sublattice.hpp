#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfe/index_set.hpp"
#include "rfe/point.hpp"

namespace rfe {

// Integer sublattice of Z^k stored by a canonical Hermite-normal-form basis
// (row echelon, positive pivots, entries above a pivot reduced into
// [0, pivot)). Two sublattices are equal iff their HNF matrices are equal.
// Rank 0 is the degenerate lattice {0}.
class Sublattice {
  public:
    Sublattice() = default;                // placeholder; dimension 0
    explicit Sublattice(int k) : k_(k) {}  // {0}

    // Lattice generated by the given integer vectors (not necessarily
    // independent). Throws on dimension mismatch.
    static Sublattice from_generators(int k, const std::vector<Point>& gens);

    int dim() const { return k_; }
    int rank() const { return static_cast<int>(rows_.size()); }
    const std::vector<Point>& basis() const { return rows_; }
    const std::vector<int>& pivot_columns() const { return pivots_; }

    bool operator==(const Sublattice& o) const { return k_ == o.k_ && rows_ == o.rows_; }
    bool operator!=(const Sublattice& o) const { return !(*this == o); }

    // Canonical coset representative of p modulo this lattice: the pivot
    // coordinate of each basis row is reduced into [0, pivot). Points are in
    // the same coset iff they reduce to the same representative.
    Point coset_reduce(const Point& p) const;

    bool contains(const Point& p) const { return coset_reduce(p).is_zero(); }

    // true iff p lies in (this lattice) + offset
    bool contains(const Point& p, const Point& offset) const { return contains(p - offset); }

    // All points of (lattice + offset) ∩ K_c.
    std::vector<Point> enumerate(const Point& offset, std::int64_t c) const;

    // true iff every basis vector of other lies in this lattice
    bool contains_lattice(const Sublattice& other) const;

    std::string key() const;  // canonical string, for maps/reports

  private:
    int k_ = 0;
    std::vector<Point> rows_;   // HNF rows, pivot columns strictly increasing
    std::vector<int> pivots_;
};

}  // namespace rfe
