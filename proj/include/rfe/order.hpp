#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "rfe/point.hpp"

namespace rfe {

enum class Ordering { Less, Equal, Greater };

// Translation-invariant total order on Z^k. The supported family is the
// permuted-lexicographic one: compare coordinates in a fixed permutation of
// the axes. The identity permutation is the plain dictionary order.
class InvariantOrder {
  public:
    static InvariantOrder lexicographic(int k) {
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        return InvariantOrder(std::move(perm));
    }

    // perm[i] is the axis compared at priority i (highest first).
    static InvariantOrder permuted_lexicographic(std::vector<int> perm) {
        std::vector<bool> seen(perm.size(), false);
        for (int a : perm) {
            if (a < 0 || a >= static_cast<int>(perm.size()) || seen[static_cast<std::size_t>(a)])
                throw std::invalid_argument("invalid axis permutation");
            seen[static_cast<std::size_t>(a)] = true;
        }
        return InvariantOrder(std::move(perm));
    }

    int dim() const { return static_cast<int>(perm_.size()); }

    Ordering compare(const Point& s, const Point& t) const {
        if (s.dim() != dim() || t.dim() != dim())
            throw std::invalid_argument("order/point dimension mismatch");
        for (int a : perm_) {
            if (s[a] < t[a]) return Ordering::Less;
            if (s[a] > t[a]) return Ordering::Greater;
        }
        return Ordering::Equal;
    }

    bool less(const Point& s, const Point& t) const { return compare(s, t) == Ordering::Less; }
    bool positive(const Point& t) const { return compare(Point::zero(dim()), t) == Ordering::Less; }
    bool nonnegative(const Point& t) const { return compare(t, Point::zero(dim())) != Ordering::Less; }

    const std::vector<int>& permutation() const { return perm_; }

  private:
    explicit InvariantOrder(std::vector<int> perm) : perm_(std::move(perm)) {}
    std::vector<int> perm_;
};

}  // namespace rfe
