#include "rfe/lattice_union.hpp"

#include <map>
#include <stdexcept>

namespace rfe {

void LatticeUnion::add_component(const Sublattice& lat, const Point& offset) {
    if (lat.dim() != dim_ || offset.dim() != dim_)
        throw std::invalid_argument("lattice union: dimension mismatch");
    comps_.emplace_back(lat, lat.coset_reduce(offset));
}

void LatticeUnion::add_isolated(const Point& p) {
    if (p.dim() != dim_) throw std::invalid_argument("lattice union: dimension mismatch");
    iso_.push_back(p);
}

bool LatticeUnion::contains(const Point& p) const {
    for (const auto& [lat, off] : comps_)
        if (lat.contains(p, off)) return true;
    for (const auto& q : iso_)
        if (q == p) return true;
    return false;
}

LatticeUnion LatticeUnion::translated(const Point& t) const {
    LatticeUnion r(dim_);
    for (const auto& [lat, off] : comps_) r.add_component(lat, off + t);
    for (const auto& q : iso_) r.add_isolated(q + t);
    return r;
}

IndexSet LatticeUnion::intersect_cube(std::int64_t c) const {
    std::vector<Point> pts;
    for (const auto& [lat, off] : comps_) {
        auto e = lat.enumerate(off, c);
        pts.insert(pts.end(), e.begin(), e.end());
    }
    for (const auto& q : iso_)
        if (q.inf_norm() <= c) pts.push_back(q);
    return IndexSet(dim_, std::move(pts));
}

IndexSet LatticeUnion::intersect_cube_by_scan(std::int64_t c) const {
    std::vector<Point> pts;
    IndexSet cube = hypercube(c, dim_);
    for (const auto& p : cube.points())
        if (contains(p)) pts.push_back(p);
    return IndexSet(dim_, std::move(pts));
}

IndexSet LatticeUnion::positive_part(std::int64_t c, const InvariantOrder& order) const {
    return intersect_cube(c).upper_orthant(order);
}

bool LatticeUnion::components_disjoint_on(std::int64_t c) const {
    std::map<std::vector<std::int64_t>, int> seen;
    auto visit = [&](const std::vector<Point>& pts) {
        for (const auto& p : pts)
            if (++seen[p.c] > 1) return false;
        return true;
    };
    for (const auto& [lat, off] : comps_)
        if (!visit(lat.enumerate(off, c))) return false;
    std::vector<Point> iso_in;
    for (const auto& q : iso_)
        if (q.inf_norm() <= c) iso_in.push_back(q);
    return visit(iso_in);
}

}  // namespace rfe
