#include "rfe/shape.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace rfe {

namespace {

// "Exact" views (membership valid everywhere) get a radius far beyond any
// probe window so min(probe, radius) never truncates.
constexpr std::int64_t kExactRadius = std::int64_t(1) << 20;

std::uint64_t abs_diff(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; }

}  // namespace

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

std::uint64_t ShapeCensus::count_sum() const {
    std::uint64_t s = 0;
    for (const auto& e : entries) s += e.count;
    return s;
}

std::optional<std::size_t> ShapeCensus::find(const std::string& key) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].shape.canonical_key() == key) return i;
    return std::nullopt;
}

namespace {

ShapeCensus census_impl(const IndexSet& lambda, std::int64_t p, const InvariantOrder* order) {
    ShapeCensus c;
    c.p = p;
    c.total = lambda.size();
    c.upper_orthant = (order != nullptr);
    std::unordered_map<std::string, std::pair<IndexSet, std::uint64_t>> groups;
    for (const auto& t : lambda.points()) {
        IndexSet w = order ? window_shape(lambda, t, p, *order) : window_shape_full(lambda, t, p);
        auto key = w.canonical_key();
        auto it = groups.find(key);
        if (it == groups.end())
            groups.emplace(std::move(key), std::make_pair(std::move(w), std::uint64_t(1)));
        else
            ++it->second.second;
    }
    for (auto& [key, g] : groups) c.entries.push_back({std::move(g.first), g.second});
    std::sort(c.entries.begin(), c.entries.end(), [](const CensusEntry& a, const CensusEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.shape.canonical_key() < b.shape.canonical_key();
    });
    return c;
}

}  // namespace

ShapeCensus census(const IndexSet& lambda, std::int64_t p, const InvariantOrder& order) {
    return census_impl(lambda, p, &order);
}

ShapeCensus census_xi(const IndexSet& lambda, std::int64_t p) {
    return census_impl(lambda, p, nullptr);
}

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

ShapeView view_of(const LatticeUnion& u, const InvariantOrder& order, std::int64_t radius) {
    ShapeView v;
    v.dim = u.dim();
    v.radius = radius;
    auto shape = std::make_shared<LatticeUnion>(u);
    auto ord = std::make_shared<InvariantOrder>(order);
    v.member = [shape, ord](const Point& p) { return ord->positive(p) && shape->contains(p); };
    return v;
}

ShapeView view_of(const IndexSet& window, const InvariantOrder& order, std::int64_t radius) {
    ShapeView v;
    v.dim = window.dim();
    v.radius = radius;
    auto set = std::make_shared<IndexSetView>(window);
    auto ord = std::make_shared<InvariantOrder>(order);
    v.member = [set, ord](const Point& p) { return ord->positive(p) && set->contains(p); };
    return v;
}

// ---------------------------------------------------------------------------
// Stabilizer
// ---------------------------------------------------------------------------

Sublattice stabilizer(const ShapeView& d, const InvariantOrder& order, std::int64_t probe_radius) {
    const std::int64_t R = std::min(probe_radius, d.radius);
    const std::int64_t zc = R / 2;  // candidate radius; leaves room to certify
    if (zc < 1) return Sublattice(d.dim);

    auto certified = [&](const Point& z) {
        const std::int64_t w = R - z.inf_norm();
        IndexSet cube = hypercube(w, d.dim);
        for (const auto& u : cube.points()) {
            if (!order.positive(u)) continue;
            if (d.member(u + z) != d.member(u)) return false;
        }
        return true;
    };

    std::vector<Point> shifts;  // nonnegative certified shifts, including 0
    shifts.push_back(Point::zero(d.dim));
    IndexSet candidates = hypercube(zc, d.dim);
    for (const auto& z : candidates.points()) {
        if (!order.positive(z) || !d.member(z)) continue;
        if (certified(z)) shifts.push_back(z);
    }

    // closure check: certified shifts must be closed under addition inside
    // the candidate window, otherwise the window was too small to certify
    std::unordered_set<Point, PointHash> shift_set(shifts.begin(), shifts.end());
    for (const auto& a : shifts) {
        for (const auto& b : shifts) {
            Point s = a + b;
            if (s.inf_norm() <= zc && !shift_set.count(s))
                throw std::runtime_error("stabilizer: certified shifts not closed on window");
        }
    }

    Sublattice L = Sublattice::from_generators(d.dim, shifts);
    // sanity: the positive part of L must lie inside the shape
    for (const auto& q : L.enumerate(Point::zero(d.dim), zc))
        if (order.positive(q) && !d.member(q))
            throw std::runtime_error("stabilizer: lattice leaks outside the shape");
    return L;
}

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

std::vector<ShapeComponent> partition_shape(const ShapeView& d, const InvariantOrder& order,
                                            std::int64_t probe_radius) {
    const std::int64_t R = std::min(probe_radius, d.radius);
    const std::int64_t cr = R / 2;  // coverage radius
    std::vector<Point> pts;
    IndexSet cube = hypercube(cr, d.dim);
    for (const auto& p : cube.points())
        if (d.member(p)) pts.push_back(p);
    std::sort(pts.begin(), pts.end(),
              [&](const Point& a, const Point& b) { return order.less(a, b); });

    std::vector<ShapeComponent> comps;
    std::unordered_set<Point, PointHash> covered;
    for (const auto& z : pts) {
        if (covered.count(z)) continue;
        // stabilizer of the forward view from z
        ShapeView t;
        t.dim = d.dim;
        t.radius = R - z.inf_norm();
        auto base = d.member;
        auto ord = std::make_shared<InvariantOrder>(order);
        Point zc = z;
        t.member = [base, ord, zc](const Point& u) { return ord->positive(u) && base(u + zc); };
        Sublattice L = stabilizer(t, order, probe_radius);
        for (const auto& q : L.enumerate(z, cr)) {
            if (!order.positive(q)) continue;
            if (!d.member(q))
                throw std::runtime_error("partition: component leaks outside the shape");
            if (!covered.insert(q).second)
                throw std::runtime_error("partition: components overlap");
        }
        comps.push_back({L, L.coset_reduce(z)});
    }
    return comps;
}

// ---------------------------------------------------------------------------
// Shape analysis
// ---------------------------------------------------------------------------

namespace {

ShapeD build_shape(const ShapeView& v, const InvariantOrder& order, std::int64_t probe,
                   bool window_certified) {
    ShapeD d;
    d.probe = std::min(probe, v.radius);
    d.window_certified = window_certified;
    d.L = stabilizer(v, order, probe);
    d.partition = partition_shape(v, order, probe);
    d.repr = LatticeUnion(v.dim);
    for (const auto& c : d.partition) {
        if (c.lattice.rank() == 0)
            d.repr.add_isolated(c.offset);
        else
            d.repr.add_component(c.lattice, c.offset);
    }
    // the reconstruction must reproduce the shape on the coverage window
    const std::int64_t cr = d.probe / 2;
    IndexSet cube = hypercube(cr, v.dim);
    for (const auto& p : cube.points())
        if ((order.positive(p) && d.repr.contains(p)) != v.member(p))
            throw std::runtime_error("shape analysis: reconstruction mismatch");
    return d;
}

}  // namespace

ShapeD infer_shape(const IndexSet& window, std::int64_t p, const InvariantOrder& order) {
    return build_shape(view_of(window, order, p), order, p, true);
}

ShapeD analyze_shape(const LatticeUnion& u, const InvariantOrder& order,
                     std::int64_t probe_radius) {
    return build_shape(view_of(u, order, kExactRadius), order, probe_radius, false);
}

// ---------------------------------------------------------------------------
// TIP / hat-D
// ---------------------------------------------------------------------------

bool tip_check(const ShapeD& d, std::size_t component, const InvariantOrder& order) {
    if (d.L.rank() == 0) return false;  // G \ {0} empty
    const auto& c = d.partition.at(component);
    const std::int64_t w = d.probe;
    // smallest x in the component's positive part, largest y in G, both on K_w
    std::optional<Point> x_min, y_max;
    for (const auto& q : c.lattice.enumerate(c.offset, w)) {
        if (!order.positive(q)) continue;
        if (!x_min || order.less(q, *x_min)) x_min = q;
    }
    for (const auto& q : d.L.enumerate(Point::zero(d.repr.dim()), w)) {
        if (!order.positive(q)) continue;
        if (!y_max || order.less(*y_max, q)) y_max = q;
    }
    if (!x_min || !y_max) return false;
    return order.less(*x_min, *y_max);
}

LatticeUnion hat_d(const ShapeD& d, const InvariantOrder& order) {
    // Bounded shapes have no TIP components; downstream formulas still need a
    // nonempty hat there, and the shape itself is the consistent choice.
    if (d.L.rank() == 0) return d.repr;
    LatticeUnion hat(d.repr.dim());
    std::unordered_set<std::string> comp_keys;
    std::unordered_set<Point, PointHash> iso_seen;
    for (std::size_t i = 0; i < d.partition.size(); ++i) {
        if (!tip_check(d, i, order)) continue;
        LatticeUnion shifted = d.repr.translated(-d.partition[i].offset);
        for (const auto& [lat, off] : shifted.components()) {
            std::string key = lat.key() + "@" + off.str();
            if (comp_keys.insert(std::move(key)).second) hat.add_component(lat, off);
        }
        for (const auto& q : shifted.isolated())
            if (iso_seen.insert(q).second) hat.add_isolated(q);
    }
    return hat;
}

bool hat_translation_invariant(const LatticeUnion& hat, const Sublattice& L,
                               const InvariantOrder& order, std::int64_t window) {
    (void)order;
    auto member = [&](const Point& p) {
        return p.is_zero() || hat.contains(p) || hat.contains(-p);
    };
    IndexSet cube = hypercube(window, hat.dim());
    for (const auto& g : L.basis()) {
        for (const auto& p : cube.points()) {
            if (member(p) != member(p + g)) return false;
            if (member(p) != member(p - g)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Ξ structures
// ---------------------------------------------------------------------------

XiStructure xi_structure(const ShapeD& d, const InvariantOrder& order) {
    const int k = d.repr.dim();
    XiStructure xs;
    xs.xi_star = LatticeUnion(k);

    std::vector<Point> reps;
    reps.push_back(Point::zero(k));  // 0 is always a representative

    if (d.L.rank() == 0) {
        // bounded shape: E = {0} ∪ D, Ξ* = E as isolated points
        for (const auto& c : d.partition) {
            if (c.lattice.rank() != 0)
                throw std::runtime_error("xi structure: component rank exceeds stabilizer rank");
            reps.push_back(c.offset);
        }
        xs.e_set = IndexSet(k, reps);
        for (const auto& p : xs.e_set.points()) xs.xi_star.add_isolated(p);
    } else {
        const std::int64_t w = d.probe;
        // distinct cosets of L met by the full component lattices; the family
        // must stabilize between window radii w/2 and w
        auto collect = [&](std::int64_t r) {
            std::unordered_set<Point, PointHash> seen;
            for (const auto& c : d.partition)
                for (const auto& q : c.lattice.enumerate(c.offset, r))
                    seen.insert(d.L.coset_reduce(q));
            return seen;
        };
        auto at_w = collect(w);
        if (collect(w / 2).size() != at_w.size())
            throw std::runtime_error("xi structure: coset family did not stabilize on window");
        for (const auto& rep : at_w) {
            if (rep.is_zero()) continue;
            // ≺-smallest nonnegative member of the coset within the window
            std::optional<Point> best;
            for (const auto& q : d.L.enumerate(rep, w))
                if (order.nonnegative(q) && (!best || order.less(q, *best))) best = q;
            if (!best)
                throw std::runtime_error("xi structure: no nonnegative coset representative");
            reps.push_back(*best);
        }
        xs.e_set = IndexSet(k, reps);
        for (const auto& s : xs.e_set.points()) xs.xi_star.add_component(d.L, s);
    }

    xs.n = xs.e_set.size();
    xs.lattice_case = (xs.n == 1 && d.L.rank() > 0);
    const std::int64_t vr = d.probe / 2;
    xs.positive_part_matches =
        (xs.xi_star.positive_part(vr, order) == d.repr.positive_part(vr, order));
    return xs;
}

IndexSet s_set(const IndexSet& lambda, const LatticeUnion& xi_star, std::int64_t l) {
    IndexSet target = xi_star.intersect_cube(l);
    if (!target.contains(Point::zero(lambda.dim())))
        target.insert(Point::zero(lambda.dim()));  // windows always contain 0
    std::vector<Point> out;
    for (const auto& t : lambda.points())
        if (window_shape_full(lambda, t, l) == target) out.push_back(t);
    return IndexSet(lambda.dim(), std::move(out));
}

bool s_sets_disjoint(const IndexSet& lambda, const std::vector<ShapeD>& shapes,
                     const std::vector<LatticeUnion>& xi_stars, std::int64_t l,
                     const InvariantOrder& order) {
    // the claim is disjointness across different structures only; translated
    // windows of the same structure overlap freely
    std::vector<std::unordered_set<Point, PointHash>> covered(shapes.size());
    for (std::size_t j = 0; j < shapes.size(); ++j) {
        IndexSet anchors = s_set(lambda, xi_stars[j], 4 * l);
        IndexSet window = shapes[j].repr.positive_part(2 * l, order);
        for (const auto& t : anchors.points())
            for (const auto& u : window.points()) covered[j].insert(t + u);
    }
    for (std::size_t i = 0; i < covered.size(); ++i)
        for (std::size_t j = i + 1; j < covered.size(); ++j)
            for (const auto& p : covered[i])
                if (covered[j].count(p)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Weight identities
// ---------------------------------------------------------------------------

namespace {

std::uint64_t refinement_violation(const ShapeCensus& coarse, const ShapeCensus& fine) {
    // aggregate fine shapes by their truncation to the coarse radius
    std::map<std::string, std::uint64_t> agg;
    for (const auto& e : fine.entries)
        agg[e.shape.intersect_cube(coarse.p).canonical_key()] += e.count;
    std::uint64_t worst = 0;
    for (const auto& e : coarse.entries) {
        auto it = agg.find(e.shape.canonical_key());
        std::uint64_t have = (it == agg.end()) ? 0 : it->second;
        worst = std::max(worst, abs_diff(have, e.count));
        if (it != agg.end()) agg.erase(it);
    }
    for (const auto& [key, cnt] : agg) worst = std::max(worst, cnt);
    return worst;
}

std::uint64_t chain_violation(const std::vector<ShapeCensus>& censuses) {
    std::uint64_t worst = 0;
    for (std::size_t i = 0; i + 1 < censuses.size(); ++i)
        worst = std::max(worst, refinement_violation(censuses[i], censuses[i + 1]));
    return worst;
}

}  // namespace

WeightIdentityReport weight_identities(const std::vector<ShapeCensus>& orthant_censuses,
                                       const std::vector<ShapeCensus>& xi_censuses,
                                       const InvariantOrder& order) {
    (void)order;
    WeightIdentityReport r;
    for (const auto& c : orthant_censuses)
        if (c.count_sum() != c.total) r.count_partition_exact = false;
    for (const auto& c : xi_censuses)
        if (c.count_sum() != c.total) r.count_partition_exact = false;
    for (auto cs : {&orthant_censuses, &xi_censuses})
        for (std::size_t i = 0; i + 1 < cs->size(); ++i)
            if ((*cs)[i].p >= (*cs)[i + 1].p)
                r.notes.push_back("census list not ordered by increasing window radius");
    r.refinement_violation = chain_violation(orthant_censuses);
    r.xi_refinement_violation = chain_violation(xi_censuses);
    return r;
}

GammaStarCheck gamma_star_check(const IndexSet& lambda, std::int64_t p,
                                const InvariantOrder& order) {
    GammaStarCheck out;
    ShapeCensus orth = census(lambda, p, order);
    ShapeCensus full = census_xi(lambda, p);
    std::unordered_set<std::string> counted;  // distinct Ξ classes already summed
    for (std::size_t i = 0; i < orth.entries.size(); ++i) {
        GammaRow row;
        row.d_key = orth.entries[i].shape.canonical_key();
        row.lambda = orth.weight(i);
        try {
            ShapeD d = infer_shape(orth.entries[i].shape, p, order);
            XiStructure xs = xi_structure(d, order);
            IndexSet xi_window = xs.xi_star.intersect_cube(p);
            row.xi_key = xi_window.canonical_key();
            row.n = xs.n;
            if (auto idx = full.find(row.xi_key)) {
                row.matched = true;
                row.gamma_star = full.weight(*idx);
                out.matched_weight += row.lambda;
                // Ξ* sets that are translates of each other describe the same
                // structure re-centered at another of its points; the identity
                // counts each translation family once. Canonical family key:
                // smallest window key over the recenterings at E.
                std::string family;
                for (const auto& e : xs.e_set.points()) {
                    std::string k = xs.xi_star.translated(-e).intersect_cube(p).canonical_key();
                    if (family.empty() || k < family) family = std::move(k);
                }
                if (counted.insert(family).second)
                    out.sum += row.gamma_star * static_cast<double>(row.n);
            }
        } catch (const std::runtime_error&) {
            // boundary fragment whose window is too small to analyze; it
            // contributes to the residual, not to the sum
        }
        out.rows.push_back(std::move(row));
    }
    out.residual = std::abs(out.sum - 1.0);
    return out;
}

}  // namespace rfe
