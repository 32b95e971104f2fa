#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rfe/index_set.hpp"
#include "rfe/lattice_union.hpp"
#include "rfe/order.hpp"

namespace rfe {

// ---------------------------------------------------------------------------
// Shape census
// ---------------------------------------------------------------------------

struct CensusEntry {
    IndexSet shape;       // canonical window set (within K_p, upper orthant or full)
    std::uint64_t count;  // number of anchors t ∈ Λ producing this shape
};

// Empirical local-shape census of an index set at window radius p. Weights
// are exact rationals count/total; every t ∈ Λ contributes to exactly one
// shape, so Σ counts == total by construction.
struct ShapeCensus {
    std::int64_t p = 0;
    std::uint64_t total = 0;
    bool upper_orthant = true;  // false for the Ξ-style full-window census
    std::vector<CensusEntry> entries;  // count desc, then canonical key

    double weight(std::size_t i) const {
        return static_cast<double>(entries[i].count) / static_cast<double>(total);
    }
    std::uint64_t count_sum() const;
    std::optional<std::size_t> find(const std::string& key) const;
};

ShapeCensus census(const IndexSet& lambda, std::int64_t p, const InvariantOrder& order);
ShapeCensus census_xi(const IndexSet& lambda, std::int64_t p);

// ---------------------------------------------------------------------------
// Shape membership views
// ---------------------------------------------------------------------------

// Membership oracle for a (possibly infinite) upper-orthant shape, valid on
// K_radius. Exact shapes have radius set to the probe bound of the caller;
// shapes inferred from a finite census window carry the window radius.
struct ShapeView {
    std::function<bool(const Point&)> member;  // already restricted to u ≻ 0
    std::int64_t radius = 0;
    int dim = 0;
};

ShapeView view_of(const LatticeUnion& u, const InvariantOrder& order, std::int64_t radius);
ShapeView view_of(const IndexSet& window, const InvariantOrder& order, std::int64_t radius);

// ---------------------------------------------------------------------------
// Stabilizer, partition, TIP
// ---------------------------------------------------------------------------

// Stabilizer lattice of an upper-orthant shape D: the lattice generated by
// {z ∈ D ∪ {0} : (D)_{-z}^+ = D}, each shift certified on the window the
// view supports. G is L intersected with the nonnegative points. Throws if
// the certified shifts are not closed under addition within the probe
// window.
Sublattice stabilizer(const ShapeView& d, const InvariantOrder& order, std::int64_t probe_radius);

struct ShapeComponent {
    Sublattice lattice;  // L_{l_i}
    Point offset;        // z_{l_i}, coset-reduced
};

// Greedy decomposition of D into translated-lattice components whose
// positive parts partition D, certified on the probe window.
std::vector<ShapeComponent> partition_shape(const ShapeView& d, const InvariantOrder& order,
                                            std::int64_t probe_radius);

// A fully analyzed census shape.
struct ShapeD {
    LatticeUnion repr;   // D = repr^+ (upper-orthant semantics)
    Sublattice L;        // stabilizer lattice L_j = G_j ∪ -G_j
    std::vector<ShapeComponent> partition;
    std::int64_t probe = 0;      // radius the structure was certified on
    bool window_certified = false;  // inferred from a finite window
    double lambda = 0.0;            // census weight when known

    bool bounded() const { return L.rank() == 0; }
};

// Rebuilds the exact LatticeUnion of a shape from its finite census window;
// all structure is window-certified at the window radius.
ShapeD infer_shape(const IndexSet& window, std::int64_t p, const InvariantOrder& order);

// Analyze an exact shape given as a LatticeUnion (D = u^+).
ShapeD analyze_shape(const LatticeUnion& u, const InvariantOrder& order, std::int64_t probe_radius);

// TIP_i: some x in the positive part of component i precedes some y ∈ G_j.
bool tip_check(const ShapeD& d, std::size_t component, const InvariantOrder& order);

// hat-D_j: union of the shapes (D_j)_{-z_i}^+ over TIP-satisfying components.
// Bounded shapes have no TIP components; there the shape itself is returned.
LatticeUnion hat_d(const ShapeD& d, const InvariantOrder& order);

// Checks that hat ∪ {0} ∪ -hat is invariant under translation by every
// generator of L, on K_window.
bool hat_translation_invariant(const LatticeUnion& hat, const Sublattice& L,
                               const InvariantOrder& order, std::int64_t window);

// ---------------------------------------------------------------------------
// Ξ structures
// ---------------------------------------------------------------------------

struct XiStructure {
    LatticeUnion xi_star;  // Ξ*_j = ⋃_{s∈E_j} (L_j)_s  (also called H_j)
    IndexSet e_set;        // E_j, contains 0
    std::size_t n = 0;     // n_j = |E_j|
    double gamma_star = 0.0;  // filled in when matched against a Ξ census
    bool lattice_case = false;  // E_j = {0}
    bool positive_part_matches = false;  // (Ξ*)^+ == D on the verification window
};

// Coset decomposition of the partition's full lattices modulo L_j. Requires
// all component lattices to share the rank of L_j.
XiStructure xi_structure(const ShapeD& d, const InvariantOrder& order);

// S_{i,l} = {t ∈ Λ : (Λ)_{-t} ∩ K_l = Ξ* ∩ K_l}
IndexSet s_set(const IndexSet& lambda, const LatticeUnion& xi_star, std::int64_t l);

// Verifies the separation claim behind the S-set construction: for distinct
// structures, the translated shape windows (D_j ∩ K_{2l})_t, t ∈ S_{j,4l},
// are pairwise disjoint.
bool s_sets_disjoint(const IndexSet& lambda, const std::vector<ShapeD>& shapes,
                     const std::vector<LatticeUnion>& xi_stars, std::int64_t l,
                     const InvariantOrder& order);

// ---------------------------------------------------------------------------
// Weight identities
// ---------------------------------------------------------------------------

struct WeightIdentityReport {
    bool count_partition_exact = true;     // Σ counts == |Λ| in every census
    std::uint64_t refinement_violation = 0;  // max |λ_{j,p}·|Λ| − Σ_{i∈I_p^{(j)}} λ_{i,p'}·|Λ||, exact ints
    std::uint64_t xi_refinement_violation = 0;
    double gamma_star_identity_residual = 0.0;  // |Σ_{j∈I*} γ*_j |E_j| − 1|
    std::vector<std::string> notes;
};

// Cross-checks the refinement identities over censuses at increasing p
// (all for the same Λ) and, when Ξ censuses are supplied, the γ* identity.
WeightIdentityReport weight_identities(const std::vector<ShapeCensus>& orthant_censuses,
                                       const std::vector<ShapeCensus>& xi_censuses,
                                       const InvariantOrder& order);

// One row per orthant-census shape: its inferred Ξ structure matched against
// the full-window census. Structures sharing the same Ξ* collapse to one row
// in the γ* sum.
struct GammaRow {
    std::string d_key;
    std::string xi_key;
    double lambda = 0.0;      // orthant census weight of the shape
    double gamma_star = 0.0;  // full-window census weight of Ξ* ∩ K_p
    std::size_t n = 0;        // |E_j|
    bool matched = false;     // Ξ* ∩ K_p found in the full-window census
};

struct GammaStarCheck {
    std::vector<GammaRow> rows;
    double sum = 0.0;             // Σ γ*_j n_j over distinct matched Ξ classes
    double residual = 0.0;        // |sum − 1|
    double matched_weight = 0.0;  // orthant-census mass of matched shapes
};

GammaStarCheck gamma_star_check(const IndexSet& lambda, std::int64_t p,
                                const InvariantOrder& order);

}  // namespace rfe
