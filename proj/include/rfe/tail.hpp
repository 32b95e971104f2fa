#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rfe/field.hpp"
#include "rfe/index_set.hpp"
#include "rfe/lattice_union.hpp"
#include "rfe/stats.hpp"

namespace rfe {

// 1-homogeneous functional on field patches restricted to a finite set Υ.
enum class ModulusKind { SupNorm, AlphaNorm };

struct Modulus {
    ModulusKind kind = ModulusKind::SupNorm;
    double alpha = 1.0;  // AlphaNorm exponent
    IndexSet upsilon;    // restriction set

    static Modulus sup(IndexSet ups) { return {ModulusKind::SupNorm, 1.0, std::move(ups)}; }
    static Modulus alpha_norm(double a, IndexSet ups) {
        return {ModulusKind::AlphaNorm, a, std::move(ups)};
    }
};

// Evaluate ρ_Υ on a patch given as (points, values); every point of Υ must
// appear in the patch.
double modulus_eval(const Modulus& rho, const std::vector<Point>& pts,
                    const std::vector<double>& vals);

// Constants (C, D) with C·ρ(x) ≤ sup_Υ|x| ≤ D·ρ(x) for every patch x.
std::pair<double, double> modulus_constants(const Modulus& rho);

// One conditional-exceedance snapshot: field values around an anchor, scaled
// by the anchor's normalization (|X_anchor| or ρ at the anchor).
struct SpectralSample {
    Point anchor;
    std::vector<double> values;  // aligned with the shared offset window
    double radial = 0.0;         // normalizer / threshold; Pareto(α) in the limit
};

struct SpectralEstimate {
    std::vector<Point> window;  // offsets s at which values are recorded
    std::vector<SpectralSample> samples;
    double threshold = 0.0;
    double alpha = 1.0;
};

// Empirical spectral tail field: for every anchor t0 with |X_{t0}| > u (and
// t0 at least diam(W)+diam(Υ) away from the data edge), record
// (X_{t0+s}/|X_{t0}|)_{s in W}.
SpectralEstimate estimate_spectral_tail(const std::vector<FieldRealization>& reals, double u,
                                        const IndexSet& w, double alpha);

// Same with ρ_Υ-anchoring: anchors are t0 with ρ_{(Υ)_{t0}}(X) > u; values
// are X_{t0+s}/ρ.
SpectralEstimate estimate_upsilon_tail(const std::vector<FieldRealization>& reals,
                                       const Modulus& rho, double u, const IndexSet& w,
                                       double alpha);

// Piecewise-linear bump: 0 on |x| <= b1, ramps to c by 1.1·b1, stays at c
// until b2/1.1, ramps back to 0 at b2. Continuous, vanishing near 0.
struct BumpG {
    double b1 = 0.5;
    double b2 = 4.0;
    double c = 1.0;
    double operator()(double x) const;
};

struct TimeChangeReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;  // SE of the per-draw difference (shared stream)
    std::size_t n = 0;
    bool pass() const { return std::abs(lhs - rhs) <= 3.0 * se + 1e-12; }
};

// Checks the stationarity identity of the spectral tail field:
//   E[g(Θ_{t-s}) 1(Θ_{-s} != 0)] = E[g(Θ_t / |Θ_s|) |Θ_s|^α].
// y_version instead checks the tail-field identity, with the radial measure
// d(-r^{-α}) sampled through q = U^{-1/α} (g vanishes near 0, so the part of
// the measure below the sampled range never contributes).
TimeChangeReport time_change_check(const ThetaSampler& theta, const BumpG& g, const Point& s,
                                   const Point& t, double alpha, std::size_t mc_budget, Rng& rng,
                                   bool y_version = false);

// Θ normalized by the α-norm of its ρ-patches over A ∩ K_R.
struct ClusterField {
    std::vector<Point> window;
    std::vector<double> q;
    double norm = 0.0;
    double tail_mass_proxy = 0.0;  // norm over K_R minus norm over K_{R/2}
};

ClusterField cluster_field(const std::vector<Point>& window, const std::vector<double>& theta,
                           const LatticeUnion& a, const Modulus& rho, double alpha,
                           std::int64_t r);

}  // namespace rfe
