#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rfe/field.hpp"
#include "rfe/tail.hpp"

namespace rfe {

// Solve P(|X_0| > a) = 1/size by monotone bisection (relative 1e-12).
double normalizer(const std::function<double(double)>& tail, double size);

// Empirical counterpart: the (1 - 1/size) quantile of |samples|; requires at
// least 10·size samples.
double normalizer_empirical(std::vector<double> samples, double size);

// Multiset of rescaled exceedances above a floor.
struct PointConfig {
    std::vector<double> points;
    double floor = 0.0;
};

// {X_t / a : t in lambda, |X_t/a| > floor}
PointConfig exceedance_process(const FieldRealization& real, const IndexSet& lambda, double a,
                               double floor);

// Laplace functional of the empirical exceedance process: mean over configs
// of exp(-Σ g(x)), jackknife SE. Needs >= 30 configs.
MeanSE empirical_laplace(const std::vector<PointConfig>& configs, const BumpG& g);

struct LaplaceEstimate {
    double value = 1.0;
    double value_product_form = 1.0;  // mixture/product reduction, same stream
    double se = 0.0;
    double truncation_residual = 0.0;  // |estimate at K_R - estimate at K_{R/2}|
    std::size_t n = 0;
};

// One repeating-shape term of the limit functionals. Which members are used
// depends on the variant: the D-form needs d_window and weight = λ_i; the
// pattern form needs e_set, d_tilde, weight = γ*_j·c_j; the Q-form needs
// xi_window and weight = γ*_j·|E_j|.
struct LimitShape {
    std::vector<Point> e_set;     // pattern points (D-form: just {0})
    std::vector<Point> d_window;  // D_i ∩ K_R, successors of 0
    std::vector<Point> xi_window; // Ξ*_j ∩ K_R
    double weight = 1.0;
    ThetaSampler theta;  // Θ (D-form) or Θ_{E_j} (pattern form) or Q (Q-form)
};

// exp(-∫ Σ_i λ_i E[e^{-Σ_{D_i} g(yΘ_t)} (1 - e^{-g(yΘ_0)})] d(-y^{-α})).
// The radial measure is sampled as y = b1·V^{-1/α} since g vanishes on
// |x| <= b1 and |Θ_0| = 1 pins the support of the last factor.
LaplaceEstimate limit_laplace_psi_l(const std::vector<LimitShape>& shapes, const BumpG& g,
                                    double alpha, std::size_t mc_budget, Rng& rng);

// exp(-∫ Σ_j γ*_j c_j E[(1 - e^{-Σ_{E_j} g(yΘ_t)}) e^{-Σ_{D̃_j} g(yΘ_t)}] d(-y^{-α}))
// with d_window playing the role of D̃_j. Assumes sup_t |Θ_t| <= 1 on E_j
// (true for ρ_α- and sup-normalized fields), which pins the support again.
LaplaceEstimate limit_laplace_e_pro(const std::vector<LimitShape>& shapes, const BumpG& g,
                                    double alpha, std::size_t mc_budget, Rng& rng);

// exp(-Σ_j γ*_j |E_j| ∫ E[1 - e^{-Σ_{Ξ*_j} g(yQ_t)}] d(-y^{-α})).
LaplaceEstimate limit_laplace_q(const std::vector<LimitShape>& shapes, const BumpG& g,
                                double alpha, std::size_t mc_budget, Rng& rng);

// One cluster family of the limiting point random field.
struct ClusterStructure {
    ThetaSampler q;                // spectral cluster field sampler
    std::vector<Point> xi_window;  // Ξ*_j ∩ K_R
    double gamma_c = 1.0;          // γ*_j · c_j
    double q_envelope = 1.0;       // bound on sup_t |Q_t|; gates truncation
};

// Draws one configuration of the limit process: for every j, points
// Γ_{j,i}^{-1/α} (γ*_j c_j)^{1/α} Q_{j,i,t} over t in Ξ*_j, stopping once the
// radial bound falls below the floor.
PointConfig sample_cluster_process(const std::vector<ClusterStructure>& structures, double alpha,
                                   double floor, Rng& rng);

// Resampling sampler over the stored conditional snapshots of an empirical
// estimate; requested points must lie in the estimate's offset window.
ThetaSampler sampler_from_estimate(const SpectralEstimate& est);

}  // namespace rfe
