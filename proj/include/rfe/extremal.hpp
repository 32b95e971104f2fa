#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfe/cluster.hpp"
#include "rfe/field.hpp"
#include "rfe/order.hpp"
#include "rfe/stats.hpp"

namespace rfe {

struct ThetaEstimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t blocks = 0;
    std::size_t block_hits = 0;
};

// Block estimator P(max over a block > u) / (block size · P(|X_0| > u)).
// Realization windows must be full hyperrectangles; blocks are aligned tiles
// of side r_n fully inside the window.
ThetaEstimate block_theta(const std::vector<FieldRealization>& reals, std::int64_t r_n, double u_n);

// The two spectral expressions of the block index in the D-form:
//   Σ_j λ_j E[sup_{D_j∪{0}}|Θ|^α − sup_{D_j}|Θ|^α]
//   Σ_j λ_j P(Y·sup_{D_j}|Θ| ≤ 1),  Y Pareto(α) independent of Θ
struct UIndexEstimate {
    double sup_diff = 0.0;
    double sup_diff_se = 0.0;
    double prob_form = 0.0;
    double prob_form_se = 0.0;
    std::size_t n = 0;
};

UIndexEstimate theta_u_index(const ThetaSampler& theta,
                             const std::vector<std::pair<std::vector<Point>, double>>& shapes,
                             double alpha, std::size_t mc_budget, Rng& rng);

// One repeating structure in the lattice case (pattern E_j = {0}).
struct LatticeShape {
    std::vector<Point> xi_window;  // Ξ*_j ∩ K_R, must contain 0
    double lambda = 1.0;
    std::size_t pattern_size = 1;  // |E_j|; anything other than 1 is rejected
};

struct LatticeForms {
    double q_form = 0.0;       // E[sup_{Ξ*}|Q|^α]
    double ratio_form = 0.0;   // E[sup|Θ|^α / Σ|Θ|^α]
    double argmax_form = 0.0;  // E[|Θ_0|^α 1(T* = 0)]
    double q_se = 0.0, ratio_se = 0.0, argmax_se = 0.0;
    double max_gap = 0.0;      // largest pairwise difference
    double max_gap_se = 0.0;   // joint SE matching that pair
    std::size_t n = 0;
};

LatticeForms theta_lattice_forms(const ThetaSampler& theta,
                                 const std::vector<LatticeShape>& shapes, double alpha,
                                 const InvariantOrder& order, std::size_t mc_budget, Rng& rng);

struct ArgmaxResult {
    bool found = false;
    bool truncation_miss = false;  // best block sits on the window boundary
    Point t;
};

// T*: the ≺-least lattice point whose pattern block attains the overall max
// strictly above every ≺-earlier block and at least every later one.
ArgmaxResult argmax_T_star(const std::vector<Point>& window, const std::vector<double>& theta,
                           const std::vector<Point>& e_set,
                           const std::vector<Point>& lattice_pts, const InvariantOrder& order);

// General-pattern index: Σ_j γ*_j|E_j| E[max_{z∈E_j}|Θ_{E_j,z}|^α 1(T*_j = 0)].
struct Index4Shape {
    ThetaSampler theta;                 // Θ_{E_j} sampler (ρ_α-normalized)
    std::vector<Point> e_set;           // pattern E_j
    std::vector<Point> lattice_window;  // L_j ∩ K_R
    double weight = 1.0;                // γ*_j · |E_j|
};

struct Index4Estimate {
    double value = 0.0;
    double se = 0.0;
    double truncation_miss_rate = 0.0;  // draws excluded because T* hit the boundary
    std::size_t n = 0;
};

Index4Estimate theta_index4(const std::vector<Index4Shape>& shapes, double alpha,
                            const InvariantOrder& order, std::size_t mc_budget, Rng& rng);

// Anti-clustering decay: P(exceedance at ≻-successors beyond K_l | exceedance
// at the anchor pattern) along the l grid. Empty e_set means the plain
// single-point anchor; a pattern e_set conditions on max over the pattern and
// widens the excluded cube to K_{2l}.
struct AcPoint {
    std::int64_t l = 0;
    double value = 0.0;
    std::size_t anchors = 0;
};

struct AcCurve {
    std::vector<AcPoint> points;
    double eps = 0.02;
    bool pass = false;  // value at the largest l fell below eps
};

AcCurve ac_diagnostic(const std::vector<FieldRealization>& reals, double u,
                      const std::vector<std::int64_t>& l_grid, const InvariantOrder& order,
                      const std::vector<Point>& e_set = {}, double eps = 0.02);

// KS distance of scaled window maxima against Φ_α^θ(x) = exp(−θ x^{−α}).
struct FrechetGof {
    double ks = 0.0;
    double band = 0.0;
    bool pass = false;
    std::size_t n = 0;
};

FrechetGof frechet_fit(const std::vector<double>& scaled_maxima, double alpha, double theta_hat,
                       double confidence = 0.95);

}  // namespace rfe
