#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "rfe/index_set.hpp"
#include "rfe/lattice_union.hpp"
#include "rfe/rng.hpp"
#include "rfe/stats.hpp"

namespace rfe {

// Spectral-function sampler for the max-stable construction
// X_t = max_i U_i V_{i,t}. `sample` draws one realization of V at the given
// points (values aligned with the point list). `envelope` bounds sup_t V_t;
// it gates series truncation, so a sampler without one cannot be simulated.
// `mean_v0` is E[V_0] when known analytically (0 means "estimate by MC").
struct VSampler {
    int dim = 1;
    std::function<std::vector<double>(Rng&, const std::vector<Point>&)> sample;
    double envelope = 0.0;
    double mean_v0 = 0.0;
};

// V ≡ value at every point.
VSampler v_constant(double value, int dim);

// V_t = kernel(t - S) with S a uniform shift over a torus of the given
// half-width, scaled so the resulting max-stable field restricted to
// K_{window_radius} is exactly the moving-maxima field with this kernel
// (requires torus_half >= window_radius + kernel support radius). Unit
// Fréchet machinery, so the kernel is used as-is (α = 1).
VSampler v_moving_maxima(const std::vector<std::pair<Point, double>>& kernel,
                         std::int64_t window_radius, std::int64_t torus_half);

struct IIDFrechet {
    double alpha = 1.0;
    double scale = 1.0;
    int dim = 1;
};

// X_t = max_j a_j Z_{t-j}^{1/1}, Z iid Fréchet(α): P(X_0 <= u) = exp(-Σa_j^α u^{-α}).
struct MovingMaxima {
    std::vector<std::pair<Point, double>> kernel;  // finite support, a_j >= 0
    double alpha = 1.0;
};

// X_t = max_i U_i V_{i,t}, U_i = 1/Γ_i (unit-rate Poisson arrivals). 1-Fréchet
// marginals with scale E[V_0].
struct DeHaanMaxStable {
    VSampler v;
    double rel_tol = 1e-6;
};

// X_t = Σ_j c_j Z_{t-j}, Z iid symmetric Pareto(α). Marginal tail is only
// asymptotic: P(|X_0| > u) ~ Σ|c_j|^α u^{-α}.
struct LinearHeavyTail {
    std::vector<std::pair<Point, double>> coeffs;
    double alpha = 2.0;
};

using FieldModel = std::variant<IIDFrechet, MovingMaxima, DeHaanMaxStable, LinearHeavyTail>;

int model_dim(const FieldModel& m);
double model_alpha(const FieldModel& m);

struct FieldRealization {
    IndexSet window;
    std::vector<double> values;  // aligned with window.points()
    std::uint64_t seed = 0;
    double truncation_bound = 0.0;  // de Haan only: residual series bound

    double at(const Point& p) const;
};

// Deterministic given (model, window, seed); the window law is stationary
// (noise-driven models pad the window by the kernel support).
FieldRealization simulate(const FieldModel& model, const IndexSet& window, std::uint64_t seed);

// u -> P(|X_0| > u), exact for the max-stable/Fréchet models.
std::function<double(double)> marginal_tail(const FieldModel& model);

// Sampler of the spectral tail field Θ on requested points (|Θ_0| = 1).
struct ThetaSampler {
    int dim = 1;
    std::function<std::vector<double>(Rng&, const std::vector<Point>&)> sample;
};

// Analytic Θ for IIDFrechet and MovingMaxima; throws for the others.
ThetaSampler spectral_tail_oracle(const FieldModel& model);

// MC estimate of P(Y_{t_1} < y_1, ..., Y_{t_n} < y_n) for the tail field of
// the max-stable field built from V:
//   (1/E[V_0]) { E[max(max_i V_{t_i}/y_i, V_0)] - E[max_i V_{t_i}/y_i] }
// with a delta-method standard error. Pure function of the V law.
MeanSE maxstable_tail_oracle(const VSampler& v, const std::vector<Point>& pts,
                             const std::vector<double>& levels, std::size_t mc_budget, Rng& rng);

struct DecayPoint {
    Point t;
    double mean_given = 0.0;  // E[V_t · 1(max_{E} V ≠ 0)]
    double cond_prob = 0.0;   // P(V_t > eps | max_{E} V ≠ 0)
};

struct DecayCurve {
    std::vector<DecayPoint> points;  // |t| increasing
    double tail_value = 0.0;         // cond_prob at the largest radius
    bool decays = false;             // tail_value <= eps
};

// Probes whether V decorrelates from the pattern E along the support H:
// estimates the two conditional quantities at points of H^+ ordered by |t|.
DecayCurve br_condition_diagnostic(const VSampler& v, const LatticeUnion& h,
                                   const std::vector<Point>& e_set,
                                   const std::vector<std::int64_t>& radii,
                                   const InvariantOrder& order, std::size_t mc_budget, Rng& rng,
                                   double eps = 0.05);

}  // namespace rfe
