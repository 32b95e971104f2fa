#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rfe/rng.hpp"

namespace rfe {

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(const std::vector<double>& xs);

// leave-one-out jackknife of an arbitrary statistic over blocks
MeanSE jackknife(const std::vector<double>& xs,
                 const std::function<double(const std::vector<double>&)>& stat);

// Kolmogorov–Smirnov distance between the empirical law of xs and a CDF.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf);

// 95% Dvoretzky–Kiefer–Wolfowitz band half-width for sample size n.
double dkw_band(std::size_t n, double confidence = 0.95);

// Two-sided chi-square goodness-of-fit p-value from observed counts and
// expected probabilities (expected counts below 5 are pooled).
double chi_square_gof_pvalue(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& expected_probs);

// Distance correlation between paired samples, plus a permutation p-value
// for independence (p small → dependent).
struct DistanceCorrelation {
    double dcor = 0.0;
    double p_value = 1.0;
};
DistanceCorrelation distance_correlation(const std::vector<double>& x,
                                         const std::vector<double>& y, Rng& rng,
                                         std::size_t permutations = 200);

// Regularized upper incomplete gamma Q(s, x); used by the chi-square test.
double gamma_q(double s, double x);

}  // namespace rfe
