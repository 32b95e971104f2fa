#include "rfe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rfe {

MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (static_cast<double>(r.n) * static_cast<double>(r.n - 1)));
    return r;
}

MeanSE jackknife(const std::vector<double>& xs,
                 const std::function<double(const std::vector<double>&)>& stat) {
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("jackknife needs at least two observations");
    MeanSE r;
    r.n = n;
    r.mean = stat(xs);
    std::vector<double> loo(n);
    std::vector<double> reduced(xs.begin() + 1, xs.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) reduced[i - 1] = xs[i - 1];  // swap element i out
        loo[i] = stat(reduced);
    }
    double m = std::accumulate(loo.begin(), loo.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : loo) ss += (v - m) * (v - m);
    r.se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    return r;
}

double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

double dkw_band(std::size_t n, double confidence) {
    if (n == 0) throw std::invalid_argument("dkw_band: empty sample");
    double alpha = 1.0 - confidence;
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

// Lanczos log-gamma, then the standard series/continued-fraction split for
// the regularized incomplete gamma.
namespace {

double log_gamma(double x) { return std::lgamma(x); }

double gamma_p_series(double s, double x) {
    double sum = 1.0 / s, term = sum;
    for (int k = 1; k < 500; ++k) {
        term *= x / (s + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
}

double gamma_q_cf(double s, double x) {
    double b = x + 1.0 - s, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
}

}  // namespace

double gamma_q(double s, double x) {
    if (x < 0 || s <= 0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

double chi_square_gof_pvalue(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& expected_probs) {
    if (observed.size() != expected_probs.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    double total = 0.0;
    for (auto o : observed) total += static_cast<double>(o);
    // pool trailing cells with expected count below 5
    std::vector<double> obs, exp;
    double pool_o = 0.0, pool_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_probs[i] * total;
        if (e < 5.0) {
            pool_o += static_cast<double>(observed[i]);
            pool_e += e;
        } else {
            obs.push_back(static_cast<double>(observed[i]));
            exp.push_back(e);
        }
    }
    if (pool_e > 0) {
        obs.push_back(pool_o);
        exp.push_back(pool_e);
    }
    if (obs.size() < 2) return 1.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i)
        stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    double dof = static_cast<double>(obs.size() - 1);
    return gamma_q(dof / 2.0, stat / 2.0);
}

namespace {

double dcor_stat(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<std::size_t>& perm_y) {
    const std::size_t n = x.size();
    auto centered = [&](const std::vector<double>& v, bool permute) {
        std::vector<double> a(n * n), row(n, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double vi = permute ? v[perm_y[i]] : v[i];
                double vj = permute ? v[perm_y[j]] : v[j];
                double d = std::abs(vi - vj);
                a[i * n + j] = d;
                row[i] += d;
                grand += d;
            }
        for (auto& r : row) r /= static_cast<double>(n);
        grand /= static_cast<double>(n) * static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] += grand - row[i] - row[j];
        return a;
    };
    auto A = centered(x, false);
    auto B = centered(y, true);
    double vxy = 0.0, vxx = 0.0, vyy = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
        vxy += A[i] * B[i];
        vxx += A[i] * A[i];
        vyy += B[i] * B[i];
    }
    double denom = std::sqrt(vxx * vyy);
    return denom > 0 ? std::sqrt(std::max(0.0, vxy) / std::sqrt(vxx * vyy)) : 0.0;
}

}  // namespace

DistanceCorrelation distance_correlation(const std::vector<double>& x,
                                         const std::vector<double>& y, Rng& rng,
                                         std::size_t permutations) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("distance_correlation: need paired samples, n >= 4");
    // cap the O(n^2) cost: subsample deterministically when large
    std::vector<double> xs = x, ys = y;
    const std::size_t cap = 400;
    if (xs.size() > cap) {
        std::vector<double> sx, sy;
        double step = static_cast<double>(xs.size()) / static_cast<double>(cap);
        for (std::size_t i = 0; i < cap; ++i) {
            auto idx = static_cast<std::size_t>(i * step);
            sx.push_back(xs[idx]);
            sy.push_back(ys[idx]);
        }
        xs = std::move(sx);
        ys = std::move(sy);
    }
    const std::size_t n = xs.size();
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    DistanceCorrelation out;
    out.dcor = dcor_stat(xs, ys, id);
    std::size_t ge = 0;
    std::vector<std::size_t> perm = id;
    for (std::size_t p = 0; p < permutations; ++p) {
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        if (dcor_stat(xs, ys, perm) >= out.dcor) ++ge;
    }
    out.p_value = (static_cast<double>(ge) + 1.0) / (static_cast<double>(permutations) + 1.0);
    return out;
}

}  // namespace rfe
