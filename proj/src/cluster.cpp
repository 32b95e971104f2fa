#include "rfe/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <unordered_map>

namespace rfe {

double normalizer(const std::function<double(double)>& tail, double size) {
    if (size <= 1.0) throw std::invalid_argument("normalizer: index set size must exceed 1");
    const double target = 1.0 / size;
    double lo = 1e-12, hi = 1.0;
    if (tail(lo) < target)
        throw std::runtime_error("normalizer: tail function not decreasing toward 1 at 0");
    while (tail(hi) > target) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("normalizer: tail never falls below 1/|set|");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (tail(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double normalizer_empirical(std::vector<double> samples, double size) {
    if (static_cast<double>(samples.size()) < 10.0 * size)
        throw std::invalid_argument("normalizer_empirical: need at least 10·|set| samples");
    for (double& v : samples) v = std::abs(v);
    std::sort(samples.begin(), samples.end());
    auto idx = static_cast<std::size_t>((1.0 - 1.0 / size) * static_cast<double>(samples.size()));
    if (idx >= samples.size()) idx = samples.size() - 1;
    return samples[idx];
}

PointConfig exceedance_process(const FieldRealization& real, const IndexSet& lambda, double a,
                               double floor) {
    if (floor < 0) throw std::invalid_argument("exceedance_process: negative floor");
    PointConfig out;
    out.floor = floor;
    for (const Point& t : lambda.points()) {
        double v = real.at(t) / a;
        if (std::abs(v) > floor) out.points.push_back(v);
    }
    return out;
}

MeanSE empirical_laplace(const std::vector<PointConfig>& configs, const BumpG& g) {
    if (configs.size() < 30)
        throw std::invalid_argument("empirical_laplace: need at least 30 configurations");
    std::vector<double> es;
    es.reserve(configs.size());
    for (const auto& c : configs) {
        double s = 0.0;
        for (double x : c.points) s += g(x);
        es.push_back(std::exp(-s));
    }
    return jackknife(es, [](const std::vector<double>& v) { return mean_se(v).mean; });
}

namespace {

std::int64_t max_norm(const std::vector<Point>& pts) {
    std::int64_t m = 0;
    for (const Point& p : pts) m = std::max(m, p.inf_norm());
    return m;
}

double g_sum(const BumpG& g, double y, const std::vector<double>& theta, std::size_t begin,
             std::size_t end, const std::vector<Point>& pts, std::int64_t radius) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        if (pts[i - begin].inf_norm() <= radius) s += g(y * theta[i]);
    return s;
}

struct Accum {
    std::vector<double> per_shape;       // Σ integrand_j over draws
    std::vector<double> per_shape_half;  // same on the halved windows
    std::vector<double> totals;          // per-draw weighted sum, for the SE
};

LaplaceEstimate reduce(const Accum& acc, const std::vector<LimitShape>& shapes, double b1_pow,
                       std::size_t n) {
    LaplaceEstimate out;
    out.n = n;
    double log_full = 0.0, log_half = 0.0;
    double prod = 1.0;
    for (std::size_t j = 0; j < shapes.size(); ++j) {
        double ij = b1_pow * acc.per_shape[j] / static_cast<double>(n);
        double ijh = b1_pow * acc.per_shape_half[j] / static_cast<double>(n);
        log_full += shapes[j].weight * ij;
        log_half += shapes[j].weight * ijh;
        prod *= std::pow(std::exp(-ij), shapes[j].weight);
    }
    out.value = std::exp(-log_full);
    out.value_product_form = prod;
    out.truncation_residual = std::abs(out.value - std::exp(-log_half));
    out.se = out.value * b1_pow * mean_se(acc.totals).se;
    return out;
}

}  // namespace

LaplaceEstimate limit_laplace_psi_l(const std::vector<LimitShape>& shapes, const BumpG& g,
                                    double alpha, std::size_t mc_budget, Rng& rng) {
    double wsum = 0.0;
    for (const auto& s : shapes) wsum += s.weight;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("limit_laplace: shape weights must sum to 1");
    const double b1_pow = std::pow(g.b1, -alpha);
    Accum acc;
    acc.per_shape.assign(shapes.size(), 0.0);
    acc.per_shape_half.assign(shapes.size(), 0.0);
    acc.totals.reserve(mc_budget);
    for (std::size_t r = 0; r < mc_budget; ++r) {
        double y = g.b1 * std::pow(rng.uniform(), -1.0 / alpha);
        double total = 0.0;
        for (std::size_t j = 0; j < shapes.size(); ++j) {
            const auto& sh = shapes[j];
            std::vector<Point> pts = sh.d_window;
            pts.push_back(Point::zero(sh.theta.dim));
            auto th = sh.theta.sample(rng, pts);
            double origin = 1.0 - std::exp(-g(y * th.back()));
            std::int64_t rad = max_norm(sh.d_window);
            double full = origin * std::exp(-g_sum(g, y, th, 0, sh.d_window.size(),
                                                   sh.d_window, rad));
            double half = origin * std::exp(-g_sum(g, y, th, 0, sh.d_window.size(),
                                                   sh.d_window, rad / 2));
            acc.per_shape[j] += full;
            acc.per_shape_half[j] += half;
            total += sh.weight * full;
        }
        acc.totals.push_back(total);
    }
    return reduce(acc, shapes, b1_pow, mc_budget);
}

LaplaceEstimate limit_laplace_e_pro(const std::vector<LimitShape>& shapes, const BumpG& g,
                                    double alpha, std::size_t mc_budget, Rng& rng) {
    const double b1_pow = std::pow(g.b1, -alpha);
    Accum acc;
    acc.per_shape.assign(shapes.size(), 0.0);
    acc.per_shape_half.assign(shapes.size(), 0.0);
    acc.totals.reserve(mc_budget);
    for (std::size_t r = 0; r < mc_budget; ++r) {
        double y = g.b1 * std::pow(rng.uniform(), -1.0 / alpha);
        double total = 0.0;
        for (std::size_t j = 0; j < shapes.size(); ++j) {
            const auto& sh = shapes[j];
            std::vector<Point> pts = sh.e_set;
            pts.insert(pts.end(), sh.d_window.begin(), sh.d_window.end());
            auto th = sh.theta.sample(rng, pts);
            double ge = 0.0;
            for (std::size_t i = 0; i < sh.e_set.size(); ++i) ge += g(y * th[i]);
            std::int64_t rad = max_norm(sh.d_window);
            double tail_full = g_sum(g, y, th, sh.e_set.size(), pts.size(), sh.d_window, rad);
            double tail_half = g_sum(g, y, th, sh.e_set.size(), pts.size(), sh.d_window, rad / 2);
            double full = (1.0 - std::exp(-ge)) * std::exp(-tail_full);
            double half = (1.0 - std::exp(-ge)) * std::exp(-tail_half);
            acc.per_shape[j] += full;
            acc.per_shape_half[j] += half;
            total += sh.weight * full;
        }
        acc.totals.push_back(total);
    }
    return reduce(acc, shapes, b1_pow, mc_budget);
}

LaplaceEstimate limit_laplace_q(const std::vector<LimitShape>& shapes, const BumpG& g,
                                double alpha, std::size_t mc_budget, Rng& rng) {
    const double b1_pow = std::pow(g.b1, -alpha);
    Accum acc;
    acc.per_shape.assign(shapes.size(), 0.0);
    acc.per_shape_half.assign(shapes.size(), 0.0);
    acc.totals.reserve(mc_budget);
    for (std::size_t r = 0; r < mc_budget; ++r) {
        double y = g.b1 * std::pow(rng.uniform(), -1.0 / alpha);
        double total = 0.0;
        for (std::size_t j = 0; j < shapes.size(); ++j) {
            const auto& sh = shapes[j];
            auto q = sh.theta.sample(rng, sh.xi_window);
            std::int64_t rad = max_norm(sh.xi_window);
            double full = 1.0 - std::exp(-g_sum(g, y, q, 0, sh.xi_window.size(),
                                                sh.xi_window, rad));
            double half = 1.0 - std::exp(-g_sum(g, y, q, 0, sh.xi_window.size(),
                                                sh.xi_window, rad / 2));
            acc.per_shape[j] += full;
            acc.per_shape_half[j] += half;
            total += sh.weight * full;
        }
        acc.totals.push_back(total);
    }
    return reduce(acc, shapes, b1_pow, mc_budget);
}

PointConfig sample_cluster_process(const std::vector<ClusterStructure>& structures, double alpha,
                                   double floor, Rng& rng) {
    if (floor <= 0) throw std::invalid_argument("sample_cluster_process: floor must be positive");
    PointConfig out;
    out.floor = floor;
    for (const auto& st : structures) {
        if (st.q_envelope <= 0)
            throw std::invalid_argument("sample_cluster_process: cluster field envelope required");
        double gamma = 0.0;
        const double scale = std::pow(st.gamma_c, 1.0 / alpha);
        while (true) {
            gamma += rng.exponential();
            double radius = std::pow(gamma, -1.0 / alpha) * scale;
            if (radius * st.q_envelope <= floor) break;
            auto q = st.q.sample(rng, st.xi_window);
            for (double v : q) {
                double x = radius * v;
                if (std::abs(x) > floor) out.points.push_back(x);
            }
        }
    }
    return out;
}

ThetaSampler sampler_from_estimate(const SpectralEstimate& est) {
    if (est.samples.empty()) throw std::invalid_argument("sampler_from_estimate: empty estimate");
    auto index = std::make_shared<std::unordered_map<Point, std::size_t, PointHash>>();
    for (std::size_t i = 0; i < est.window.size(); ++i) (*index)[est.window[i]] = i;
    auto samples = std::make_shared<std::vector<SpectralSample>>(est.samples);
    ThetaSampler s;
    s.dim = est.window.empty() ? 0 : est.window.front().dim();
    s.sample = [index, samples](Rng& rng, const std::vector<Point>& pts) {
        const auto& sm = (*samples)[rng.index(samples->size())];
        std::vector<double> out;
        out.reserve(pts.size());
        for (const Point& p : pts) {
            auto it = index->find(p);
            if (it == index->end())
                throw std::invalid_argument("sampler_from_estimate: point outside stored window");
            out.push_back(sm.values[it->second]);
        }
        return out;
    };
    return s;
}

}  // namespace rfe
