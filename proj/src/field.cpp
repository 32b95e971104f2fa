#include "rfe/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace rfe {

namespace {

constexpr std::size_t kMaxSeriesTerms = 1u << 24;

int kernel_dim(const std::vector<std::pair<Point, double>>& kernel, const char* what) {
    if (kernel.empty()) throw std::invalid_argument(std::string(what) + ": empty support");
    int k = kernel.front().first.dim();
    for (const auto& [p, a] : kernel) {
        (void)a;
        if (p.dim() != k) throw std::invalid_argument(std::string(what) + ": mixed dimensions");
    }
    return k;
}

}  // namespace

VSampler v_constant(double value, int dim) {
    VSampler v;
    v.dim = dim;
    v.envelope = value;
    v.mean_v0 = value;
    v.sample = [value](Rng&, const std::vector<Point>& pts) {
        return std::vector<double>(pts.size(), value);
    };
    return v;
}

VSampler v_moving_maxima(const std::vector<std::pair<Point, double>>& kernel,
                         std::int64_t window_radius, std::int64_t torus_half) {
    int k = kernel_dim(kernel, "v_moving_maxima");
    std::int64_t support = 0;
    double sum = 0.0, mx = 0.0;
    for (const auto& [p, a] : kernel) {
        if (a < 0) throw std::invalid_argument("v_moving_maxima: negative kernel value");
        support = std::max(support, p.inf_norm());
        sum += a;
        mx = std::max(mx, a);
    }
    if (sum <= 0) throw std::invalid_argument("v_moving_maxima: zero kernel");
    if (torus_half < window_radius + support)
        throw std::invalid_argument("v_moving_maxima: torus too small for the window");

    // shift sites per axis and total count; V_t = N·a_{t-S} makes the
    // per-site intensity exactly unit Fréchet
    const std::int64_t side = 2 * torus_half + 1;
    double n_sites = 1.0;
    for (int i = 0; i < k; ++i) n_sites *= static_cast<double>(side);

    std::unordered_map<Point, double, PointHash> a_map;
    for (const auto& [p, a] : kernel) a_map[p] = a;

    VSampler v;
    v.dim = k;
    v.envelope = n_sites * mx;
    v.mean_v0 = sum;  // N · (1/N) Σ a
    v.sample = [a_map, k, torus_half, n_sites](Rng& rng, const std::vector<Point>& pts) {
        Point s(std::vector<std::int64_t>(static_cast<std::size_t>(k), 0));
        for (int i = 0; i < k; ++i)
            s[i] = -torus_half + static_cast<std::int64_t>(rng.index(
                                     static_cast<std::size_t>(2 * torus_half + 1)));
        std::vector<double> out(pts.size(), 0.0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto it = a_map.find(pts[i] - s);
            if (it != a_map.end()) out[i] = n_sites * it->second;
        }
        return out;
    };
    return v;
}

int model_dim(const FieldModel& m) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IIDFrechet>) return v.dim;
            else if constexpr (std::is_same_v<T, MovingMaxima>)
                return kernel_dim(v.kernel, "MovingMaxima");
            else if constexpr (std::is_same_v<T, DeHaanMaxStable>) return v.v.dim;
            else return kernel_dim(v.coeffs, "LinearHeavyTail");
        },
        m);
}

double model_alpha(const FieldModel& m) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DeHaanMaxStable>) return 1.0;
            else return v.alpha;
        },
        m);
}

double FieldRealization::at(const Point& p) const {
    const auto& pts = window.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), p);
    if (it == pts.end() || !(*it == p)) throw std::out_of_range("point not in realization window");
    return values[static_cast<std::size_t>(it - pts.begin())];
}

namespace {

// noise-driven models: draw iid noise on the window padded by the kernel
// support, then fold with the kernel. One sequential stream over the sorted
// padded set keeps the result deterministic in (window, seed).
FieldRealization convolve_noise(const std::vector<std::pair<Point, double>>& kernel,
                                const IndexSet& window, std::uint64_t seed, bool max_form,
                                const std::function<double(Rng&)>& draw) {
    int k = kernel_dim(kernel, "simulate");
    IndexSet padded(k);
    for (const Point& t : window.points())
        for (const auto& [j, a] : kernel) {
            (void)a;
            padded.insert(t - j);
        }
    Rng rng(substream_seed(seed, "noise"));
    std::unordered_map<Point, double, PointHash> z;
    z.reserve(padded.size());
    for (const Point& p : padded.points()) z[p] = draw(rng);

    FieldRealization out;
    out.window = window;
    out.seed = seed;
    out.values.reserve(window.size());
    for (const Point& t : window.points()) {
        double x = max_form ? 0.0 : 0.0;
        bool first = true;
        for (const auto& [j, a] : kernel) {
            double term = a * z.at(t - j);
            if (max_form) x = first ? term : std::max(x, term);
            else x += term;
            first = false;
        }
        out.values.push_back(x);
    }
    return out;
}

FieldRealization simulate_dehaan(const DeHaanMaxStable& m, const IndexSet& window,
                                 std::uint64_t seed) {
    if (m.v.envelope <= 0.0)
        throw std::invalid_argument(
            "de Haan simulation needs a finite envelope for sup_t V_t; configure one");
    Rng rng(substream_seed(seed, "dehaan"));
    const auto& pts = window.points();
    std::vector<double> x(pts.size(), 0.0);
    double gamma = 0.0;
    double u = std::numeric_limits<double>::infinity();
    std::size_t terms = 0;
    // Once u·envelope < current window minimum, no later series term can
    // raise any value: the realization is exact, not truncated. rel_tol > 1
    // trades that exactness for an earlier stop with bias bound u·envelope.
    const double stop_factor = std::max(m.rel_tol, 1.0);
    while (true) {
        gamma += rng.exponential();
        u = 1.0 / gamma;
        double cur_min = *std::min_element(x.begin(), x.end());
        if (cur_min > 0.0 && u * m.v.envelope < stop_factor * cur_min) break;
        if (++terms > kMaxSeriesTerms)
            throw std::runtime_error("de Haan series failed to converge within the term cap");
        auto v = m.v.sample(rng, pts);
        for (std::size_t i = 0; i < pts.size(); ++i) x[i] = std::max(x[i], u * v[i]);
    }
    FieldRealization out;
    out.window = window;
    out.values = std::move(x);
    out.seed = seed;
    out.truncation_bound = stop_factor > 1.0 ? u * m.v.envelope : 0.0;
    return out;
}

}  // namespace

FieldRealization simulate(const FieldModel& model, const IndexSet& window, std::uint64_t seed) {
    if (window.empty()) throw std::invalid_argument("simulate: empty window");
    return std::visit(
        [&](const auto& m) -> FieldRealization {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDFrechet>) {
                Rng rng(substream_seed(seed, "iid"));
                FieldRealization out;
                out.window = window;
                out.seed = seed;
                out.values.reserve(window.size());
                for (std::size_t i = 0; i < window.size(); ++i)
                    out.values.push_back(rng.frechet(m.alpha, m.scale));
                return out;
            } else if constexpr (std::is_same_v<T, MovingMaxima>) {
                double a = m.alpha;
                return convolve_noise(m.kernel, window, seed, true,
                                      [a](Rng& r) { return r.frechet(a); });
            } else if constexpr (std::is_same_v<T, DeHaanMaxStable>) {
                return simulate_dehaan(m, window, seed);
            } else {
                double a = m.alpha;
                return convolve_noise(m.coeffs, window, seed, false, [a](Rng& r) {
                    double z = r.pareto(a);
                    return r.uniform() < 0.5 ? -z : z;
                });
            }
        },
        model);
}

std::function<double(double)> marginal_tail(const FieldModel& model) {
    return std::visit(
        [](const auto& m) -> std::function<double(double)> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDFrechet>) {
                double a = m.alpha, s = m.scale;
                return [a, s](double u) { return -std::expm1(-std::pow(s / u, a)); };
            } else if constexpr (std::is_same_v<T, MovingMaxima>) {
                double a = m.alpha, c = 0.0;
                for (const auto& [p, v] : m.kernel) {
                    (void)p;
                    c += std::pow(v, a);
                }
                return [a, c](double u) { return -std::expm1(-c * std::pow(u, -a)); };
            } else if constexpr (std::is_same_v<T, DeHaanMaxStable>) {
                double ev = m.v.mean_v0;
                if (ev <= 0.0) {
                    // no analytic E[V_0]: estimate once on a fixed stream
                    Rng rng(substream_seed(0x6d61726769u, "mean-v0"));
                    std::vector<Point> origin = {Point::zero(m.v.dim)};
                    double s = 0.0;
                    const int n = 200000;
                    for (int i = 0; i < n; ++i) s += m.v.sample(rng, origin)[0];
                    ev = s / n;
                }
                return [ev](double u) { return -std::expm1(-ev / u); };
            } else {
                // asymptotic regularly varying tail, clipped at 1
                double a = m.alpha, c = 0.0;
                for (const auto& [p, v] : m.coeffs) {
                    (void)p;
                    c += std::pow(std::abs(v), a);
                }
                return [a, c](double u) { return std::min(1.0, c * std::pow(u, -a)); };
            }
        },
        model);
}

ThetaSampler spectral_tail_oracle(const FieldModel& model) {
    return std::visit(
        [](const auto& m) -> ThetaSampler {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IIDFrechet>) {
                ThetaSampler s;
                s.dim = m.dim;
                s.sample = [dim = m.dim](Rng&, const std::vector<Point>& pts) {
                    std::vector<double> out(pts.size(), 0.0);
                    Point zero = Point::zero(dim);
                    for (std::size_t i = 0; i < pts.size(); ++i)
                        if (pts[i] == zero) out[i] = 1.0;
                    return out;
                };
                return s;
            } else if constexpr (std::is_same_v<T, MovingMaxima>) {
                // Θ_t = a_{J+t}/a_J, P(J = j) ∝ a_j^α
                std::vector<Point> supp;
                std::vector<double> w;
                double total = 0.0;
                for (const auto& [p, a] : m.kernel) {
                    if (a <= 0) continue;
                    supp.push_back(p);
                    total += std::pow(a, m.alpha);
                    w.push_back(total);
                }
                if (supp.empty())
                    throw std::invalid_argument("spectral_tail_oracle: zero kernel");
                std::unordered_map<Point, double, PointHash> a_map;
                for (const auto& [p, a] : m.kernel) a_map[p] = a;
                ThetaSampler s;
                s.dim = supp.front().dim();
                s.sample = [supp, w, total, a_map](Rng& rng, const std::vector<Point>& pts) {
                    double u = rng.uniform() * total;
                    std::size_t j = static_cast<std::size_t>(
                        std::lower_bound(w.begin(), w.end(), u) - w.begin());
                    if (j >= supp.size()) j = supp.size() - 1;
                    const Point& pj = supp[j];
                    double aj = a_map.at(pj);
                    std::vector<double> out(pts.size(), 0.0);
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        auto it = a_map.find(pj + pts[i]);
                        if (it != a_map.end()) out[i] = it->second / aj;
                    }
                    return out;
                };
                return s;
            } else {
                throw std::invalid_argument("spectral_tail_oracle: no analytic form for this model");
            }
        },
        model);
}

MeanSE maxstable_tail_oracle(const VSampler& v, const std::vector<Point>& pts,
                             const std::vector<double>& levels, std::size_t mc_budget, Rng& rng) {
    if (pts.size() != levels.size())
        throw std::invalid_argument("maxstable_tail_oracle: points/levels size mismatch");
    for (double y : levels)
        if (y <= 0) throw std::invalid_argument("maxstable_tail_oracle: levels must be positive");
    if (mc_budget < 100) throw std::invalid_argument("maxstable_tail_oracle: MC budget below 100");
    if (pts.empty()) return {1.0, 0.0, mc_budget};

    std::vector<Point> all = pts;
    all.push_back(Point::zero(v.dim));
    const double n = static_cast<double>(mc_budget);
    // a = max(m, V_0), b = m, c = V_0 with m = max_i V_{t_i}/y_i
    double sa = 0, sb = 0, sc = 0, saa = 0, sbb = 0, scc = 0, sab = 0, sac = 0, sbc = 0;
    for (std::size_t r = 0; r < mc_budget; ++r) {
        auto vals = v.sample(rng, all);
        double m = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) m = std::max(m, vals[i] / levels[i]);
        double v0 = vals.back();
        double a = std::max(m, v0);
        sa += a; sb += m; sc += v0;
        saa += a * a; sbb += m * m; scc += v0 * v0;
        sab += a * m; sac += a * v0; sbc += m * v0;
    }
    double ma = sa / n, mb = sb / n, mc = sc / n;
    if (mc <= 0) throw std::runtime_error("maxstable_tail_oracle: E[V_0] estimated zero");
    double caa = saa / n - ma * ma, cbb = sbb / n - mb * mb, ccc = scc / n - mc * mc;
    double cab = sab / n - ma * mb, cac = sac / n - ma * mc, cbc = sbc / n - mb * mc;
    double p = (ma - mb) / mc;
    // delta method for f(a,b,c) = (a-b)/c
    double ga = 1.0 / mc, gb = -1.0 / mc, gc = -(ma - mb) / (mc * mc);
    double var = ga * ga * caa + gb * gb * cbb + gc * gc * ccc + 2 * ga * gb * cab +
                 2 * ga * gc * cac + 2 * gb * gc * cbc;
    MeanSE out;
    out.mean = p;
    out.se = std::sqrt(std::max(0.0, var) / n);
    out.n = mc_budget;
    return out;
}

DecayCurve br_condition_diagnostic(const VSampler& v, const LatticeUnion& h,
                                   const std::vector<Point>& e_set,
                                   const std::vector<std::int64_t>& radii,
                                   const InvariantOrder& order, std::size_t mc_budget, Rng& rng,
                                   double eps) {
    if (radii.empty()) throw std::invalid_argument("br_condition_diagnostic: empty radius schedule");
    std::int64_t rmax = *std::max_element(radii.begin(), radii.end());
    IndexSet probe_set = h.positive_part(rmax, order);
    std::vector<Point> probes(probe_set.points().begin(), probe_set.points().end());
    std::sort(probes.begin(), probes.end(), [](const Point& a, const Point& b) {
        if (a.inf_norm() != b.inf_norm()) return a.inf_norm() < b.inf_norm();
        return a < b;
    });

    std::vector<Point> all = e_set;
    all.insert(all.end(), probes.begin(), probes.end());
    std::vector<double> mean_given(probes.size(), 0.0), exceed(probes.size(), 0.0);
    std::size_t cond_hits = 0;
    for (std::size_t r = 0; r < mc_budget; ++r) {
        auto vals = v.sample(rng, all);
        double me = 0.0;
        for (std::size_t i = 0; i < e_set.size(); ++i) me = std::max(me, vals[i]);
        if (me == 0.0) continue;
        ++cond_hits;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            double vt = vals[e_set.size() + i];
            mean_given[i] += vt;
            if (vt > eps) exceed[i] += 1.0;
        }
    }
    DecayCurve out;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        DecayPoint dp;
        dp.t = probes[i];
        dp.mean_given = mean_given[i] / static_cast<double>(mc_budget);
        dp.cond_prob = cond_hits > 0 ? exceed[i] / static_cast<double>(cond_hits) : 0.0;
        out.points.push_back(dp);
    }
    if (!out.points.empty()) out.tail_value = out.points.back().cond_prob;
    out.decays = out.tail_value <= eps;
    return out;
}

}  // namespace rfe
