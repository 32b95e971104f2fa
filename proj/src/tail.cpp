#include "rfe/tail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace rfe {

double modulus_eval(const Modulus& rho, const std::vector<Point>& pts,
                    const std::vector<double>& vals) {
    if (pts.size() != vals.size()) throw std::invalid_argument("modulus_eval: ragged patch");
    std::unordered_map<Point, double, PointHash> m;
    for (std::size_t i = 0; i < pts.size(); ++i) m[pts[i]] = vals[i];
    double sup = 0.0, sum = 0.0;
    for (const Point& t : rho.upsilon.points()) {
        auto it = m.find(t);
        if (it == m.end()) throw std::invalid_argument("modulus_eval: patch does not cover the restriction set");
        double a = std::abs(it->second);
        sup = std::max(sup, a);
        sum += std::pow(a, rho.alpha);
    }
    return rho.kind == ModulusKind::SupNorm ? sup : std::pow(sum, 1.0 / rho.alpha);
}

std::pair<double, double> modulus_constants(const Modulus& rho) {
    if (rho.kind == ModulusKind::SupNorm) return {1.0, 1.0};
    double n = static_cast<double>(rho.upsilon.size());
    return {std::pow(n, -1.0 / rho.alpha), 1.0};
}

namespace {

std::int64_t diameter(const IndexSet& s) {
    std::int64_t d = 0;
    for (const Point& p : s.points()) d = std::max(d, p.inf_norm());
    return d;
}

// anchors must see the full offset window and sit a margin away from the
// data edge; membership of the whole cube around the anchor enforces both
bool interior(const IndexSetView& view, const Point& t0, const IndexSet& margin_cube) {
    for (const Point& m : margin_cube.points())
        if (!view.contains(t0 + m)) return false;
    return true;
}

SpectralEstimate estimate_impl(const std::vector<FieldRealization>& reals, double u,
                               const IndexSet& w, double alpha, const Modulus* rho) {
    if (reals.empty()) throw std::invalid_argument("spectral estimate: no realizations");
    int k = reals.front().window.dim();
    std::int64_t margin = diameter(w);
    std::vector<Point> ups_pts;
    if (rho) {
        margin = std::max(margin, diameter(rho->upsilon));
        ups_pts = rho->upsilon.points();
    }
    IndexSet cube = hypercube(margin, k);

    SpectralEstimate out;
    out.window = w.points();
    out.threshold = u;
    out.alpha = alpha;
    double observed_max = 0.0;
    for (const FieldRealization& r : reals) {
        IndexSetView view(r.window);
        for (const Point& t0 : r.window.points()) {
            double norm;
            if (rho) {
                if (!interior(view, t0, cube)) continue;
                std::vector<double> pv;
                pv.reserve(ups_pts.size());
                for (const Point& s : ups_pts) pv.push_back(r.at(t0 + s));
                norm = modulus_eval(*rho, ups_pts, pv);
            } else {
                norm = std::abs(r.at(t0));
            }
            observed_max = std::max(observed_max, norm);
            if (norm <= u) continue;
            if (!rho && !interior(view, t0, cube)) continue;
            SpectralSample sm;
            sm.anchor = t0;
            sm.radial = norm / u;
            sm.values.reserve(out.window.size());
            for (const Point& s : out.window) sm.values.push_back(r.at(t0 + s) / norm);
            out.samples.push_back(std::move(sm));
        }
    }
    if (out.samples.empty())
        throw std::runtime_error("spectral estimate: no exceedances above " + std::to_string(u) +
                                 " (observed max " + std::to_string(observed_max) + ")");
    return out;
}

}  // namespace

SpectralEstimate estimate_spectral_tail(const std::vector<FieldRealization>& reals, double u,
                                        const IndexSet& w, double alpha) {
    return estimate_impl(reals, u, w, alpha, nullptr);
}

SpectralEstimate estimate_upsilon_tail(const std::vector<FieldRealization>& reals,
                                       const Modulus& rho, double u, const IndexSet& w,
                                       double alpha) {
    return estimate_impl(reals, u, w, alpha, &rho);
}

double BumpG::operator()(double x) const {
    double a = std::abs(x);
    if (a <= b1 || a >= b2) return 0.0;
    double up = std::min(1.0, (a - b1) / (0.1 * b1));
    double down = std::min(1.0, (b2 - a) / (b2 - b2 / 1.1));
    return c * std::min(up, down);
}

TimeChangeReport time_change_check(const ThetaSampler& theta, const BumpG& g, const Point& s,
                                   const Point& t, double alpha, std::size_t mc_budget, Rng& rng,
                                   bool y_version) {
    std::vector<Point> pts = {t - s, -s, t, s};
    std::vector<double> diffs;
    diffs.reserve(mc_budget);
    double sl = 0.0, sr = 0.0;
    for (std::size_t i = 0; i < mc_budget; ++i) {
        auto v = theta.sample(rng, pts);
        double th_ts = v[0], th_ms = v[1], th_t = v[2], th_s = v[3];
        double lhs, rhs;
        if (y_version) {
            double q = std::pow(rng.uniform(), -1.0 / alpha);  // Pareto(α), q >= 1
            lhs = th_ms != 0.0 ? g(q * th_ts) : 0.0;
            rhs = th_s != 0.0 ? std::pow(std::abs(th_s), alpha) * g(q * th_t / std::abs(th_s))
                              : 0.0;
        } else {
            lhs = th_ms != 0.0 ? g(th_ts) : 0.0;
            rhs = th_s != 0.0 ? std::pow(std::abs(th_s), alpha) * g(th_t / std::abs(th_s)) : 0.0;
        }
        sl += lhs;
        sr += rhs;
        diffs.push_back(lhs - rhs);
    }
    TimeChangeReport rep;
    rep.n = mc_budget;
    rep.lhs = sl / static_cast<double>(mc_budget);
    rep.rhs = sr / static_cast<double>(mc_budget);
    rep.se = mean_se(diffs).se;
    return rep;
}

ClusterField cluster_field(const std::vector<Point>& window, const std::vector<double>& theta,
                           const LatticeUnion& a, const Modulus& rho, double alpha,
                           std::int64_t r) {
    if (window.size() != theta.size()) throw std::invalid_argument("cluster_field: ragged input");
    std::unordered_map<Point, double, PointHash> m;
    for (std::size_t i = 0; i < window.size(); ++i) m[window[i]] = theta[i];
    // ρ of the Υ-patch at translate t; values outside the window count as 0
    // (the window is itself a truncation)
    auto rho_at = [&](const Point& t) {
        double sup = 0.0, sum = 0.0;
        for (const Point& s : rho.upsilon.points()) {
            auto it = m.find(t + s);
            double v = it == m.end() ? 0.0 : std::abs(it->second);
            sup = std::max(sup, v);
            sum += std::pow(v, rho.alpha);
        }
        return rho.kind == ModulusKind::SupNorm ? sup : std::pow(sum, 1.0 / rho.alpha);
    };
    auto norm_within = [&](std::int64_t c) {
        IndexSet pts = a.intersect_cube(c);
        double acc = 0.0;
        for (const Point& t : pts.points()) acc += std::pow(rho_at(t), alpha);
        return std::pow(acc, 1.0 / alpha);
    };
    ClusterField out;
    out.window = window;
    out.norm = norm_within(r);
    if (out.norm <= 0.0) throw std::runtime_error("cluster_field: zero norm over the index set");
    out.tail_mass_proxy = out.norm - norm_within(r / 2);
    out.q.reserve(theta.size());
    for (double v : theta) out.q.push_back(v / out.norm);
    return out;
}

}  // namespace rfe
