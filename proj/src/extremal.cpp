#include "rfe/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace rfe {

namespace {

struct Box {
    Point lo, hi;
};

// Realization windows for the block scheme must be full hyperrectangles.
Box bounding_box(const IndexSet& w) {
    if (w.empty()) throw std::invalid_argument("block_theta: empty window");
    const int k = w.dim();
    std::vector<std::int64_t> lo(static_cast<std::size_t>(k),
                                 std::numeric_limits<std::int64_t>::max());
    std::vector<std::int64_t> hi(static_cast<std::size_t>(k),
                                 std::numeric_limits<std::int64_t>::min());
    for (const Point& p : w.points())
        for (int a = 0; a < k; ++a) {
            lo[static_cast<std::size_t>(a)] = std::min(lo[static_cast<std::size_t>(a)], p[a]);
            hi[static_cast<std::size_t>(a)] = std::max(hi[static_cast<std::size_t>(a)], p[a]);
        }
    std::size_t vol = 1;
    for (int a = 0; a < k; ++a)
        vol *= static_cast<std::size_t>(hi[static_cast<std::size_t>(a)] -
                                        lo[static_cast<std::size_t>(a)] + 1);
    if (vol != w.size())
        throw std::invalid_argument("block_theta: window is not a full hyperrectangle");
    return {Point(lo), Point(hi)};
}

}  // namespace

ThetaEstimate block_theta(const std::vector<FieldRealization>& reals, std::int64_t r_n,
                          double u_n) {
    if (r_n < 1) throw std::invalid_argument("block_theta: block side must be positive");
    if (reals.empty()) throw std::invalid_argument("block_theta: no realizations");
    const int k = reals.front().window.dim();
    std::size_t block_size = 1;
    for (int a = 0; a < k; ++a) block_size *= static_cast<std::size_t>(r_n);

    std::size_t blocks = 0, block_hits = 0;
    std::size_t sites = 0, site_hits = 0;
    for (const auto& real : reals) {
        Box box = bounding_box(real.window);
        const auto& pts = real.window.points();
        // per-block max over aligned tiles fully inside the box
        std::unordered_map<Point, double, PointHash> bmax;
        std::vector<std::int64_t> cell(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double v = std::abs(real.values[i]);
            ++sites;
            if (v > u_n) ++site_hits;
            bool inside = true;
            for (int a = 0; a < k; ++a) {
                std::int64_t off = pts[i][a] - box.lo[a];
                std::int64_t c = off / r_n;
                std::int64_t extent = box.hi[a] - box.lo[a] + 1;
                if ((c + 1) * r_n > extent) inside = false;
                cell[static_cast<std::size_t>(a)] = c;
            }
            if (!inside) continue;
            Point key(cell);
            auto [it, fresh] = bmax.try_emplace(key, v);
            if (!fresh) it->second = std::max(it->second, v);
        }
        blocks += bmax.size();
        for (const auto& [key, m] : bmax)
            if (m > u_n) ++block_hits;
    }
    if (blocks == 0) throw std::runtime_error("block_theta: window smaller than one block");
    if (block_hits == 0) throw std::runtime_error("block_theta: no block exceeded the level");
    if (site_hits == 0) throw std::runtime_error("block_theta: no site exceeded the level");

    const double pb = static_cast<double>(block_hits) / static_cast<double>(blocks);
    const double pp = static_cast<double>(site_hits) / static_cast<double>(sites);
    ThetaEstimate out;
    out.blocks = blocks;
    out.block_hits = block_hits;
    out.value = pb / (static_cast<double>(block_size) * pp);
    // binomial SEs for numerator and denominator, propagated on the ratio
    double rb = std::sqrt(pb * (1.0 - pb) / static_cast<double>(blocks)) / pb;
    double rp = std::sqrt(pp * (1.0 - pp) / static_cast<double>(sites)) / pp;
    out.se = out.value * std::sqrt(rb * rb + rp * rp);
    return out;
}

UIndexEstimate theta_u_index(const ThetaSampler& theta,
                             const std::vector<std::pair<std::vector<Point>, double>>& shapes,
                             double alpha, std::size_t mc_budget, Rng& rng) {
    if (mc_budget == 0) throw std::invalid_argument("theta_u_index: empty budget");
    double wsum = 0.0;
    for (const auto& [d, w] : shapes) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("theta_u_index: shape weights must sum to 1");

    std::vector<double> diffs, probs;
    diffs.reserve(mc_budget);
    probs.reserve(mc_budget);
    for (std::size_t r = 0; r < mc_budget; ++r) {
        double diff = 0.0, prob = 0.0;
        for (const auto& [d, w] : shapes) {
            std::vector<Point> pts = d;
            pts.push_back(Point::zero(theta.dim));
            auto th = theta.sample(rng, pts);
            double sup_d = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i)
                sup_d = std::max(sup_d, std::abs(th[i]));
            double sup_all = std::max(sup_d, std::abs(th.back()));
            diff += w * (std::pow(sup_all, alpha) - std::pow(sup_d, alpha));
            double y = std::pow(rng.uniform(), -1.0 / alpha);  // Pareto(α)
            prob += w * (y * sup_d <= 1.0 ? 1.0 : 0.0);
        }
        diffs.push_back(diff);
        probs.push_back(prob);
    }
    auto md = mean_se(diffs);
    auto mp = mean_se(probs);
    return {md.mean, md.se, mp.mean, mp.se, mc_budget};
}

LatticeForms theta_lattice_forms(const ThetaSampler& theta,
                                 const std::vector<LatticeShape>& shapes, double alpha,
                                 const InvariantOrder& order, std::size_t mc_budget, Rng& rng) {
    if (mc_budget == 0) throw std::invalid_argument("theta_lattice_forms: empty budget");
    double wsum = 0.0;
    for (const auto& sh : shapes) {
        if (sh.pattern_size != 1)
            throw std::invalid_argument(
                "theta_lattice_forms: only single-point patterns are supported here");
        if (std::find(sh.xi_window.begin(), sh.xi_window.end(), Point::zero(theta.dim)) ==
            sh.xi_window.end())
            throw std::invalid_argument("theta_lattice_forms: window must contain the origin");
        wsum += sh.lambda;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("theta_lattice_forms: weights must sum to 1");

    const Point origin = Point::zero(theta.dim);
    std::vector<double> qf, rf, af;
    qf.reserve(mc_budget);
    rf.reserve(mc_budget);
    af.reserve(mc_budget);
    for (std::size_t r = 0; r < mc_budget; ++r) {
        double q_draw = 0.0, ratio_draw = 0.0, argmax_draw = 0.0;
        for (const auto& sh : shapes) {
            // independent draw for the Q form so the comparison carries MC error
            auto th_q = theta.sample(rng, sh.xi_window);
            double sup_q = 0.0, sum_q = 0.0;
            for (double v : th_q) {
                double p = std::pow(std::abs(v), alpha);
                sup_q = std::max(sup_q, p);
                sum_q += p;
            }
            if (sum_q <= 0.0)
                throw std::runtime_error("theta_lattice_forms: zero field on the window");
            q_draw += sh.lambda * sup_q / sum_q;

            auto th = theta.sample(rng, sh.xi_window);
            double sup = 0.0, sum = 0.0, at0 = 0.0;
            for (std::size_t i = 0; i < th.size(); ++i) {
                double p = std::pow(std::abs(th[i]), alpha);
                sup = std::max(sup, p);
                sum += p;
                if (sh.xi_window[i] == origin) at0 = p;
            }
            if (sum <= 0.0)
                throw std::runtime_error("theta_lattice_forms: zero field on the window");
            ratio_draw += sh.lambda * sup / sum;

            auto am = argmax_T_star(sh.xi_window, th, {origin}, sh.xi_window, order);
            if (am.found && am.t == origin) argmax_draw += sh.lambda * at0;
        }
        qf.push_back(q_draw);
        rf.push_back(ratio_draw);
        af.push_back(argmax_draw);
    }

    LatticeForms out;
    out.n = mc_budget;
    auto mq = mean_se(qf);
    auto mr = mean_se(rf);
    auto ma = mean_se(af);
    out.q_form = mq.mean;
    out.ratio_form = mr.mean;
    out.argmax_form = ma.mean;
    out.q_se = mq.se;
    out.ratio_se = mr.se;
    out.argmax_se = ma.se;

    auto gap = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return mean_se(d);
    };
    for (auto& g : {gap(qf, rf), gap(qf, af), gap(rf, af)}) {
        if (std::abs(g.mean) > out.max_gap) {
            out.max_gap = std::abs(g.mean);
            out.max_gap_se = g.se;
        }
    }
    return out;
}

ArgmaxResult argmax_T_star(const std::vector<Point>& window, const std::vector<double>& theta,
                           const std::vector<Point>& e_set, const std::vector<Point>& lattice_pts,
                           const InvariantOrder& order) {
    if (window.size() != theta.size())
        throw std::invalid_argument("argmax_T_star: value/point count mismatch");
    if (e_set.empty() || lattice_pts.empty())
        throw std::invalid_argument("argmax_T_star: empty pattern or lattice window");
    std::unordered_map<Point, double, PointHash> at;
    for (std::size_t i = 0; i < window.size(); ++i) at[window[i]] = theta[i];

    // block max over the translated pattern; a block with any point outside
    // the supplied window cannot be scored
    double best = -1.0;
    bool have = false;
    Point best_t;
    std::int64_t shell = 0;
    for (const Point& t : lattice_pts) shell = std::max(shell, t.inf_norm());
    bool best_on_shell = false;
    for (const Point& t : lattice_pts) {
        double m = 0.0;
        bool complete = true;
        for (const Point& z : e_set) {
            auto it = at.find(t + z);
            if (it == at.end()) {
                complete = false;
                break;
            }
            m = std::max(m, std::abs(it->second));
        }
        if (!complete) continue;
        // strict improvement over every ≺-earlier block, ties resolved to the
        // ≺-least attaining point
        bool better = !have || m > best || (m == best && order.less(t, best_t));
        if (better) {
            have = true;
            best = m;
            best_t = t;
            best_on_shell = t.inf_norm() == shell;
        }
    }
    ArgmaxResult out;
    if (!have) return out;
    out.truncation_miss = best_on_shell;
    out.found = !best_on_shell;
    out.t = best_t;
    return out;
}

Index4Estimate theta_index4(const std::vector<Index4Shape>& shapes, double alpha,
                            const InvariantOrder& order, std::size_t mc_budget, Rng& rng) {
    if (mc_budget == 0) throw std::invalid_argument("theta_index4: empty budget");
    if (shapes.empty()) throw std::invalid_argument("theta_index4: no shapes");
    const Point origin = Point::zero(shapes.front().e_set.front().dim());

    std::vector<double> draws;
    draws.reserve(mc_budget);
    std::size_t misses = 0;
    for (std::size_t r = 0; r < mc_budget; ++r) {
        double total = 0.0;
        bool missed = false;
        for (const auto& sh : shapes) {
            std::vector<Point> pts;
            pts.reserve(sh.lattice_window.size() * sh.e_set.size());
            for (const Point& t : sh.lattice_window)
                for (const Point& z : sh.e_set) pts.push_back(t + z);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            auto th = sh.theta.sample(rng, pts);
            auto am = argmax_T_star(pts, th, sh.e_set, sh.lattice_window, order);
            if (am.truncation_miss) {
                missed = true;
                continue;
            }
            if (!am.found || !(am.t == origin)) continue;
            std::unordered_map<Point, double, PointHash> at;
            for (std::size_t i = 0; i < pts.size(); ++i) at[pts[i]] = th[i];
            double m = 0.0;
            for (const Point& z : sh.e_set) m = std::max(m, std::abs(at[z]));
            total += sh.weight * std::pow(m, alpha);
        }
        if (missed) {
            ++misses;
            continue;
        }
        draws.push_back(total);
    }
    if (draws.empty()) throw std::runtime_error("theta_index4: every draw hit the boundary");
    auto m = mean_se(draws);
    Index4Estimate out;
    out.value = m.mean;
    out.se = m.se;
    out.n = draws.size();
    out.truncation_miss_rate = static_cast<double>(misses) / static_cast<double>(mc_budget);
    return out;
}

AcCurve ac_diagnostic(const std::vector<FieldRealization>& reals, double u,
                      const std::vector<std::int64_t>& l_grid, const InvariantOrder& order,
                      const std::vector<Point>& e_set, double eps) {
    if (reals.empty()) throw std::invalid_argument("ac_diagnostic: no realizations");
    if (l_grid.empty()) throw std::invalid_argument("ac_diagnostic: empty l grid");
    std::vector<std::int64_t> ls = l_grid;
    std::sort(ls.begin(), ls.end());
    const bool pattern = !e_set.empty();
    const std::int64_t widen = pattern ? 2 : 1;  // pattern anchors exclude K_{2l}

    std::vector<std::size_t> hits(ls.size(), 0);
    std::size_t anchors = 0;
    for (const auto& real : reals) {
        const auto& pts = real.window.points();
        std::unordered_map<Point, double, PointHash> at;
        for (std::size_t i = 0; i < pts.size(); ++i) at[pts[i]] = real.values[i];
        for (const Point& t : pts) {
            double anchor_max = 0.0;
            if (pattern) {
                bool complete = true;
                for (const Point& z : e_set) {
                    auto it = at.find(t + z);
                    if (it == at.end()) {
                        complete = false;
                        break;
                    }
                    anchor_max = std::max(anchor_max, std::abs(it->second));
                }
                if (!complete) continue;
            } else {
                anchor_max = std::abs(at[t]);
            }
            if (!(anchor_max > u)) continue;
            ++anchors;
            // farthest ≻-successor exceedance distance, one pass per anchor
            std::int64_t worst = -1;
            for (const Point& s : pts) {
                if (std::abs(at[s]) <= u) continue;
                Point d = s - t;
                if (!order.positive(d)) continue;
                worst = std::max(worst, d.inf_norm());
            }
            for (std::size_t i = 0; i < ls.size(); ++i)
                if (worst > widen * ls[i]) ++hits[i];
        }
    }
    if (anchors == 0) throw std::runtime_error("ac_diagnostic: no anchor exceeded the level");

    AcCurve out;
    out.eps = eps;
    for (std::size_t i = 0; i < ls.size(); ++i)
        out.points.push_back(
            {ls[i], static_cast<double>(hits[i]) / static_cast<double>(anchors), anchors});
    out.pass = out.points.back().value <= eps;
    return out;
}

FrechetGof frechet_fit(const std::vector<double>& scaled_maxima, double alpha, double theta_hat,
                       double confidence) {
    if (scaled_maxima.size() < 10) throw std::invalid_argument("frechet_fit: too few maxima");
    if (!(alpha > 0) || !(theta_hat > 0))
        throw std::invalid_argument("frechet_fit: alpha and theta must be positive");
    auto cdf = [alpha, theta_hat](double x) {
        return x <= 0 ? 0.0 : std::exp(-theta_hat * std::pow(x, -alpha));
    };
    FrechetGof out;
    out.n = scaled_maxima.size();
    out.ks = ks_distance(scaled_maxima, cdf);
    out.band = dkw_band(out.n, confidence);
    out.pass = out.ks <= out.band;
    return out;
}

}  // namespace rfe
