#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rfe/cluster.hpp"
#include "rfe/extremal.hpp"
#include "rfe/tail.hpp"

using namespace rfe;

namespace {

IndexSet segment(std::int64_t a, std::int64_t b) {
    IndexSet s(1);
    for (std::int64_t x = a; x <= b; ++x) s.insert(Point{x});
    return s;
}

IndexSet rect2(std::int64_t x0, std::int64_t x1, std::int64_t y0, std::int64_t y1) {
    IndexSet s(2);
    for (std::int64_t x = x0; x <= x1; ++x)
        for (std::int64_t y = y0; y <= y1; ++y) s.insert(Point{x, y});
    return s;
}

MovingMaxima mm11() { return MovingMaxima{{{Point{0}, 1.0}, {Point{1}, 1.0}}, 1.0}; }
MovingMaxima mm21() { return MovingMaxima{{{Point{0}, 2.0}, {Point{1}, 1.0}}, 1.0}; }

std::vector<FieldRealization> simulate_many(const FieldModel& m, const IndexSet& w, int reps,
                                            std::uint64_t root) {
    std::vector<FieldRealization> out;
    out.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i)
        out.push_back(simulate(m, w, substream_seed(root, "real", static_cast<std::uint64_t>(i))));
    return out;
}

std::vector<Point> range_pts(std::int64_t a, std::int64_t b) {
    std::vector<Point> out;
    for (std::int64_t x = a; x <= b; ++x) out.push_back(Point{x});
    return out;
}

}  // namespace

TEST_CASE("block estimator recovers the known indices") {
    const std::int64_t n = 4096, r = 64;
    const auto window = segment(0, n - 1);

    // iid: theta = 1, mild downward clumping bias at finite n
    {
        FieldModel m = IIDFrechet{1.0, 1.0, 1};
        double u = normalizer(marginal_tail(m), static_cast<double>(n) / 4.0);
        auto est = block_theta(simulate_many(m, window, 200, 31), r, u);
        CHECK(std::abs(est.value - 1.0) < 0.12);
        CHECK(est.se < 0.08);
    }
    // moving maxima pairs: theta = 1/2
    {
        FieldModel m = mm11();
        double u = normalizer(marginal_tail(m), static_cast<double>(n) / 4.0);
        auto est = block_theta(simulate_many(m, window, 300, 32), r, u);
        CHECK(std::abs(est.value - 0.5) < 0.10);
    }
    // unequal kernel: theta = max a / sum a = 2/3
    {
        FieldModel m = mm21();
        double u = normalizer(marginal_tail(m), static_cast<double>(n) / 4.0);
        auto est = block_theta(simulate_many(m, window, 300, 33), r, u);
        CHECK(std::abs(est.value - 2.0 / 3.0) < 0.10);
    }
}

TEST_CASE("block estimator rejects bad inputs") {
    FieldModel m = IIDFrechet{1.0, 1.0, 1};
    auto reals = simulate_many(m, segment(0, 99), 3, 40);
    CHECK_THROWS_AS(block_theta(reals, 64, 1e12), std::runtime_error);   // nothing exceeds
    CHECK_THROWS_AS(block_theta(reals, 128, 2.0), std::runtime_error);   // window < one block
    CHECK_THROWS_AS(block_theta(reals, 0, 2.0), std::invalid_argument);  // bad block side

    IndexSet holes(1);
    holes.insert(Point{0});
    holes.insert(Point{1});
    holes.insert(Point{3});
    FieldRealization fake{holes, {10.0, 10.0, 10.0}, 0, 0.0};
    CHECK_THROWS_AS(block_theta({fake}, 1, 2.0), std::invalid_argument);
}

TEST_CASE("spectral index: both expressions, known values") {
    Rng rng(substream_seed(7, "uindex"));
    auto d5 = range_pts(1, 5);

    // iid: sup over D is 0, both forms are exactly 1
    {
        auto th = spectral_tail_oracle(FieldModel{IIDFrechet{1.0, 1.0, 1}});
        auto est = theta_u_index(th, {{d5, 1.0}}, 1.0, 2000, rng);
        CHECK(est.sup_diff == 1.0);
        CHECK(est.sup_diff_se == 0.0);
        CHECK(est.prob_form == 1.0);
    }
    // moving maxima pairs: theta = 1/2
    {
        auto th = spectral_tail_oracle(FieldModel{mm11()});
        auto est = theta_u_index(th, {{d5, 1.0}}, 1.0, 40000, rng);
        CHECK(std::abs(est.sup_diff - 0.5) < 3.0 * est.sup_diff_se + 1e-12);
        CHECK(std::abs(est.prob_form - 0.5) < 3.0 * est.prob_form_se + 1e-12);
        CHECK(std::abs(est.sup_diff - est.prob_form) <
              3.0 * (est.sup_diff_se + est.prob_form_se));
    }
    // unequal kernel: theta = 2/3
    {
        auto th = spectral_tail_oracle(FieldModel{mm21()});
        auto est = theta_u_index(th, {{d5, 1.0}}, 1.0, 40000, rng);
        CHECK(std::abs(est.sup_diff - 2.0 / 3.0) < 3.0 * est.sup_diff_se + 1e-12);
        CHECK(std::abs(est.prob_form - 2.0 / 3.0) < 3.0 * est.prob_form_se + 1e-12);
    }
    // weights must sum to 1
    auto th = spectral_tail_oracle(FieldModel{mm11()});
    CHECK_THROWS_AS(theta_u_index(th, {{d5, 0.5}}, 1.0, 10, rng), std::invalid_argument);
}

TEST_CASE("three lattice representations agree and hit the oracles") {
    Rng rng(substream_seed(7, "lattice"));
    auto order = InvariantOrder::lexicographic(1);
    LatticeShape shape{range_pts(-6, 6), 1.0, 1};

    // iid: every representation is exactly 1
    {
        auto th = spectral_tail_oracle(FieldModel{IIDFrechet{1.0, 1.0, 1}});
        auto f = theta_lattice_forms(th, {shape}, 1.0, order, 500, rng);
        CHECK(f.q_form == 1.0);
        CHECK(f.ratio_form == 1.0);
        CHECK(f.argmax_form == 1.0);
        CHECK(f.max_gap == 0.0);
    }
    // moving maxima pairs: 1/2; the first two forms are degenerate at 1/2
    {
        auto th = spectral_tail_oracle(FieldModel{mm11()});
        auto f = theta_lattice_forms(th, {shape}, 1.0, order, 20000, rng);
        CHECK(f.q_form == doctest::Approx(0.5));
        CHECK(f.ratio_form == doctest::Approx(0.5));
        CHECK(std::abs(f.argmax_form - 0.5) < 3.0 * f.argmax_se + 1e-12);
        CHECK(f.max_gap < 3.0 * f.max_gap_se + 1e-12);
    }
    // unequal kernel: 2/3
    {
        auto th = spectral_tail_oracle(FieldModel{mm21()});
        auto f = theta_lattice_forms(th, {shape}, 1.0, order, 20000, rng);
        CHECK(f.ratio_form == doctest::Approx(2.0 / 3.0));
        CHECK(std::abs(f.argmax_form - 2.0 / 3.0) < 3.0 * f.argmax_se + 1e-12);
        CHECK(f.max_gap < 3.0 * f.max_gap_se + 1e-12);
    }

    auto th = spectral_tail_oracle(FieldModel{mm11()});
    LatticeShape bad_pattern{range_pts(-2, 2), 1.0, 2};
    CHECK_THROWS_AS(theta_lattice_forms(th, {bad_pattern}, 1.0, order, 10, rng),
                    std::invalid_argument);
    LatticeShape no_origin{range_pts(1, 4), 1.0, 1};
    CHECK_THROWS_AS(theta_lattice_forms(th, {no_origin}, 1.0, order, 10, rng),
                    std::invalid_argument);
}

TEST_CASE("argmax point: tie-breaking, boundary flag, scale invariance") {
    auto order = InvariantOrder::lexicographic(1);
    auto window = range_pts(-2, 2);
    std::vector<Point> e0 = {Point{0}};

    // unique interior max
    {
        std::vector<double> v = {0.1, 0.2, 1.0, 0.3, 0.2};
        auto r = argmax_T_star(window, v, e0, window, order);
        CHECK(r.found);
        CHECK(r.t == Point{0});
        CHECK(!r.truncation_miss);
        // scale invariance
        std::vector<double> w = v;
        for (double& x : w) x *= 7.0;
        auto r2 = argmax_T_star(window, w, e0, window, order);
        CHECK(r2.t == Point{0});
    }
    // tie resolves to the order-least point
    {
        std::vector<double> v = {0.1, 0.2, 1.0, 1.0, 0.2};
        auto r = argmax_T_star(window, v, e0, window, order);
        CHECK(r.t == Point{0});
        std::vector<double> v2 = {0.1, 1.0, 1.0, 0.3, 0.2};
        auto r2 = argmax_T_star(window, v2, e0, window, order);
        CHECK(r2.t == Point{-1});
    }
    // max on the boundary shell is a truncation miss
    {
        std::vector<double> v = {0.1, 0.2, 0.4, 0.3, 1.0};
        auto r = argmax_T_star(window, v, e0, window, order);
        CHECK(!r.found);
        CHECK(r.truncation_miss);
    }
    // pattern blocks: e = {0,1} on the even lattice, block max decides
    {
        auto win = range_pts(-2, 3);
        std::vector<Point> e01 = {Point{0}, Point{1}};
        std::vector<Point> lat = {Point{-2}, Point{0}, Point{2}};
        std::vector<double> v = {0.1, 0.2, 0.3, 0.9, 0.4, 0.1};  // block at 0 holds the max
        auto r = argmax_T_star(win, v, e01, lat, order);
        CHECK(r.found);
        CHECK(r.t == Point{0});
    }
    CHECK_THROWS_AS(argmax_T_star(window, {1.0, 2.0}, e0, window, order), std::invalid_argument);
}

TEST_CASE("pattern index: lattice case reduces to the argmax form") {
    Rng rng(substream_seed(7, "index4"));
    auto order = InvariantOrder::lexicographic(1);

    // iid: exactly 1
    {
        Index4Shape sh{spectral_tail_oracle(FieldModel{IIDFrechet{1.0, 1.0, 1}}), {Point{0}},
                       range_pts(-8, 8), 1.0};
        auto est = theta_index4({sh}, 1.0, order, 500, rng);
        CHECK(est.value == 1.0);
        CHECK(est.truncation_miss_rate == 0.0);
    }
    // moving maxima pairs: 1/2, never truncated (support radius 1 << 8)
    {
        Index4Shape sh{spectral_tail_oracle(FieldModel{mm11()}), {Point{0}}, range_pts(-8, 8),
                       1.0};
        auto est = theta_index4({sh}, 1.0, order, 20000, rng);
        CHECK(std::abs(est.value - 0.5) < 3.0 * est.se + 1e-12);
        CHECK(est.truncation_miss_rate == 0.0);
    }
}

TEST_CASE("pattern index: two-station grid via the empirical tail field") {
    // 2D field, dependence along the second axis only: columns are iid copies
    // of the pairwise moving-maxima field. Stations {0, 3} form the pattern;
    // clusters live inside one column, so the index stays 1/2.
    FieldModel m = MovingMaxima{{{Point{0, 0}, 1.0}, {Point{0, 1}, 1.0}}, 1.0};
    auto reals = simulate_many(m, rect2(0, 25, 0, 99), 80, 55);

    IndexSet e(2);
    e.insert(Point{0, 0});
    e.insert(Point{3, 0});
    // high threshold: at level u the secondary column inflates the patch norm
    // by O(log u / u), so the bias here is ~2%
    auto est = estimate_upsilon_tail(reals, Modulus::alpha_norm(1.0, e), 400.0, hypercube(4, 2),
                                     1.0);
    CHECK(est.samples.size() > 500);

    auto order = InvariantOrder::lexicographic(2);
    std::vector<Point> lat;
    for (std::int64_t y = -3; y <= 3; ++y) lat.push_back(Point{0, y});
    Index4Shape sh{sampler_from_estimate(est), {Point{0, 0}, Point{3, 0}}, lat, 1.0};
    Rng rng(substream_seed(7, "index4-grid"));
    auto out = theta_index4({sh}, 1.0, order, 4000, rng);
    CHECK(std::abs(out.value - 0.5) < 0.1);
}

TEST_CASE("anti-clustering curve separates short-range from long-range fields") {
    auto order = InvariantOrder::lexicographic(1);
    const std::int64_t r = 64;
    const auto window = segment(0, r - 1);
    const std::vector<std::int64_t> grid = {0, 1, 2, 4, 8};

    // pairwise moving maxima: the partner shows at l = 0, nothing beyond
    {
        FieldModel m = mm11();
        auto reals = simulate_many(m, window, 20000, 61);
        auto curve = ac_diagnostic(reals, 3200.0, grid, order, {}, 0.05);
        CHECK(curve.points.front().value > 0.35);
        CHECK(curve.points.front().value < 0.65);
        CHECK(curve.points.back().value <= 0.05);
        CHECK(curve.pass);
    }
    // iid: flat near zero from l = 0 on
    {
        FieldModel m = IIDFrechet{1.0, 1.0, 1};
        auto reals = simulate_many(m, window, 20000, 62);
        auto curve = ac_diagnostic(reals, 1600.0, grid, order, {}, 0.05);
        CHECK(curve.points.front().value <= 0.05);
        CHECK(curve.pass);
        // pattern-anchored variant stays flat too
        auto pat = ac_diagnostic(reals, 1600.0, grid, order, {Point{0}, Point{1}}, 0.05);
        CHECK(pat.points.back().value <= 0.05);
    }
    // fully dependent field: the curve never decays
    {
        FieldModel m = DeHaanMaxStable{v_constant(1.0, 1), 1.0};
        auto reals = simulate_many(m, segment(0, 16), 400, 63);
        auto curve = ac_diagnostic(reals, 1.0, grid, order, {}, 0.05);
        CHECK(curve.points.front().value > 0.9);
        CHECK(!curve.pass);
    }
    // nothing exceeds
    FieldModel m = mm11();
    auto reals = simulate_many(m, window, 5, 64);
    CHECK_THROWS_AS(ac_diagnostic(reals, 1e12, grid, order), std::runtime_error);
}

TEST_CASE("scaled maxima follow the powered Frechet law") {
    const std::int64_t n = 1024;
    const auto window = segment(0, n - 1);
    const int reps = 1500;

    // iid, a_n = n: theta = 1 exactly
    {
        FieldModel m = IIDFrechet{1.0, 1.0, 1};
        std::vector<double> maxima;
        for (int i = 0; i < reps; ++i) {
            auto r = simulate(m, window, substream_seed(71, "f", static_cast<std::uint64_t>(i)));
            maxima.push_back(*std::max_element(r.values.begin(), r.values.end()) /
                             static_cast<double>(n));
        }
        auto good = frechet_fit(maxima, 1.0, 1.0, 0.99);
        CHECK(good.pass);
        auto bad = frechet_fit(maxima, 1.0, 0.5, 0.99);  // wrong index
        CHECK(!bad.pass);
        CHECK(bad.ks > 3.0 * bad.band);
    }
    // pairwise moving maxima, a_n = 2n: theta = 1/2
    {
        FieldModel m = mm11();
        std::vector<double> maxima;
        for (int i = 0; i < reps; ++i) {
            auto r = simulate(m, window, substream_seed(72, "f", static_cast<std::uint64_t>(i)));
            maxima.push_back(*std::max_element(r.values.begin(), r.values.end()) /
                             (2.0 * static_cast<double>(n)));
        }
        auto good = frechet_fit(maxima, 1.0, 0.5, 0.99);
        CHECK(good.pass);
        auto bad = frechet_fit(maxima, 1.0, 1.0, 0.99);
        CHECK(!bad.pass);
    }
    CHECK_THROWS_AS(frechet_fit({1.0, 2.0}, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(frechet_fit(std::vector<double>(100, 1.0), 1.0, -1.0), std::invalid_argument);
}
