#include <random>

#include "doctest.h"
#include "rfe/index_set.hpp"
#include "rfe/lattice_union.hpp"
#include "rfe/order.hpp"
#include "rfe/sublattice.hpp"

using namespace rfe;

namespace {
IndexSet segment(std::int64_t a, std::int64_t b) {  // {a..b} ⊂ Z
    std::vector<Point> pts;
    for (std::int64_t x = a; x <= b; ++x) pts.push_back(Point{x});
    return IndexSet(1, std::move(pts));
}
Point rnd_point(std::mt19937_64& rng, int k, std::int64_t range) {
    std::uniform_int_distribution<std::int64_t> d(-range, range);
    Point p = Point::zero(k);
    for (int i = 0; i < k; ++i) p[i] = d(rng);
    return p;
}
}  // namespace

TEST_CASE("dictionary order on Z^2") {
    auto lex = InvariantOrder::lexicographic(2);
    CHECK(lex.compare(Point{0, 1}, Point{1, 0}) == Ordering::Less);
    CHECK(lex.compare(Point{0, -1}, Point{0, 0}) == Ordering::Less);
    CHECK(lex.compare(Point{2, 5}, Point{2, 5}) == Ordering::Equal);
    CHECK(lex.positive(Point{0, 1}));
    CHECK(!lex.positive(Point{0, 0}));
    CHECK(!lex.positive(Point{-1, 5}));
    CHECK_THROWS(lex.compare(Point{1}, Point{1, 2}));
}

TEST_CASE("order is translation invariant on random triples") {
    for (int k : {1, 2, 3, 4}) {
        auto lex = InvariantOrder::lexicographic(k);
        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = k - 1 - i;
        auto rev = InvariantOrder::permuted_lexicographic(perm);
        std::mt19937_64 rng(12345u + static_cast<unsigned>(k));
        for (int it = 0; it < 1000; ++it) {
            Point s = rnd_point(rng, k, 50), t = rnd_point(rng, k, 50), i = rnd_point(rng, k, 50);
            CHECK(lex.compare(s, t) == lex.compare(s + i, t + i));
            CHECK(rev.compare(s, t) == rev.compare(s + i, t + i));
        }
    }
}

TEST_CASE("hypercube windows") {
    CHECK(hypercube(0, 2).points() == std::vector<Point>{Point{0, 0}});
    CHECK(hypercube(1, 1) == IndexSet(1, {Point{-1}, Point{0}, Point{1}}));
    CHECK(hypercube(1, 2).size() == 9);
    CHECK(hypercube(2, 3).size() == 125);
}

TEST_CASE("translation") {
    IndexSet s(2, {Point{1, 1}});
    CHECK(s.translated(-Point{1, 1}) == IndexSet(2, {Point{0, 0}}));
    IndexSet big(2, {Point{3, -2}, Point{0, 5}, Point{1, 1}});
    CHECK(big.translated(Point{4, 7}).translated(-Point{4, 7}) == big);

    Sublattice two = Sublattice::from_generators(1, {Point{2}});
    LatticeUnion u(1);
    u.add_component(two, Point{0});
    auto shifted = u.translated(Point{1});
    CHECK(shifted.contains(Point{-1}));
    CHECK(shifted.contains(Point{3}));
    CHECK(!shifted.contains(Point{0}));
}

TEST_CASE("upper orthant") {
    auto lex = InvariantOrder::lexicographic(2);
    IndexSet s(2, {Point{0, 1}, Point{0, -1}, Point{1, 0}});
    CHECK(s.upper_orthant(lex) == IndexSet(2, {Point{0, 1}, Point{1, 0}}));
    IndexSet with_zero(2, {Point{0, 0}, Point{2, 0}});
    CHECK(with_zero.upper_orthant(lex) == IndexSet(2, {Point{2, 0}}));
    CHECK(IndexSet(2).upper_orthant(lex).empty());
}

TEST_CASE("window shapes on a segment") {
    auto lex = InvariantOrder::lexicographic(1);
    IndexSet seg = segment(1, 10);
    CHECK(window_shape(seg, Point{5}, 2, lex) == IndexSet(1, {Point{1}, Point{2}}));
    CHECK(window_shape(seg, Point{10}, 2, lex).empty());
    CHECK_THROWS(window_shape(seg, Point{0}, 2, lex));
    // full windows always contain 0
    CHECK(window_shape_full(seg, Point{5}, 2).contains(Point{0}));
}

TEST_CASE("window shape of the two-line configuration") {
    // two horizontal lines y=0 and y=1; order runs along x first, then up
    auto order = InvariantOrder::permuted_lexicographic({1, 0});
    std::vector<Point> pts;
    for (std::int64_t x = -40; x <= 40; ++x) {
        pts.push_back(Point{x, 0});
        pts.push_back(Point{x, 1});
    }
    IndexSet lambda(2, pts);
    const std::int64_t p = 4;
    IndexSet d2 = window_shape(lambda, Point{0, 0}, p, order);
    // lower half-line plus the full upper line, clipped to K_p
    std::vector<Point> want;
    for (std::int64_t x = 1; x <= p; ++x) want.push_back(Point{x, 0});
    for (std::int64_t x = -p; x <= p; ++x) want.push_back(Point{x, 1});
    CHECK(d2 == IndexSet(2, want));
    // seen from the upper line only the forward half of that line remains
    IndexSet d1 = window_shape(lambda, Point{0, 1}, p, order);
    std::vector<Point> want1;
    for (std::int64_t x = 1; x <= p; ++x) want1.push_back(Point{x, 0});
    CHECK(d1 == IndexSet(2, want1));
}

TEST_CASE("monotone window refinement") {
    auto lex = InvariantOrder::lexicographic(2);
    std::mt19937_64 rng(777);
    std::vector<Point> pts;
    std::uniform_int_distribution<std::int64_t> d(-12, 12);
    for (int i = 0; i < 120; ++i) pts.push_back(Point{d(rng), d(rng)});
    IndexSet lambda(2, pts);
    for (const auto& t : lambda.points()) {
        IndexSet fine = window_shape(lambda, t, 6, lex);
        IndexSet coarse = window_shape(lambda, t, 3, lex);
        CHECK(fine.intersect_cube(3) == coarse);
    }
}

TEST_CASE("lattice membership via the canonical basis") {
    Sublattice l = Sublattice::from_generators(2, {Point{2, 0}, Point{0, 2}});
    CHECK(l.contains(Point{4, 6}, Point{0, 0}));
    CHECK(!l.contains(Point{1, 0}, Point{0, 0}));
    Sublattice degenerate(2);
    CHECK(degenerate.rank() == 0);
    CHECK(degenerate.contains(Point{3, -1}, Point{3, -1}));
    CHECK(!degenerate.contains(Point{3, 0}, Point{3, -1}));
}

TEST_CASE("canonical basis is independent of the generating set") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> coef(-3, 3);
    for (int k : {1, 2, 3}) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Point> gens;
            for (int i = 0; i < k; ++i) gens.push_back(rnd_point(rng, k, 5));
            Sublattice a = Sublattice::from_generators(k, gens);
            // random unimodular-ish recombination: add integer multiples of
            // other generators, permute, duplicate
            std::vector<Point> gens2 = gens;
            for (int r = 0; r < 6; ++r) {
                std::size_t i = rng() % gens2.size(), j = rng() % gens2.size();
                if (i != j) gens2[i] = gens2[i] + gens2[j] * coef(rng);
            }
            std::shuffle(gens2.begin(), gens2.end(), rng);
            gens2.push_back(gens2.front() + gens2.back());
            Sublattice b = Sublattice::from_generators(k, gens2);
            REQUIRE(a == b);
        }
    }
}

TEST_CASE("coset reduction is a coset invariant") {
    std::mt19937_64 rng(99);
    Sublattice l = Sublattice::from_generators(3, {Point{2, 1, 0}, Point{0, 3, 1}});
    for (int trial = 0; trial < 200; ++trial) {
        Point p = rnd_point(rng, 3, 30);
        Point shift = l.basis()[rng() % 2] * static_cast<std::int64_t>(rng() % 7) -
                      l.basis()[rng() % 2] * static_cast<std::int64_t>(rng() % 7);
        CHECK(l.coset_reduce(p) == l.coset_reduce(p + shift));
        CHECK(l.contains(p - l.coset_reduce(p)));
    }
}

TEST_CASE("lattice union window agreement: enumeration vs membership scan") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 30; ++trial) {
        int k = 1 + static_cast<int>(rng() % 3);
        LatticeUnion u(k);
        int ncomp = 1 + static_cast<int>(rng() % 2);
        for (int c = 0; c < ncomp; ++c) {
            std::vector<Point> gens;
            int ng = 1 + static_cast<int>(rng() % k);
            for (int g = 0; g < ng; ++g) gens.push_back(rnd_point(rng, k, 4));
            Sublattice l = Sublattice::from_generators(k, gens);
            u.add_component(l, rnd_point(rng, k, 4));
        }
        u.add_isolated(rnd_point(rng, k, 6));
        CHECK(u.intersect_cube(7) == u.intersect_cube_by_scan(7));
    }
}

TEST_CASE("lattice enumeration hits exactly the window") {
    Sublattice l = Sublattice::from_generators(2, {Point{3, 1}, Point{1, 2}});
    auto pts = l.enumerate(Point{1, 0}, 9);
    IndexSet got(2, pts);
    std::vector<Point> want;
    IndexSet cube = hypercube(9, 2);
    for (const auto& p : cube.points())
        if (l.contains(p, Point{1, 0})) want.push_back(p);
    CHECK(got == IndexSet(2, want));
}
