#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfe {

// A point of Z^k. Dimension is fixed per computation context (k <= 4 in
// practice, but nothing here depends on that).
struct Point {
    std::vector<std::int64_t> c;

    Point() = default;
    explicit Point(std::vector<std::int64_t> coords) : c(std::move(coords)) {}
    Point(std::initializer_list<std::int64_t> coords) : c(coords) {}

    int dim() const { return static_cast<int>(c.size()); }
    std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

    bool operator==(const Point& o) const { return c == o.c; }
    bool operator!=(const Point& o) const { return c != o.c; }
    // Plain coordinate-lexicographic comparison; used for canonical sorting,
    // not for the invariant order (see order.hpp).
    bool operator<(const Point& o) const { return c < o.c; }

    Point operator+(const Point& o) const {
        check_dim(o);
        Point r(*this);
        for (int i = 0; i < dim(); ++i) r[i] += o[i];
        return r;
    }
    Point operator-(const Point& o) const {
        check_dim(o);
        Point r(*this);
        for (int i = 0; i < dim(); ++i) r[i] -= o[i];
        return r;
    }
    Point operator-() const {
        Point r(*this);
        for (int i = 0; i < dim(); ++i) r[i] = -r[i];
        return r;
    }
    Point operator*(std::int64_t s) const {
        Point r(*this);
        for (int i = 0; i < dim(); ++i) r[i] *= s;
        return r;
    }

    bool is_zero() const {
        for (auto v : c)
            if (v != 0) return false;
        return true;
    }

    // max-coordinate magnitude, |t| in the hypercube sense
    std::int64_t inf_norm() const {
        std::int64_t m = 0;
        for (auto v : c) {
            std::int64_t a = v < 0 ? -v : v;
            if (a > m) m = a;
        }
        return m;
    }

    static Point zero(int k) { return Point(std::vector<std::int64_t>(static_cast<std::size_t>(k), 0)); }

    void check_dim(const Point& o) const {
        if (dim() != o.dim()) throw std::invalid_argument("point dimension mismatch");
    }

    std::string str() const {
        std::string s;
        for (int i = 0; i < dim(); ++i) {
            if (i) s += ' ';
            s += std::to_string(c[static_cast<std::size_t>(i)]);
        }
        return s;
    }
};

struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::size_t h = 1469598103934665603ull;
        for (auto v : p.c) {
            h ^= static_cast<std::size_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace rfe
