#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rfe {

// All randomness flows from one root seed through named substreams, so adding
// a step or running steps in a different order never perturbs the draws of
// another step. Substream seeds are FNV-1a over (root, name, index).
inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                                    std::uint64_t index = 0) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(root);
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    mix(index);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return uni_(eng_); }                      // (0,1)
    double exponential() { return -std::log(uniform()); }        // rate 1
    double pareto(double alpha) { return std::pow(uniform(), -1.0 / alpha); }  // P(>y)=y^-α, y≥1
    double frechet(double alpha, double scale = 1.0) {
        return scale * std::pow(-std::log(uniform()), -1.0 / alpha);
    }
    double normal() { return normal_(eng_); }
    std::uint64_t bits() { return eng_(); }
    std::size_t index(std::size_t n) {  // uniform in [0, n)
        return static_cast<std::size_t>(eng_() % n);
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
    // open interval: max-stable machinery divides by -log(u)
    std::uniform_real_distribution<double> uni_{5e-324, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rfe
