#pragma once

// Seeded random streams. Every stream is derived from one root seed via a
// counter-based splitting scheme keyed by (component name, index), so results
// are reproducible regardless of evaluation order or thread count. All
// variate mappings are hand-rolled on top of std::mt19937_64 (a portable
// engine) to keep outputs bit-identical across standard libraries.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace memq {

uint64_t splitmix64(uint64_t x);
uint64_t hash_str(std::string_view s);

// Child seed for a named component and a stream index.
uint64_t derive_seed(uint64_t root, std::string_view component, uint64_t index = 0);

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(splitmix64(seed ^ 0x9e3779b97f4a7c15ull)) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0,1) with 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // unbiased integer in [0, n)
    uint64_t below(uint64_t n);

    int index(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

    // integer in [lo, hi] inclusive
    int range(int lo, int hi) { return lo + index(hi - lo + 1); }

    bool bernoulli(double p) { return uniform01() < p; }

    double normal();

    // Sample an index from a cumulative distribution (cdf.back() ~ 1).
    int from_cdf(std::span<const double> cdf);

    // Fisher-Yates shuffle.
    template <typename T> void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace memq
