#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace polyspec {

// Counter-based splittable random stream. Output k-th draw is a pure
// function of (key, k), so trajectories are reproducible bit-exactly
// given (seed, stream index, draw index). stream(i) derives an
// independent child key; no state is shared between parent and child.
class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : key_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    SplitRng stream(uint64_t idx) const {
        SplitRng child(0);
        child.key_ = mix(mix(key_ + 0x632be59bd9b4e019ull) ^ mix(idx + 0x9e3779b97f4a7c15ull));
        child.ctr_ = 0;
        child.have_cached_ = false;
        return child;
    }

    uint64_t next_u64() { return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ull); }

    // uniform in [0,1), 53-bit resolution
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Box-Muller; the paired deviate is cached
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        // u1 = 0 would overflow the log
        if (u1 <= 0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // uniform in {0,...,n-1} without modulo bias
    int next_below(int n) {
        const uint64_t bound = uint64_t(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return int(v % bound);
    }

    std::vector<double> gaussian_vector(int d) {
        std::vector<double> g(d);
        for (int i = 0; i < d; ++i) g[i] = next_gaussian();
        return g;
    }

    // uniform direction on the unit sphere
    std::vector<double> unit_vector(int d) {
        for (;;) {
            std::vector<double> g = gaussian_vector(d);
            double s = 0;
            for (double x : g) s += x * x;
            if (s > 1e-30) {
                const double inv = 1.0 / std::sqrt(s);
                for (double& x : g) x *= inv;
                return g;
            }
        }
    }

  private:
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t ctr_ = 0;
    bool have_cached_ = false;
    double cached_ = 0;
};

}  // namespace polyspec
