#pragma once

#include <cmath>
#include <cstdint>

namespace rotinv {

/// splitmix64 step; also used to hash-combine seed components.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from a base seed and up to three indices.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = base;
    splitmix64(s);
    s ^= 0x243f6a8885a308d3ull * (a + 1);
    splitmix64(s);
    s ^= 0x13198a2e03707344ull * (b + 1);
    splitmix64(s);
    s ^= 0xa4093822299f31d0ull * (c + 1);
    return splitmix64(s);
}

/// Small deterministic generator. The standard distributions are not portable
/// across implementations, so uniform/normal transforms are written out here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) { splitmix64(state_); }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace rotinv
