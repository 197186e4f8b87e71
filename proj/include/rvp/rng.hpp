#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rvp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream id for sample m of a named purpose, derived from the root seed.
/// Streams are independent of generation order, so parallel sample loops
/// reproduce the serial results.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t purpose, std::uint64_t index) {
    return splitmix64(splitmix64(root ^ (0x517cc1b727220a95ULL * purpose)) + index);
}

// purpose tags for derive_seed
inline constexpr std::uint64_t kStreamBackbone = 1;
inline constexpr std::uint64_t kStreamPriceB = 2;
inline constexpr std::uint64_t kStreamInnerB = 3;

/// Deterministic standard-normal generator (mt19937_64 + Box-Muller).
/// Avoids std::normal_distribution, whose draw sequence is
/// implementation-defined.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace rvp
