#pragma once

#include <cmath>
#include <cstdint>

namespace cloudlap {

// xoshiro256++ seeded through splitmix64. Every consumer owns its stream,
// keyed by (seed, stream id), so experiment cells can draw independently
// of scheduling order: adding threads or reordering cells never changes
// the numbers a given cell sees.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (int i = 0; i < 4; ++i) s_[i] = splitmix64(x);
        // A zero state would lock the generator at zero forever.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 random bits.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (-1,1) symmetric around 0.
    double sym() { return 2.0 * u01() - 1.0; }

    // Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double normal() {
        // Marsaglia polar method; second deviate deliberately discarded so
        // consumption per call is input-independent in distributional tests.
        for (;;) {
            const double a = sym();
            const double b = sym();
            const double q = a * a + b * b;
            if (q > 0.0 && q < 1.0) {
                return a * std::sqrt(-2.0 * std::log(q) / q);
            }
        }
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t s_[4];
};

} // namespace cloudlap
