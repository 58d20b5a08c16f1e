#pragma once

#include <complex>
#include <cstdint>

namespace fbasis {

// splitmix64 (Steele, Lea, Flood 2014). The generator identity is part of the
// external contract: reports produced from a seed are reproducible across
// implementations that use the same algorithm.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) from the top 53 bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform in log-modulus over the annulus rlo <= |z| <= rhi, uniform phase
    std::complex<double> annulus(double rlo = 0.5, double rhi = 1.5) {
        double lm = uniform(std::log(rlo), std::log(rhi));
        double ph = uniform(0.0, 6.283185307179586476925286766559);
        return std::polar(std::exp(lm), ph);
    }

  private:
    std::uint64_t state_;
};

} // namespace fbasis
