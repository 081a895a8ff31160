// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_RANDOM_HPP
#define NIRB_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nirb
{

// SplitMix64 (Steele, Lea, Flood). Fully specified 64-bit generator, so seeded streams are
// bitwise reproducible across platforms and standard libraries. Split() derives an
// independent child stream.
class SplitMix64
{
public:
  static constexpr const char *kAlgorithm = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  SplitMix64 Split() { return SplitMix64(Next()); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal by Box-Muller. The second variate is discarded.
  double Normal()
  {
    double u1 = Uniform();
    while (u1 <= 0.0)
    {
      u1 = Uniform();
    }
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t state_;
};

}  // namespace nirb

#endif  // NIRB_RANDOM_HPP
