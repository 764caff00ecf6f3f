#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace concrete {

/// Seeded pseudo-random source used everywhere in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions below are written out by hand (the standard
/// library's distributions are implementation-defined), so every draw is
/// bit-reproducible across compilers and platforms:
///
///  - uniform01():  top 53 bits of one engine output, scaled by 2^-53.
///  - below(n):     rejection sampling on the full 64-bit output.
///  - shuffle():    Fisher-Yates from the back, swapping i with below(i + 1).
///
/// Independent streams (one per tree, particle, repeat, ...) come from
/// `Rng::stream(seed, id)`, which mixes (seed, id) through SplitMix64 so the
/// draws of stream k never depend on how many draws stream j consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id);

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    shuffle(std::span<T>(values));
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace concrete
