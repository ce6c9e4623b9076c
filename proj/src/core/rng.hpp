#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mribench {

// All randomness flows through Rng. Distribution sampling is hand-rolled on
// top of std::mt19937_64 because the standard pins the engine output but not
// the distributions; splits and augmentation streams must be identical across
// standard libraries.

std::uint64_t splitmix64(std::uint64_t x);

// Folds a word list into a single seed. Used to derive independent streams,
// e.g. (seed, class_id) for split shuffles or (seed, epoch, sample) for
// per-sample augmentation.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) via rejection sampling. n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller. One fresh pair per call, second value
  // discarded; simpler state, and throughput does not matter here.
  double normal();

  // Fisher-Yates. Integer-only path, so byte-stable across platforms.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(below(i + 1));
      if (i != j) std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mribench
