#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bexplore/rational.hpp"

namespace bexplore {

// Counter-mixed seed derivation (SplitMix64 over seed ^ golden-ratio
// multiples of the index). Every run and every stream inside a run gets a
// seed derived this way from the master seed, so parallel runs never share
// generator state. Recorded in trace headers for re-audit.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic generator with exact rational sampling on top.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform over [0, n). Exact: draws bit-blocks and rejects overflow.
  Int uniform_below(const Int& n);

  // Uniform over {0, ..., n-1} for machine-sized n.
  std::size_t uniform_index(std::size_t n);

  // Exact draw from a categorical distribution given by rational weights
  // (need not be normalized; total must be positive). Returns the index.
  std::size_t sample_categorical(const std::vector<Rat>& weights);

  // Uniform random permutation in place (Fisher-Yates).
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bexplore
