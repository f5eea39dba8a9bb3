#include "bexplore/rng.hpp"

#include "bexplore/error.hpp"

namespace bexplore {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (index * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Int Rng::uniform_below(const Int& n) {
  if (n <= 0) throw ValidationError("", "uniform_below: n must be positive");
  if (n == 1) return 0;
  const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  while (true) {
    Int z = 0;
    for (std::size_t w = 0; w < words; ++w) {
      z <<= 64;
      z += Int(gen_());
    }
    // keep only `bits` low bits so the rejection rate stays below 1/2
    Int mask = (Int(1) << bits) - 1;
    z &= mask;
    if (z < n) return z;
  }
}

std::size_t Rng::uniform_index(std::size_t n) {
  Int r = uniform_below(Int(static_cast<unsigned long>(n)));
  return static_cast<std::size_t>(r.get_ui());
}

std::size_t Rng::sample_categorical(const std::vector<Rat>& weights) {
  Int denom_lcm = 1;
  for (const Rat& w : weights) {
    if (w < 0) throw ValidationError("", "negative categorical weight");
    mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(),
            w.get_den().get_mpz_t());
  }
  Int total = 0;
  std::vector<Int> scaled(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    scaled[i] = weights[i].get_num() * (denom_lcm / weights[i].get_den());
    total += scaled[i];
  }
  if (total <= 0) throw ValidationError("", "categorical weights sum to zero");
  Int r = uniform_below(total);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    if (r < scaled[i]) return i;
    r -= scaled[i];
  }
  return scaled.size() - 1;  // unreachable
}

}  // namespace bexplore
