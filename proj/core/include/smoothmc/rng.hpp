#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace smoothmc {

/// splitmix64 finalizer. Used on its own for seed hashing and below for
/// deriving independent stream seeds from a base seed.
std::uint64_t mix64(std::uint64_t z);

/// Folds a list of labels into one seed by the avalanche chain
/// h = mix64(h ^ part), starting from a fixed offset. Deterministic and
/// order-sensitive: re-mixing between labels breaks XOR commutativity.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard, and every variate transform here is
/// hand-rolled (std::*_distribution is implementation-defined), so a seed
/// yields the same stream on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Seed this stream was constructed with (not the current state).
  std::uint64_t seed() const { return seed_; }

  /// Independent stream keyed by (construction seed, stream label).
  /// Derivation does not consume from this stream.
  Rng derive(std::uint64_t stream) const {
    return Rng(mix_seed({seed_, stream}));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Unbiased: rejects draws from the final
  /// incomplete block of size 2^64 mod bound.
  std::uint64_t next_below(std::uint64_t bound);

  /// Standard normal via Box-Muller; u1 is shifted into (0, 1] so the log is
  /// always finite. Draws are produced in pairs and cached.
  double next_gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace smoothmc
