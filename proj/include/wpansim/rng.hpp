#pragma once

#include <cstdint>
#include <random>

#include "wpansim/sim_time.hpp"

namespace wpansim {

/// One step of the SplitMix64 finalizer. Used only for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of an independent sub-stream of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Seed of replication `rep` of sweep point `point`.
constexpr std::uint64_t stable_hash(std::uint64_t seed_base, std::uint64_t point, std::uint64_t rep) {
  return splitmix64(splitmix64(splitmix64(seed_base) ^ point) ^ (rep * 0xD1B54A32D192ED03ULL));
}

/// Reproducible random source.
///
/// Backed by mt19937_64, whose output sequence is fixed by the C++ standard.
/// The std:: distributions are implementation-defined, so the mappings to
/// integers and reals below are done by hand to keep draws bit-identical
/// across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, 2^be - 1]. Requires 0 <= be <= 62.
  std::int64_t uniform_units(int be);

  /// Exponential interarrival with the given mean, rounded to the nearest
  /// symbol and clamped to at least one symbol. Throws on mean <= 0.
  SimTime exponential(double mean_seconds);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace wpansim
