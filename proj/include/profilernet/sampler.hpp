#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "profilernet/dataset.hpp"
#include "profilernet/network.hpp"

namespace profilernet {

/// SplitMix64 finalizer (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the substream for case `index`:
/// mix64(master + (index + 1) * 0x9E3779B97F4A7C15).
constexpr std::uint64_t substream_seed(std::uint64_t master,
                                       std::uint64_t index) {
  return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Uniform doubles in [0, 1) with 53 random bits, drawn from std::mt19937_64.
/// Both the engine and the bit extraction are fully specified by the standard,
/// so streams are identical on every platform.
class Substream {
 public:
  explicit Substream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct SampleSeed {
  std::uint64_t master_seed = 0;

  Substream stream_for_case(std::uint64_t index) const {
    return Substream(substream_seed(master_seed, index));
  }
};

/// Running sums of `probs` with the final entry pinned to exactly 1.0.
/// Throws InvalidArgument unless entries lie in [0, 1] and sum to 1 +/- 1e-9.
std::vector<double> cumulative_ranges(std::span<const double> probs);

/// Smallest k with v < cumulative[k]; state k owns [cumulative[k-1],
/// cumulative[k]) and state 0 owns [0, cumulative[0]).
std::size_t draw_state(std::span<const double> cumulative, double v);

/// Per-variable cumulative rows, precomputed for repeated sampling.
class AncestralSampler {
 public:
  explicit AncestralSampler(const Network& net);

  /// Samples one complete case, consuming one draw from `next_uniform` per
  /// variable in topological order.
  template <class UniformFn>
  CaseRecord sample(UniformFn&& next_uniform) const {
    CaseRecord record;
    record.states.assign(net_.size(), kMissing);
    for (auto v : net_.topological_order()) {
      const std::size_t row = net_.row_index(v, record.states);
      const std::size_t card = net_.cardinality(v);
      std::span<const double> cumulative(cumulative_[v].data() + row * card,
                                         card);
      record.states[v] = draw_state(cumulative, next_uniform());
    }
    return record;
  }

  const CompiledNetwork& compiled() const { return net_; }

 private:
  CompiledNetwork net_;
  std::vector<std::vector<double>> cumulative_;
};

CaseRecord sample_case(const Network& net, Substream& stream);

/// Case i is sampled from SampleSeed::stream_for_case(i), so the result does
/// not depend on `threads`.
Dataset simulate_dataset(const Network& net, std::size_t n, SampleSeed seed,
                         unsigned threads = 1);

}  // namespace profilernet
