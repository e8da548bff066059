#include "profilernet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "profilernet/error.hpp"

namespace profilernet {

std::uint64_t Substream::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("below(0)");
  // Rejection sampling on the largest multiple of bound.
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= limit) return r % bound;
  }
}

std::vector<double> cumulative_ranges(std::span<const double> probs) {
  if (probs.empty()) {
    throw InvalidArgument("probability vector is empty");
  }
  std::vector<double> out;
  out.reserve(probs.size());
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("probability " + std::to_string(p) +
                            " is outside [0, 1]");
    }
    sum += p;
    out.push_back(sum);
  }
  if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
    throw InvalidArgument("probabilities sum to " + std::to_string(sum));
  }
  out.back() = 1.0;
  return out;
}

std::size_t draw_state(std::span<const double> cumulative, double v) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), v);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

AncestralSampler::AncestralSampler(const Network& net) : net_(net) {
  cumulative_.resize(net_.size());
  for (std::size_t v = 0; v < net_.size(); ++v) {
    for (const auto& row : net.cpts[v].rows) {
      auto c = cumulative_ranges(row);
      cumulative_[v].insert(cumulative_[v].end(), c.begin(), c.end());
    }
  }
}

CaseRecord sample_case(const Network& net, Substream& stream) {
  AncestralSampler sampler(net);
  return sampler.sample([&] { return stream.uniform(); });
}

Dataset simulate_dataset(const Network& net, std::size_t n, SampleSeed seed,
                         unsigned threads) {
  AncestralSampler sampler(net);
  Dataset d;
  for (const auto& var : net.variables) d.variable_ids.push_back(var.id);
  d.cases.resize(n);

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Substream stream = seed.stream_for_case(i);
      d.cases[i] = sampler.sample([&] { return stream.uniform(); });
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * threads) {
    fill(0, n);
    return d;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    workers.emplace_back(fill, begin, std::min(n, begin + chunk));
  }
  for (auto& w : workers) w.join();
  return d;
}

}  // namespace profilernet
