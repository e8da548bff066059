#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "profilernet/dataset.hpp"
#include "profilernet/network.hpp"

namespace profilernet {

struct Posterior {
  std::string variable_id;
  std::vector<double> probs;
};

/// Most likely state of one variable and its posterior probability.
struct Prediction {
  std::string variable_id;
  std::size_t predicted_state = 0;
  double confidence = 0.0;

  bool operator==(const Prediction&) const = default;
};

/// Chain-rule product of CPT entries. `states` holds one state per variable
/// in network order; throws InvalidArgument if any is missing.
double joint_probability(const Network& net,
                         std::span<const std::size_t> states);
double joint_probability(const Network& net, const Assignment& assignment);

inline constexpr std::size_t kMaxEnumerationVariables = 24;
inline constexpr std::size_t kMaxEnumerationConfigs = std::size_t{1} << 24;

/// Reference posterior by summing the joint over every completion of the
/// evidence. Exponential; refuses networks with more than 24 variables or
/// 2^24 joint configurations. Throws ImpossibleEvidence when P(ev) = 0.
Posterior posterior_by_enumeration(const Network& net, const Evidence& ev,
                                   const std::string& query);

/// Exact posterior by variable elimination. Only ancestors of the query and
/// evidence take part; the rest are summed out implicitly. Elimination order
/// is greedy min-degree with ties broken by declaration order. Throws
/// ImpossibleEvidence when P(ev) = 0.
Posterior posterior_ve(const Network& net, const Evidence& ev,
                       const std::string& query);

/// Same as posterior_ve for several queries, reusing the compiled network.
std::vector<Posterior> posteriors_ve(const Network& net, const Evidence& ev,
                                     std::span<const std::string> queries);

/// Argmax with ties going to the lowest state index.
Prediction predict(const Posterior& posterior);

/// Reusable engine for many queries against one network.
class VariableElimination {
 public:
  explicit VariableElimination(const Network& net);

  /// `evidence` is dense: one entry per variable, kMissing when unobserved.
  std::vector<double> posterior(std::span<const std::size_t> evidence,
                                std::size_t query) const;
  Posterior posterior(const Evidence& ev, const std::string& query) const;

  const Network& network() const { return net_; }
  const CompiledNetwork& compiled() const { return compiled_; }

 private:
  Network net_;
  CompiledNetwork compiled_;
};

}  // namespace profilernet
