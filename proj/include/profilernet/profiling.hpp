#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "profilernet/dataset.hpp"
#include "profilernet/inference.hpp"
#include "profilernet/learning.hpp"
#include "profilernet/network.hpp"

namespace profilernet {

/// Ids of the variables with the given role, in network order.
std::vector<std::string> variables_with_role(const Network& net, Role role);

/// One prediction per output-role variable given `ev`. Evidence on an output
/// variable is rejected with InvalidArgument.
std::vector<Prediction> predict_profile(const Network& net, const Evidence& ev);

struct VariableEvaluation {
  std::string variable_id;
  std::size_t n_cases = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
  double mean_confidence = 0.0;
  /// confusion[predicted][observed]
  std::vector<std::vector<std::size_t>> confusion;

  bool operator==(const VariableEvaluation&) const = default;
};

struct EvaluationReport {
  std::vector<VariableEvaluation> variables;
  std::size_t n_validation = 0;
  /// Cases whose crime-scene evidence has zero probability under the model.
  /// They are left out of every accuracy denominator.
  std::size_t n_impossible = 0;
  double macro_accuracy = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t n_evaluated() const { return n_validation - n_impossible; }
  const VariableEvaluation& variable(const std::string& id) const;
  bool operator==(const EvaluationReport&) const = default;
};

/// Predicts every output variable of every case in `v` from its input-role
/// values alone and tallies the results against the observed states.
EvaluationReport evaluate(const Network& net, const Dataset& v);

struct PipelineConfig {
  double train_fraction = 0.8;
  std::uint64_t split_seed = 42;
  double alpha = 1.0;
  bool learn_structure = false;
  StructureSearchConfig search;
};

struct PipelineResult {
  Network trained;
  EvaluationReport report;
};

/// Splits `d`, trains on the training part and evaluates on the rest. The
/// hypothesis network supplies the variables and, unless the structure is
/// re-learned, the structure; when learning, it is the search start point.
/// Throws InvalidArgument when the validation part is empty.
PipelineResult run_pipeline(const Network& hypothesis, const Dataset& d,
                            const PipelineConfig& cfg);

}  // namespace profilernet
