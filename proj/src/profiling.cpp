#include "profilernet/profiling.hpp"

#include <algorithm>

#include "profilernet/error.hpp"
#include "profilernet/format.hpp"

namespace profilernet {

std::vector<std::string> variables_with_role(const Network& net, Role role) {
  std::vector<std::string> ids;
  for (const auto& var : net.variables) {
    if (var.role == role) ids.push_back(var.id);
  }
  return ids;
}

std::vector<Prediction> predict_profile(const Network& net,
                                        const Evidence& ev) {
  for (const auto& [id, state] : ev) {
    if (net.variable(id).role == Role::output) {
      throw InvalidArgument("evidence may not fix output variable '" + id +
                            "'");
    }
  }
  const auto outputs = variables_with_role(net, Role::output);
  std::vector<Prediction> out;
  for (const auto& posterior : posteriors_ve(net, ev, outputs)) {
    out.push_back(predict(posterior));
  }
  return out;
}

const VariableEvaluation& EvaluationReport::variable(
    const std::string& id) const {
  for (const auto& v : variables) {
    if (v.variable_id == id) return v;
  }
  throw UnknownVariable(id);
}

EvaluationReport evaluate(const Network& net, const Dataset& v) {
  check_complete_dataset(net, v);
  VariableElimination engine(net);

  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    if (net.variables[i].role == Role::input) inputs.push_back(i);
    if (net.variables[i].role == Role::output) outputs.push_back(i);
  }

  EvaluationReport report;
  report.n_validation = v.size();
  std::vector<double> confidence_sums(outputs.size(), 0.0);
  for (auto o : outputs) {
    VariableEvaluation ve;
    ve.variable_id = net.variables[o].id;
    const std::size_t card = net.variables[o].cardinality();
    ve.confusion.assign(card, std::vector<std::size_t>(card, 0));
    report.variables.push_back(std::move(ve));
  }

  std::vector<std::size_t> evidence(net.variables.size(), kMissing);
  std::vector<Prediction> predictions(outputs.size());
  for (const auto& c : v.cases) {
    // Only input-role values reach the evidence.
    for (auto i : inputs) evidence[i] = c.states[i];
    try {
      for (std::size_t k = 0; k < outputs.size(); ++k) {
        predictions[k] = predict({net.variables[outputs[k]].id,
                                  engine.posterior(evidence, outputs[k])});
      }
    } catch (const ImpossibleEvidence&) {
      ++report.n_impossible;
      continue;
    }
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      auto& ve = report.variables[k];
      const std::size_t observed = c.states[outputs[k]];
      const std::size_t predicted = predictions[k].predicted_state;
      ++ve.n_cases;
      if (predicted == observed) ++ve.n_correct;
      ++ve.confusion[predicted][observed];
      confidence_sums[k] += predictions[k].confidence;
    }
  }

  double accuracy_sum = 0.0;
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    auto& ve = report.variables[k];
    if (ve.n_cases > 0) {
      ve.accuracy = static_cast<double>(ve.n_correct) /
                    static_cast<double>(ve.n_cases);
      ve.mean_confidence =
          confidence_sums[k] / static_cast<double>(ve.n_cases);
    }
    accuracy_sum += ve.accuracy;
  }
  if (!outputs.empty()) {
    report.macro_accuracy = accuracy_sum / static_cast<double>(outputs.size());
  }
  if (auto name = net.meta("name")) report.metadata.emplace_back("model", *name);
  return report;
}

PipelineResult run_pipeline(const Network& hypothesis, const Dataset& d,
                            const PipelineConfig& cfg) {
  check_complete_dataset(hypothesis, d);
  auto [train, validation] = split_dataset(d, cfg.train_fraction,
                                           cfg.split_seed);
  if (validation.empty()) {
    throw InvalidArgument("validation set is empty; nothing to evaluate");
  }

  NetworkStructure structure = hypothesis.structure;
  if (cfg.learn_structure) {
    StructureSearchConfig search = cfg.search;
    if (!search.initial) search.initial = hypothesis.structure;
    structure = learn_structure(train, hypothesis.variables, search);
  }

  PipelineResult result;
  result.trained =
      fit_parameters(structure, hypothesis.variables, train, cfg.alpha);
  result.trained.metadata = {
      {"name", hypothesis.meta("name").value_or("network")},
      {"provenance", "trained"},
      {"alpha", format_shortest(cfg.alpha)},
      {"split_seed", std::to_string(cfg.split_seed)},
      {"train_fraction", format_shortest(cfg.train_fraction)},
      {"n_train", std::to_string(train.size())},
  };
  if (cfg.learn_structure) {
    result.trained.metadata.emplace_back("search_seed",
                                         std::to_string(cfg.search.seed));
  }

  result.report = evaluate(result.trained, validation);
  result.report.metadata = {
      {"model", hypothesis.meta("name").value_or("network")},
      {"split_seed", std::to_string(cfg.split_seed)},
      {"train_fraction", format_shortest(cfg.train_fraction)},
      {"n_train", std::to_string(train.size())},
      {"alpha", format_shortest(cfg.alpha)},
      {"learn_structure", cfg.learn_structure ? "true" : "false"},
  };
  if (cfg.learn_structure) {
    result.report.metadata.emplace_back("search_seed",
                                        std::to_string(cfg.search.seed));
    result.report.metadata.emplace_back("max_parents",
                                        std::to_string(cfg.search.max_parents));
    result.report.metadata.emplace_back("restarts",
                                        std::to_string(cfg.search.restarts));
    result.report.metadata.emplace_back(
        "tier_constraint", cfg.search.tier_constraint ? "true" : "false");
  }
  return result;
}

}  // namespace profilernet
