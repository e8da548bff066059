#include "profilernet/dataset.hpp"

#include "profilernet/error.hpp"

namespace profilernet {

void check_evidence(const Network& net, const Evidence& ev) {
  for (const auto& [id, state] : ev) {
    const auto& var = net.variable(id);
    if (state >= var.cardinality()) {
      throw BadState("state index " + std::to_string(state) +
                     " is out of range for '" + id + "'");
    }
  }
}

std::vector<std::size_t> dense_evidence(const Network& net,
                                        const Evidence& ev) {
  check_evidence(net, ev);
  std::vector<std::size_t> dense(net.variables.size(), kMissing);
  for (const auto& [id, state] : ev) dense[net.variable_index(id)] = state;
  return dense;
}

void check_complete_dataset(const Network& net, const Dataset& d) {
  if (d.variable_ids.size() != net.variables.size()) {
    throw InvalidArgument("dataset has " +
                          std::to_string(d.variable_ids.size()) +
                          " columns, network has " +
                          std::to_string(net.variables.size()) + " variables");
  }
  for (std::size_t v = 0; v < net.variables.size(); ++v) {
    if (d.variable_ids[v] != net.variables[v].id) {
      throw InvalidArgument("dataset column " + std::to_string(v) + " is '" +
                            d.variable_ids[v] + "', expected '" +
                            net.variables[v].id + "'");
    }
  }
  for (std::size_t c = 0; c < d.cases.size(); ++c) {
    const auto& states = d.cases[c].states;
    if (states.size() != net.variables.size()) {
      throw InvalidArgument("case " + std::to_string(c) + " has " +
                            std::to_string(states.size()) + " values");
    }
    for (std::size_t v = 0; v < states.size(); ++v) {
      if (states[v] == kMissing) {
        throw InvalidArgument("case " + std::to_string(c) +
                              " is missing a value for '" +
                              net.variables[v].id + "'");
      }
      if (states[v] >= net.variables[v].cardinality()) {
        throw BadState("case " + std::to_string(c) + ": state index " +
                       std::to_string(states[v]) + " is out of range for '" +
                       net.variables[v].id + "'");
      }
    }
  }
}

}  // namespace profilernet
