#include "profilernet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "factor.hpp"
#include "profilernet/error.hpp"

namespace profilernet {

using detail::Factor;

double joint_probability(const Network& net,
                         std::span<const std::size_t> states) {
  CompiledNetwork cn(net);
  if (states.size() != cn.size()) {
    throw InvalidArgument("assignment has " + std::to_string(states.size()) +
                          " values for " + std::to_string(cn.size()) +
                          " variables");
  }
  for (std::size_t v = 0; v < cn.size(); ++v) {
    if (states[v] == kMissing) {
      throw InvalidArgument("assignment is missing '" + net.variables[v].id +
                            "'");
    }
    if (states[v] >= cn.cardinality(v)) {
      throw BadState("state " + std::to_string(states[v]) +
                     " is out of range for '" + net.variables[v].id + "'");
    }
  }
  double p = 1.0;
  for (std::size_t v = 0; v < cn.size(); ++v) {
    p *= cn.probability(v, cn.row_index(v, states), states[v]);
  }
  return p;
}

double joint_probability(const Network& net, const Assignment& assignment) {
  std::vector<std::size_t> states(net.variables.size(), kMissing);
  for (const auto& [id, s] : assignment) states[net.variable_index(id)] = s;
  return joint_probability(net, states);
}

namespace {

std::vector<double> normalize_or_throw(std::vector<double> probs) {
  double total = 0.0;
  for (double p : probs) total += p;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ImpossibleEvidence("evidence has zero probability under the model");
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace

Posterior posterior_by_enumeration(const Network& net, const Evidence& ev,
                                   const std::string& query) {
  CompiledNetwork cn(net);
  const std::size_t q = net.variable_index(query);
  const auto evidence = dense_evidence(net, ev);
  if (cn.size() > kMaxEnumerationVariables) {
    throw InvalidArgument("enumeration is limited to " +
                          std::to_string(kMaxEnumerationVariables) +
                          " variables");
  }
  std::size_t configs = 1;
  for (auto c : cn.cardinalities()) {
    configs *= c;
    if (configs > kMaxEnumerationConfigs) {
      throw InvalidArgument("too many joint configurations to enumerate");
    }
  }

  std::vector<double> acc(cn.cardinality(q), 0.0);
  std::vector<std::size_t> states(cn.size(), 0);
  for (std::size_t i = 0; i < configs; ++i) {
    bool consistent = true;
    for (std::size_t v = 0; v < cn.size(); ++v) {
      if (evidence[v] != kMissing && evidence[v] != states[v]) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      double p = 1.0;
      for (std::size_t v = 0; v < cn.size(); ++v) {
        p *= cn.probability(v, cn.row_index(v, states), states[v]);
      }
      acc[states[q]] += p;
    }
    for (std::size_t v = cn.size(); v-- > 0;) {
      if (++states[v] < cn.cardinality(v)) break;
      states[v] = 0;
    }
  }
  return {query, normalize_or_throw(std::move(acc))};
}

VariableElimination::VariableElimination(const Network& net)
    : net_(net), compiled_(net_) {}

std::vector<double> VariableElimination::posterior(
    std::span<const std::size_t> evidence, std::size_t query) const {
  const auto& cn = compiled_;
  const std::size_t n = cn.size();

  // Ancestral closure of the query and the evidence; everything else is
  // barren and sums to one.
  std::vector<bool> relevant(n, false);
  std::vector<std::size_t> stack{query};
  for (std::size_t v = 0; v < n; ++v) {
    if (evidence[v] != kMissing) stack.push_back(v);
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = true;
    for (auto p : cn.parents(v)) stack.push_back(p);
  }

  // One factor per relevant CPT, restricted to the evidence.
  std::vector<Factor> factors;
  std::vector<std::size_t> states(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!relevant[v]) continue;
    std::vector<std::size_t> family(cn.parents(v).begin(),
                                    cn.parents(v).end());
    family.push_back(v);
    std::sort(family.begin(), family.end());
    Factor f;
    for (auto u : family) {
      if (evidence[u] == kMissing) {
        f.vars.push_back(u);
        f.cards.push_back(cn.cardinality(u));
      } else {
        states[u] = evidence[u];
      }
    }
    std::size_t size = 1;
    for (auto c : f.cards) size *= c;
    f.values.resize(size);
    for (auto u : f.vars) states[u] = 0;
    for (std::size_t i = 0; i < size; ++i) {
      f.values[i] = cn.probability(v, cn.row_index(v, states), states[v]);
      for (std::size_t j = f.vars.size(); j-- > 0;) {
        if (++states[f.vars[j]] < f.cards[j]) break;
        states[f.vars[j]] = 0;
      }
    }
    factors.push_back(std::move(f));
  }

  std::set<std::size_t> pending;
  for (std::size_t v = 0; v < n; ++v) {
    if (relevant[v] && evidence[v] == kMissing && v != query) pending.insert(v);
  }

  while (!pending.empty()) {
    // Greedy min-degree; std::set iteration order breaks ties by index.
    std::size_t best = *pending.begin();
    std::size_t best_degree = n + 1;
    for (auto v : pending) {
      std::set<std::size_t> neighbours;
      for (const auto& f : factors) {
        if (f.contains(v)) neighbours.insert(f.vars.begin(), f.vars.end());
      }
      const std::size_t degree = neighbours.empty() ? 0 : neighbours.size() - 1;
      if (degree < best_degree) {
        best = v;
        best_degree = degree;
      }
    }
    pending.erase(best);

    Factor product{{}, {}, {1.0}};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.contains(best)) {
        product = detail::multiply(product, f);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(detail::sum_out(product, best));
    factors = std::move(rest);
  }

  Factor result{{}, {}, {1.0}};
  for (const auto& f : factors) result = detail::multiply(result, f);

  if (evidence[query] != kMissing) {
    normalize_or_throw(result.values);
    std::vector<double> degenerate(cn.cardinality(query), 0.0);
    degenerate[evidence[query]] = 1.0;
    return degenerate;
  }
  return normalize_or_throw(std::move(result.values));
}

Posterior VariableElimination::posterior(const Evidence& ev,
                                         const std::string& query) const {
  const std::size_t q = net_.variable_index(query);
  return {query, posterior(dense_evidence(net_, ev), q)};
}

Posterior posterior_ve(const Network& net, const Evidence& ev,
                       const std::string& query) {
  return VariableElimination(net).posterior(ev, query);
}

std::vector<Posterior> posteriors_ve(const Network& net, const Evidence& ev,
                                     std::span<const std::string> queries) {
  VariableElimination engine(net);
  const auto evidence = dense_evidence(net, ev);
  std::vector<Posterior> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    out.push_back({q, engine.posterior(evidence, net.variable_index(q))});
  }
  return out;
}

Prediction predict(const Posterior& posterior) {
  if (posterior.probs.empty()) {
    throw InvalidArgument("posterior of '" + posterior.variable_id +
                          "' is empty");
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < posterior.probs.size(); ++s) {
    if (posterior.probs[s] > posterior.probs[best]) best = s;
  }
  return {posterior.variable_id, best, posterior.probs[best]};
}

}  // namespace profilernet
