#include "profilernet/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "profilernet/error.hpp"
#include "profilernet/sampler.hpp"

namespace profilernet {

std::pair<Dataset, Dataset> split_dataset(const Dataset& d,
                                          double train_fraction,
                                          std::uint64_t seed) {
  if (d.empty()) throw InvalidArgument("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  const std::size_t n = d.size();
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n) + 0.5));

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Substream stream(mix64(seed));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[stream.below(i)]);
  }
  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[perm[i]] = true;

  std::pair<Dataset, Dataset> out;
  out.first.variable_ids = d.variable_ids;
  out.second.variable_ids = d.variable_ids;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? out.first : out.second).cases.push_back(d.cases[i]);
  }
  return out;
}

std::uint64_t SufficientCounts::total() const {
  std::uint64_t sum = 0;
  for (const auto& f : families) {
    for (auto c : f.counts) sum += c;
  }
  return sum;
}

std::uint64_t SufficientCounts::n_cases() const {
  std::uint64_t sum = 0;
  if (!families.empty()) {
    for (auto c : families.front().counts) sum += c;
  }
  return sum;
}

namespace {

std::size_t row_count(const std::vector<VariableDef>& vars,
                      const std::vector<std::size_t>& parents) {
  std::size_t rows = 1;
  for (auto p : parents) rows *= vars[p].cardinality();
  return rows;
}

std::size_t index_of(const std::vector<VariableDef>& vars,
                     const std::string& id) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].id == id) return i;
  }
  throw UnknownVariable(id);
}

void check_columns(const std::vector<VariableDef>& vars, const Dataset& d) {
  if (d.variable_ids.size() != vars.size()) {
    throw InvalidArgument("dataset has " +
                          std::to_string(d.variable_ids.size()) +
                          " columns, model has " +
                          std::to_string(vars.size()) + " variables");
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (d.variable_ids[v] != vars[v].id) {
      throw InvalidArgument("dataset column '" + d.variable_ids[v] +
                            "' does not match model variable '" + vars[v].id +
                            "'");
    }
  }
}

void check_case(const std::vector<VariableDef>& vars, const CaseRecord& c,
                std::size_t index) {
  if (c.states.size() != vars.size()) {
    throw InvalidArgument("case " + std::to_string(index) + " has " +
                          std::to_string(c.states.size()) + " values");
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (c.states[v] == kMissing) {
      throw InvalidArgument("case " + std::to_string(index) +
                            " is missing a value for '" + vars[v].id + "'");
    }
    if (c.states[v] >= vars[v].cardinality()) {
      throw BadState("case " + std::to_string(index) + ": state index " +
                     std::to_string(c.states[v]) + " is out of range for '" +
                     vars[v].id + "'");
    }
  }
}

std::vector<std::uint64_t> count_family(const std::vector<VariableDef>& vars,
                                        const Dataset& d, std::size_t child,
                                        const std::vector<std::size_t>& parents) {
  const std::size_t card = vars[child].cardinality();
  std::vector<std::uint64_t> counts(row_count(vars, parents) * card, 0);
  for (const auto& c : d.cases) {
    std::size_t row = 0;
    for (auto p : parents) row = row * vars[p].cardinality() + c.states[p];
    ++counts[row * card + c.states[child]];
  }
  return counts;
}

double family_bic(const std::vector<VariableDef>& vars, const Dataset& d,
                  std::size_t child, const std::vector<std::size_t>& parents) {
  const std::size_t n = d.size();
  if (n == 0) return 0.0;
  const std::size_t card = vars[child].cardinality();
  const auto counts = count_family(vars, d, child, parents);
  const std::size_t rows = counts.size() / card;
  double ll = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::uint64_t row_total = 0;
    for (std::size_t s = 0; s < card; ++s) row_total += counts[r * card + s];
    for (std::size_t s = 0; s < card; ++s) {
      const auto c = counts[r * card + s];
      if (c > 0) {
        ll += static_cast<double>(c) *
              std::log(static_cast<double>(c) / static_cast<double>(row_total));
      }
    }
  }
  const double free_params = static_cast<double>((card - 1) * rows);
  return ll - 0.5 * free_params * std::log(static_cast<double>(n));
}

std::vector<std::vector<std::size_t>> parent_lists(
    const NetworkStructure& structure, const std::vector<VariableDef>& vars) {
  std::vector<std::vector<std::size_t>> parents(vars.size());
  for (const auto& node : structure.nodes) index_of(vars, node);
  if (structure.nodes.size() != vars.size()) {
    throw InvalidArgument("structure has " +
                          std::to_string(structure.nodes.size()) +
                          " nodes for " + std::to_string(vars.size()) +
                          " variables");
  }
  topological_order(structure);  // throws on cycles
  for (const auto& e : structure.edges) {
    parents[index_of(vars, e.child)].push_back(index_of(vars, e.parent));
  }
  return parents;
}

}  // namespace

SufficientCounts make_counts(const NetworkStructure& structure,
                             const std::vector<VariableDef>& vars,
                             double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be a finite number >= 0");
  }
  SufficientCounts counts;
  counts.variables = vars;
  counts.alpha = alpha;
  auto parents = parent_lists(structure, vars);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    SufficientCounts::Family f;
    f.parents = std::move(parents[v]);
    f.cardinality = vars[v].cardinality();
    f.counts.assign(row_count(vars, f.parents) * f.cardinality, 0);
    counts.families.push_back(std::move(f));
  }
  return counts;
}

SufficientCounts incremental_update(SufficientCounts counts,
                                    const Dataset& new_cases) {
  const auto& vars = counts.variables;
  check_columns(vars, new_cases);
  for (std::size_t i = 0; i < new_cases.size(); ++i) {
    check_case(vars, new_cases.cases[i], i);
  }
  for (std::size_t v = 0; v < counts.families.size(); ++v) {
    auto& f = counts.families[v];
    for (const auto& c : new_cases.cases) {
      std::size_t row = 0;
      for (auto p : f.parents) row = row * vars[p].cardinality() + c.states[p];
      ++f.counts[row * f.cardinality + c.states[v]];
    }
  }
  return counts;
}

Network fit_from_counts(const SufficientCounts& counts) {
  const auto& vars = counts.variables;
  const double alpha = counts.alpha;
  Network net;
  net.variables = vars;
  for (const auto& var : vars) net.structure.nodes.push_back(var.id);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto& f = counts.families[v];
    Cpt cpt;
    cpt.variable_id = vars[v].id;
    for (auto p : f.parents) {
      cpt.parent_ids.push_back(vars[p].id);
      net.structure.edges.push_back({vars[p].id, vars[v].id});
    }
    const std::size_t card = f.cardinality;
    const std::size_t rows = f.counts.size() / card;
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint64_t row_total = 0;
      for (std::size_t s = 0; s < card; ++s) row_total += f.counts[r * card + s];
      const double denom =
          static_cast<double>(row_total) + alpha * static_cast<double>(card);
      std::vector<double> row(card);
      for (std::size_t s = 0; s < card; ++s) {
        row[s] = denom > 0.0
                     ? (static_cast<double>(f.counts[r * card + s]) + alpha) /
                           denom
                     : 1.0 / static_cast<double>(card);
      }
      cpt.rows.push_back(std::move(row));
    }
    net.cpts.push_back(std::move(cpt));
  }
  return net;
}

Network fit_parameters(const NetworkStructure& structure,
                       const std::vector<VariableDef>& vars, const Dataset& t,
                       double alpha) {
  return fit_from_counts(
      incremental_update(make_counts(structure, vars, alpha), t));
}

BicScore bic_score(const NetworkStructure& structure,
                   const std::vector<VariableDef>& vars, const Dataset& t) {
  check_columns(vars, t);
  for (std::size_t i = 0; i < t.size(); ++i) check_case(vars, t.cases[i], i);
  const auto parents = parent_lists(structure, vars);
  BicScore score;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    score.family.push_back(family_bic(vars, t, v, parents[v]));
    score.total += score.family.back();
  }
  return score;
}

namespace {

class HillClimber {
 public:
  HillClimber(const Dataset& data, const std::vector<VariableDef>& vars,
              const StructureSearchConfig& cfg)
      : data_(data), vars_(vars), cfg_(cfg) {}

  using Parents = std::vector<std::set<std::size_t>>;

  double family_score(std::size_t child, const std::set<std::size_t>& parents) {
    std::vector<std::size_t> key(parents.begin(), parents.end());
    auto [it, inserted] = cache_.try_emplace({child, key}, 0.0);
    if (inserted) it->second = family_bic(vars_, data_, child, key);
    return it->second;
  }

  double score(const Parents& parents) {
    double total = 0.0;
    for (std::size_t v = 0; v < parents.size(); ++v) {
      total += family_score(v, parents[v]);
    }
    return total;
  }

  bool forbidden(std::size_t from, std::size_t to) const {
    return cfg_.tier_constraint && vars_[from].role == Role::input &&
           vars_[to].role == Role::output;
  }

  // Whether `to` is reachable from `from` along directed edges.
  static bool reachable(const Parents& parents, std::size_t from,
                        std::size_t to) {
    const std::size_t n = parents.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      if (seen[u]) continue;
      seen[u] = true;
      for (std::size_t c = 0; c < n; ++c) {
        if (parents[c].count(u) && !seen[c]) stack.push_back(c);
      }
    }
    return false;
  }

  Parents climb(Parents parents) {
    const std::size_t n = parents.size();
    constexpr double kMinGain = 1e-9;
    for (;;) {
      double best_gain = kMinGain;
      enum class Move { none, add, remove, reverse } best_move = Move::none;
      std::size_t best_from = 0;
      std::size_t best_to = 0;
      auto consider = [&](double gain, Move move, std::size_t a, std::size_t b) {
        if (gain > best_gain) {
          best_gain = gain;
          best_move = move;
          best_from = a;
          best_to = b;
        }
      };

      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b) continue;
          const double base_b = family_score(b, parents[b]);
          if (parents[b].count(a)) {
            auto without = parents[b];
            without.erase(a);
            const double removal = family_score(b, without) - base_b;
            consider(removal, Move::remove, a, b);

            if (!forbidden(b, a) && parents[a].size() < cfg_.max_parents) {
              auto trial = parents;
              trial[b].erase(a);
              if (!reachable(trial, a, b)) {
                auto with = parents[a];
                with.insert(b);
                consider(removal + family_score(a, with) -
                             family_score(a, parents[a]),
                         Move::reverse, a, b);
              }
            }
          } else if (!parents[a].count(b) && !forbidden(a, b) &&
                     parents[b].size() < cfg_.max_parents &&
                     !reachable(parents, b, a)) {
            auto with = parents[b];
            with.insert(a);
            consider(family_score(b, with) - base_b, Move::add, a, b);
          }
        }
      }

      switch (best_move) {
        case Move::none:
          return parents;
        case Move::add:
          parents[best_to].insert(best_from);
          break;
        case Move::remove:
          parents[best_to].erase(best_from);
          break;
        case Move::reverse:
          parents[best_to].erase(best_from);
          parents[best_from].insert(best_to);
          break;
      }
    }
  }

  Parents random_start(std::uint64_t seed) const {
    const std::size_t n = vars_.size();
    Substream stream(seed);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::swap(perm[i - 1], perm[stream.below(i)]);
    }
    Parents parents(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t from = perm[i];
        const std::size_t to = perm[j];
        if (stream.uniform() < 0.25 && !forbidden(from, to) &&
            parents[to].size() < cfg_.max_parents) {
          parents[to].insert(from);
        }
      }
    }
    return parents;
  }

  // Drops edges of a user-supplied start that break the constraints.
  Parents sanitize(const Parents& start) const {
    Parents out(start.size());
    for (std::size_t v = 0; v < start.size(); ++v) {
      for (auto p : start[v]) {
        if (out[v].size() < cfg_.max_parents && !forbidden(p, v)) {
          out[v].insert(p);
        }
      }
    }
    return out;
  }

 private:
  const Dataset& data_;
  const std::vector<VariableDef>& vars_;
  const StructureSearchConfig& cfg_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache_;
};

}  // namespace

NetworkStructure learn_structure(const Dataset& t,
                                 const std::vector<VariableDef>& vars,
                                 const StructureSearchConfig& cfg) {
  if (cfg.restarts < 1) throw InvalidArgument("restarts must be >= 1");
  check_columns(vars, t);
  for (std::size_t i = 0; i < t.size(); ++i) check_case(vars, t.cases[i], i);

  const std::size_t n = vars.size();
  HillClimber climber(t, vars, cfg);

  HillClimber::Parents start(n);
  if (cfg.initial) {
    const auto lists = parent_lists(*cfg.initial, vars);
    for (std::size_t v = 0; v < n; ++v) {
      start[v].insert(lists[v].begin(), lists[v].end());
    }
  }

  HillClimber::Parents best;
  double best_score = 0.0;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    auto initial = r == 0 ? climber.sanitize(start)
                          : climber.random_start(substream_seed(cfg.seed, r));
    auto result = climber.climb(std::move(initial));
    const double s = climber.score(result);
    if (r == 0 || s > best_score) {
      best = std::move(result);
      best_score = s;
    }
  }

  NetworkStructure out;
  for (const auto& var : vars) out.nodes.push_back(var.id);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto p : best[v]) out.edges.push_back({vars[p].id, vars[v].id});
  }
  return out;
}

bool markov_equivalent(const NetworkStructure& a, const NetworkStructure& b) {
  using Pair = std::pair<std::string, std::string>;
  auto skeleton = [](const NetworkStructure& s) {
    std::set<Pair> out;
    for (const auto& e : s.edges) {
      out.insert(std::minmax(e.parent, e.child));
    }
    return out;
  };
  auto v_structures = [](const NetworkStructure& s,
                         const std::set<Pair>& skel) {
    std::map<std::string, std::vector<std::string>> parents;
    for (const auto& e : s.edges) parents[e.child].push_back(e.parent);
    std::set<std::tuple<std::string, std::string, std::string>> out;
    for (auto& [child, ps] : parents) {
      std::sort(ps.begin(), ps.end());
      for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
          if (!skel.count(std::minmax(ps[i], ps[j]))) {
            out.emplace(ps[i], child, ps[j]);
          }
        }
      }
    }
    return out;
  };
  std::set<std::string> nodes_a(a.nodes.begin(), a.nodes.end());
  std::set<std::string> nodes_b(b.nodes.begin(), b.nodes.end());
  const auto skel_a = skeleton(a);
  const auto skel_b = skeleton(b);
  return nodes_a == nodes_b && skel_a == skel_b &&
         v_structures(a, skel_a) == v_structures(b, skel_b);
}

}  // namespace profilernet
