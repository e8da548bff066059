#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "profilernet/dataset.hpp"
#include "profilernet/network.hpp"

namespace profilernet {

/// Random partition of `d` into (training, validation). The training part has
/// floor(train_fraction * |d| + 0.5) cases. Both parts keep the original case
/// order. Throws InvalidArgument for an empty dataset or a fraction outside
/// (0, 1).
std::pair<Dataset, Dataset> split_dataset(const Dataset& d,
                                          double train_fraction,
                                          std::uint64_t seed);

/// Per-family state counts. These are all incremental training needs: new
/// cases only ever add to them.
struct SufficientCounts {
  struct Family {
    std::vector<std::size_t> parents;  // variable indices, CPT order
    std::size_t cardinality = 0;
    std::vector<std::uint64_t> counts;  // rows * cardinality, row-major

    bool operator==(const Family&) const = default;
  };

  std::vector<VariableDef> variables;
  std::vector<Family> families;
  double alpha = 1.0;

  std::uint64_t total() const;
  /// Number of cases counted so far.
  std::uint64_t n_cases() const;
  bool operator==(const SufficientCounts&) const = default;
};

/// Empty counts for the families of `structure` (parents in edge order).
SufficientCounts make_counts(const NetworkStructure& structure,
                             const std::vector<VariableDef>& vars,
                             double alpha);

/// Adds `cases` to `counts`. Throws InvalidArgument when the dataset columns
/// do not match the counted variables or a case is incomplete, and BadState
/// for an out-of-range state.
SufficientCounts incremental_update(SufficientCounts counts,
                                    const Dataset& new_cases);

/// CPT entries (count + alpha) / (row count + alpha * r). A row with no data
/// and alpha = 0 is uniform.
Network fit_from_counts(const SufficientCounts& counts);

/// Parameter estimation on complete data for a fixed structure.
Network fit_parameters(const NetworkStructure& structure,
                       const std::vector<VariableDef>& vars, const Dataset& t,
                       double alpha);

struct BicScore {
  double total = 0.0;
  std::vector<double> family;  // per variable, network order
};

/// Maximum-likelihood log-likelihood minus (k/2) ln n, decomposed per family.
BicScore bic_score(const NetworkStructure& structure,
                   const std::vector<VariableDef>& vars, const Dataset& t);

struct StructureSearchConfig {
  std::size_t max_parents = 3;
  std::size_t restarts = 5;
  /// Forbids edges from input-role variables to output-role variables.
  bool tier_constraint = false;
  std::uint64_t seed = 42;
  /// Starting point of the first restart; empty graph when absent.
  std::optional<NetworkStructure> initial;
};

/// Greedy hill climbing over single-edge additions, removals and reversals,
/// scored by BIC. The first restart starts from cfg.initial, later ones from
/// random DAGs; the best local optimum wins.
NetworkStructure learn_structure(const Dataset& t,
                                 const std::vector<VariableDef>& vars,
                                 const StructureSearchConfig& cfg);

/// Same skeleton and same v-structures.
bool markov_equivalent(const NetworkStructure& a, const NetworkStructure& b);

}  // namespace profilernet
