#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace profilernet {

/// Variable categories used in profiling networks: crime-scene analysis,
/// victimology, forensic analysis, offender traits, and anything else.
enum class Category { CSA, VA, FA, OFF, OTHER };

/// input = observed crime-scene evidence, output = offender variable to be
/// predicted, latent = neither.
enum class Role { input, output, latent };

std::string to_string(Category c);
std::string to_string(Role r);
std::optional<Category> parse_category(const std::string& s);
std::optional<Role> parse_role(const std::string& s);

struct VariableDef {
  std::string id;
  std::string display_name;
  Category category = Category::OTHER;
  Role role = Role::latent;
  std::vector<std::string> states;

  std::size_t cardinality() const { return states.size(); }
  std::optional<std::size_t> state_index(const std::string& label) const;

  bool operator==(const VariableDef&) const = default;
};

struct Edge {
  std::string parent;
  std::string child;

  bool operator==(const Edge&) const = default;
};

struct NetworkStructure {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  bool operator==(const NetworkStructure&) const = default;
};

/// Conditional probability table. Rows are indexed by parent configuration
/// in mixed-radix order over parent_ids, last parent varying fastest.
struct Cpt {
  std::string variable_id;
  std::vector<std::string> parent_ids;
  std::vector<std::vector<double>> rows;

  bool operator==(const Cpt&) const = default;
};

/// A discrete Bayesian network. cpts[i] belongs to variables[i]. The type is
/// an aggregate so invalid networks can be built and reported on; every
/// algorithm expects a network that passes validate_network.
struct Network {
  std::vector<VariableDef> variables;
  NetworkStructure structure;
  std::vector<Cpt> cpts;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::optional<std::size_t> find_variable(const std::string& id) const;
  /// Throws UnknownVariable.
  std::size_t variable_index(const std::string& id) const;
  const VariableDef& variable(const std::string& id) const {
    return variables[variable_index(id)];
  }
  std::optional<std::string> meta(const std::string& key) const;

  bool operator==(const Network&) const = default;
};

inline constexpr double kRowSumTolerance = 1e-9;

struct Violation {
  std::string kind;     // e.g. "cycle", "row_sum", "duplicate_edge"
  std::string subject;  // variable id, edge "A->B", or cycle "A->B->A"
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_network(const Network& net);

/// Parents before children; among ready nodes, declaration order wins.
/// Throws CycleError naming one cycle.
std::vector<std::string> topological_order(const NetworkStructure& structure);

/// Finds one directed cycle, if any, as a closed path "A, B, ..., A".
std::optional<std::vector<std::string>> find_cycle(
    const NetworkStructure& structure);

using Assignment = std::map<std::string, std::size_t>;

/// Row index of the CPT for the parents' states in `assignment`. Throws
/// InvalidArgument for a missing parent and BadState for an out-of-range one.
std::size_t parent_config_index(const Network& net, const Cpt& cpt,
                                const Assignment& assignment);

/// Inverse of parent_config_index: parent states for a row index.
std::vector<std::size_t> parent_config_states(const Network& net,
                                              const Cpt& cpt,
                                              std::size_t row);

/// Index-based view of a valid network, shared by the sampler, inference and
/// learning code. Throws InvalidArgument when the network is not valid.
class CompiledNetwork {
 public:
  explicit CompiledNetwork(const Network& net);

  std::size_t size() const { return cards_.size(); }
  std::size_t cardinality(std::size_t v) const { return cards_[v]; }
  std::span<const std::size_t> cardinalities() const { return cards_; }
  std::span<const std::size_t> parents(std::size_t v) const {
    return parents_[v];
  }
  std::span<const std::size_t> children(std::size_t v) const {
    return children_[v];
  }
  std::span<const std::size_t> topological_order() const { return order_; }

  /// Row of v's CPT selected by the states in `states` (indexed by variable).
  std::size_t row_index(std::size_t v,
                        std::span<const std::size_t> states) const;
  double probability(std::size_t v, std::size_t row, std::size_t state) const {
    return cpt_[v][row * cards_[v] + state];
  }
  std::span<const double> row(std::size_t v, std::size_t row) const {
    return std::span<const double>(cpt_[v]).subspan(row * cards_[v],
                                                    cards_[v]);
  }

 private:
  std::vector<std::size_t> cards_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<double>> cpt_;
};

/// Builds a structure whose nodes are the network's variables and whose edges
/// come from the CPT parent lists.
NetworkStructure structure_from_cpts(const Network& net);

}  // namespace profilernet
