#include "profilernet/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <unordered_map>

#include "profilernet/error.hpp"

namespace profilernet {

std::string to_string(Category c) {
  switch (c) {
    case Category::CSA:
      return "CSA";
    case Category::VA:
      return "VA";
    case Category::FA:
      return "FA";
    case Category::OFF:
      return "OFF";
    case Category::OTHER:
      return "OTHER";
  }
  return "OTHER";
}

std::string to_string(Role r) {
  switch (r) {
    case Role::input:
      return "input";
    case Role::output:
      return "output";
    case Role::latent:
      return "latent";
  }
  return "latent";
}

std::optional<Category> parse_category(const std::string& s) {
  for (auto c : {Category::CSA, Category::VA, Category::FA, Category::OFF,
                 Category::OTHER}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<Role> parse_role(const std::string& s) {
  for (auto r : {Role::input, Role::output, Role::latent}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<std::size_t> VariableDef::state_index(
    const std::string& label) const {
  auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states.begin());
}

std::optional<std::size_t> Network::find_variable(const std::string& id) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t Network::variable_index(const std::string& id) const {
  auto i = find_variable(id);
  if (!i) throw UnknownVariable(id);
  return *i;
}

std::optional<std::string> Network::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Adjacency over declared nodes; edges with unknown endpoints are skipped.
std::vector<std::vector<std::size_t>> adjacency(
    const NetworkStructure& structure,
    const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::vector<std::size_t>> out(structure.nodes.size());
  for (const auto& e : structure.edges) {
    auto p = index.find(e.parent);
    auto c = index.find(e.child);
    if (p == index.end() || c == index.end()) continue;
    out[p->second].push_back(c->second);
  }
  return out;
}

std::unordered_map<std::string, std::size_t> node_index(
    const NetworkStructure& structure) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < structure.nodes.size(); ++i) {
    index.emplace(structure.nodes[i], i);
  }
  return index;
}

}  // namespace

std::optional<std::vector<std::string>> find_cycle(
    const NetworkStructure& structure) {
  auto index = node_index(structure);
  auto adj = adjacency(structure, index);
  const std::size_t n = structure.nodes.size();
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> color(n, 0);
  std::vector<std::size_t> parent(n, n);

  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < adj[u].size()) {
        std::size_t v = adj[u][next++];
        if (color[v] == 1) {
          std::vector<std::string> cycle{structure.nodes[v]};
          std::vector<std::string> back;
          for (std::size_t w = u; w != v; w = parent[w]) {
            back.push_back(structure.nodes[w]);
          }
          cycle.insert(cycle.end(), back.rbegin(), back.rend());
          cycle.push_back(structure.nodes[v]);
          return cycle;
        }
        if (color[v] == 0) {
          color[v] = 1;
          parent[v] = u;
          stack.emplace_back(v, 0);
        }
      } else {
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

std::vector<std::string> topological_order(const NetworkStructure& structure) {
  auto index = node_index(structure);
  for (const auto& e : structure.edges) {
    if (!index.count(e.parent)) throw UnknownVariable(e.parent);
    if (!index.count(e.child)) throw UnknownVariable(e.child);
  }
  auto adj = adjacency(structure, index);
  const std::size_t n = structure.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& out : adj) {
    for (auto v : out) ++indegree[v];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>,
                      std::greater<std::size_t>>
      ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::string> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::size_t u = ready.top();
    ready.pop();
    order.push_back(structure.nodes[u]);
    for (auto v : adj[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  if (order.size() != n) {
    auto cycle = find_cycle(structure);
    throw CycleError("cycle detected: " +
                     (cycle ? join(*cycle, " -> ") : std::string("?")));
  }
  return order;
}

ValidationReport validate_network(const Network& net) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string subject, std::string message) {
    report.push_back({std::move(kind), std::move(subject), std::move(message)});
  };

  std::set<std::string> ids;
  for (const auto& var : net.variables) {
    if (var.id.empty() || has_whitespace(var.id) ||
        var.id.find_first_of(",=|\"") != std::string::npos) {
      add("bad_id", var.id,
          "variable id '" + var.id +
              "' is empty or contains whitespace or one of , = | \"");
    }
    if (!ids.insert(var.id).second) {
      add("duplicate_variable", var.id, "variable id '" + var.id +
                                            "' is declared more than once");
    }
    if (var.states.size() < 2) {
      add("too_few_states", var.id,
          "variable '" + var.id + "' needs at least 2 states");
    }
    std::set<std::string> labels;
    for (const auto& label : var.states) {
      // Labels appear as bare cells in case files.
      if (label.empty() || has_whitespace(label) || label == "?" ||
          label.find(',') != std::string::npos) {
        add("bad_state_label", var.id,
            "variable '" + var.id + "' has an invalid state label '" + label +
                "'");
      }
      if (!labels.insert(label).second) {
        add("duplicate_state", var.id, "variable '" + var.id +
                                           "' repeats state label '" + label +
                                           "'");
      }
    }
  }

  // Structure
  const auto& st = net.structure;
  std::set<std::string> nodes;
  for (const auto& node : st.nodes) {
    if (!nodes.insert(node).second) {
      add("duplicate_node", node, "node '" + node + "' listed twice");
    }
    if (!ids.count(node)) {
      add("undeclared_node", node,
          "node '" + node + "' is not a declared variable");
    }
  }
  for (const auto& id : ids) {
    if (!nodes.count(id)) {
      add("missing_node", id,
          "variable '" + id + "' is missing from the structure");
    }
  }
  std::set<std::pair<std::string, std::string>> edge_set;
  for (const auto& e : st.edges) {
    const std::string name = e.parent + "->" + e.child;
    if (!nodes.count(e.parent) || !nodes.count(e.child)) {
      add("undeclared_endpoint", name,
          "edge " + name + " has an undeclared endpoint");
    }
    if (e.parent == e.child) {
      add("self_loop", name, "edge " + name + " is a self-loop");
    }
    if (!edge_set.emplace(e.parent, e.child).second) {
      add("duplicate_edge", name, "edge " + name + " is listed twice");
    }
  }
  if (auto cycle = find_cycle(st); cycle && cycle->size() > 2) {
    add("cycle", join(*cycle, "->"),
        "structure is cyclic: " + join(*cycle, " -> "));
  }

  // CPTs
  if (net.cpts.size() != net.variables.size()) {
    add("cpt_count", "",
        "expected " + std::to_string(net.variables.size()) + " CPTs, found " +
            std::to_string(net.cpts.size()));
  }
  const std::size_t m = std::min(net.cpts.size(), net.variables.size());
  for (std::size_t i = 0; i < m; ++i) {
    const auto& var = net.variables[i];
    const auto& cpt = net.cpts[i];
    if (cpt.variable_id != var.id) {
      add("cpt_order", var.id,
          "CPT " + std::to_string(i) + " is for '" + cpt.variable_id +
              "' but variable " + std::to_string(i) + " is '" + var.id + "'");
      continue;
    }
    std::set<std::string> declared_parents;
    for (const auto& e : st.edges) {
      if (e.child == var.id) declared_parents.insert(e.parent);
    }
    std::set<std::string> cpt_parents(cpt.parent_ids.begin(),
                                      cpt.parent_ids.end());
    if (cpt_parents.size() != cpt.parent_ids.size() ||
        cpt_parents != declared_parents) {
      add("parent_mismatch", var.id,
          "CPT parents of '" + var.id + "' (" + join(cpt.parent_ids, ", ") +
              ") do not match the structure's in-edges");
    }
    std::size_t expected_rows = 1;
    bool parents_known = true;
    for (const auto& p : cpt.parent_ids) {
      auto pi = net.find_variable(p);
      if (!pi) {
        parents_known = false;
        break;
      }
      expected_rows *= net.variables[*pi].cardinality();
    }
    if (parents_known && cpt.rows.size() != expected_rows) {
      add("row_count", var.id,
          "CPT of '" + var.id + "' has " + std::to_string(cpt.rows.size()) +
              " rows, expected " + std::to_string(expected_rows));
    }
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      const auto& row = cpt.rows[r];
      const std::string where =
          "CPT of '" + var.id + "' row " + std::to_string(r);
      if (row.size() != var.cardinality()) {
        add("row_length", var.id,
            where + " has " + std::to_string(row.size()) +
                " entries, expected " + std::to_string(var.cardinality()));
      }
      double sum = 0.0;
      bool in_range = true;
      for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0)) in_range = false;
        sum += p;
      }
      if (!in_range) {
        add("entry_range", var.id, where + " has an entry outside [0, 1]");
      }
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
        add("row_sum", var.id,
            where + " sums to " + std::to_string(sum) + ", not 1");
      }
    }
  }
  return report;
}

std::size_t parent_config_index(const Network& net, const Cpt& cpt,
                                const Assignment& assignment) {
  std::size_t index = 0;
  for (const auto& p : cpt.parent_ids) {
    const auto& parent = net.variable(p);
    auto it = assignment.find(p);
    if (it == assignment.end()) {
      throw InvalidArgument("assignment is missing parent '" + p + "' of '" +
                            cpt.variable_id + "'");
    }
    if (it->second >= parent.cardinality()) {
      throw BadState("state " + std::to_string(it->second) +
                     " is out of range for parent '" + p + "'");
    }
    index = index * parent.cardinality() + it->second;
  }
  return index;
}

std::vector<std::size_t> parent_config_states(const Network& net,
                                              const Cpt& cpt,
                                              std::size_t row) {
  std::vector<std::size_t> states(cpt.parent_ids.size());
  for (std::size_t k = cpt.parent_ids.size(); k-- > 0;) {
    const std::size_t card = net.variable(cpt.parent_ids[k]).cardinality();
    states[k] = row % card;
    row /= card;
  }
  if (row != 0) {
    throw InvalidArgument("row index out of range for CPT of '" +
                          cpt.variable_id + "'");
  }
  return states;
}

CompiledNetwork::CompiledNetwork(const Network& net) {
  if (auto report = validate_network(net); !report.empty()) {
    throw InvalidArgument("invalid network: " + report.front().message);
  }
  const std::size_t n = net.variables.size();
  cards_.resize(n);
  parents_.resize(n);
  children_.resize(n);
  cpt_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    cards_[v] = net.variables[v].cardinality();
    for (const auto& p : net.cpts[v].parent_ids) {
      const std::size_t pi = net.variable_index(p);
      parents_[v].push_back(pi);
      children_[pi].push_back(v);
    }
    for (const auto& row : net.cpts[v].rows) {
      cpt_[v].insert(cpt_[v].end(), row.begin(), row.end());
    }
  }
  for (auto& c : children_) std::sort(c.begin(), c.end());
  for (const auto& id : profilernet::topological_order(net.structure)) {
    order_.push_back(net.variable_index(id));
  }
}

std::size_t CompiledNetwork::row_index(
    std::size_t v, std::span<const std::size_t> states) const {
  std::size_t index = 0;
  for (auto p : parents_[v]) index = index * cards_[p] + states[p];
  return index;
}

NetworkStructure structure_from_cpts(const Network& net) {
  NetworkStructure st;
  for (const auto& var : net.variables) st.nodes.push_back(var.id);
  for (const auto& cpt : net.cpts) {
    for (const auto& p : cpt.parent_ids) st.edges.push_back({p, cpt.variable_id});
  }
  return st;
}

}  // namespace profilernet
