#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "profilernet/network.hpp"

namespace profilernet {

inline constexpr std::size_t kMissing = std::numeric_limits<std::size_t>::max();

/// One case: a state index per network variable (in the network's variable
/// order), kMissing where unobserved.
struct CaseRecord {
  std::vector<std::size_t> states;

  bool complete() const {
    for (auto s : states) {
      if (s == kMissing) return false;
    }
    return true;
  }
  bool operator==(const CaseRecord&) const = default;
};

/// Cases over a fixed list of variable ids. Datasets built by this library
/// always list the variables of their network in network order.
struct Dataset {
  std::vector<std::string> variable_ids;
  std::vector<CaseRecord> cases;

  std::size_t size() const { return cases.size(); }
  bool empty() const { return cases.empty(); }
  bool operator==(const Dataset&) const = default;
};

/// Observed states keyed by variable id.
using Evidence = std::map<std::string, std::size_t>;

/// Throws UnknownVariable or BadState if `ev` does not fit `net`.
void check_evidence(const Network& net, const Evidence& ev);

/// Dense form of `ev`: a state per variable, kMissing where unobserved.
std::vector<std::size_t> dense_evidence(const Network& net, const Evidence& ev);

/// Throws InvalidArgument unless `d` lists exactly the variables of `net` in
/// order and every case is complete with in-range states.
void check_complete_dataset(const Network& net, const Dataset& d);

}  // namespace profilernet
