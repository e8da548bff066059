#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "profilernet/dataset.hpp"
#include "profilernet/learning.hpp"
#include "profilernet/network.hpp"
#include "profilernet/profiling.hpp"

namespace profilernet::io {

// Network files
//
//   profilernet-network 1
//   meta <key> <value to end of line>
//   variable <id> <category> <role> "<display name>" <state> <state> ...
//   edge <parent> <child>
//   cpt <child> [| <parent> <parent> ...]
//   <p_1> ... <p_r>          one line per parent configuration,
//   ...                      last parent varying fastest
//   end
//
// Blank lines and lines starting with '#' are ignored. Probabilities are
// written as the shortest decimal that reads back exactly. A row summing to
// within 1e-6 of one is renormalized on load (rows already within 1e-9 are
// kept as written); any other row is rejected.

/// Throws ParseError with the offending line number.
Network parse_network(std::string_view text);
std::string serialize_network(const Network& net);

// Case files: comma-separated, a header of variable ids, then one case per
// line. Cells hold a state label or a 1-based state index (labels take
// precedence) and "?" for a missing value.

/// Result is ordered like the network's variables; columns absent from the
/// header are missing. With allow_missing false every variable must have a
/// column and "?" is rejected.
Dataset parse_cases(const Network& net, std::string_view text,
                    bool allow_missing);
/// Header in network order, cells as state labels.
std::string serialize_cases(const Network& net, const Dataset& d);

/// Label, or 1-based index when no label matches. Throws BadState.
std::size_t parse_state(const VariableDef& var, const std::string& token);

/// Parses repeated "id=state" flags. Repeating a variable with a different
/// state throws InvalidArgument.
Evidence parse_evidence(const Network& net,
                        const std::vector<std::string>& assignments);

/// Plain-text report: "key = value" header lines, a per-variable table, and
/// one confusion matrix per output variable.
std::string report_to_text(const Network& net, const EvaluationReport& report);
std::string report_to_json(const Network& net, const EvaluationReport& report);

/// JSON form of sufficient counts, for incremental training across runs.
std::string counts_to_json(const SufficientCounts& counts);
/// `vars` supplies the variable definitions the counts refer to.
SufficientCounts counts_from_json(std::string_view text,
                                  const std::vector<VariableDef>& vars);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

Network load_network(const std::filesystem::path& path);
void save_network(const std::filesystem::path& path, const Network& net);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace profilernet::io
