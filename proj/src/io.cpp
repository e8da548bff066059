#include "profilernet/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "profilernet/error.hpp"
#include "profilernet/format.hpp"

namespace profilernet::io {

namespace {

constexpr std::string_view kNetworkHeader = "profilernet-network";
constexpr double kRenormalizeTolerance = 1e-6;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// Whitespace-separated tokens; double quotes group, with \" and \\ escapes.
std::vector<std::string> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::string token;
    if (line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\' && i < line.size()) c = line[i++];
        token.push_back(c);
      }
      if (!closed) throw ParseError(lineno, "unterminated quoted string");
    } else {
      while (i < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[i]))) {
        token.push_back(line[i++]);
      }
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::size_t> parse_size(std::string_view s) {
  std::size_t value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return value;
}

struct PendingCpt {
  std::size_t line = 0;
  Cpt cpt;
  std::vector<std::size_t> row_lines;
};

}  // namespace

Network parse_network(std::string_view text) {
  Network net;
  std::map<std::string, PendingCpt> cpts;
  std::map<std::string, std::size_t> variable_lines;
  PendingCpt* open = nullptr;
  bool header_seen = false;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;

    if (open != nullptr) {
      if (line == "end") {
        open = nullptr;
        continue;
      }
      std::vector<double> row;
      for (const auto& tok : tokenize(line, lineno)) {
        auto p = parse_double(tok);
        if (!p) {
          throw ParseError(lineno, "CPT of '" + open->cpt.variable_id +
                                       "' row " +
                                       std::to_string(open->cpt.rows.size()) +
                                       ": '" + tok + "' is not a number");
        }
        row.push_back(*p);
      }
      open->cpt.rows.push_back(std::move(row));
      open->row_lines.push_back(lineno);
      continue;
    }

    const auto tokens = tokenize(line, lineno);
    const std::string& keyword = tokens.front();
    if (!header_seen) {
      if (keyword != kNetworkHeader || tokens.size() != 2 || tokens[1] != "1") {
        throw ParseError(lineno, "expected header 'profilernet-network 1'");
      }
      header_seen = true;
      continue;
    }

    if (keyword == "meta") {
      if (tokens.size() < 2) throw ParseError(lineno, "meta needs a key");
      std::string_view rest = trim(line.substr(4));
      rest = trim(rest.substr(tokens[1].size()));
      net.metadata.emplace_back(tokens[1], std::string(rest));
    } else if (keyword == "variable") {
      if (tokens.size() < 5) {
        throw ParseError(lineno,
                         "variable needs: id category role \"name\" states...");
      }
      VariableDef var;
      var.id = tokens[1];
      auto category = parse_category(tokens[2]);
      if (!category) {
        throw ParseError(lineno, "unknown category '" + tokens[2] + "'");
      }
      auto role = parse_role(tokens[3]);
      if (!role) throw ParseError(lineno, "unknown role '" + tokens[3] + "'");
      var.category = *category;
      var.role = *role;
      var.display_name = tokens[4];
      var.states.assign(tokens.begin() + 5, tokens.end());
      if (!variable_lines.emplace(var.id, lineno).second) {
        throw ParseError(lineno, "variable '" + var.id + "' declared twice");
      }
      net.structure.nodes.push_back(var.id);
      net.variables.push_back(std::move(var));
    } else if (keyword == "edge") {
      if (tokens.size() != 3) throw ParseError(lineno, "edge needs 2 ids");
      net.structure.edges.push_back({tokens[1], tokens[2]});
    } else if (keyword == "cpt") {
      if (tokens.size() < 2) throw ParseError(lineno, "cpt needs a variable");
      PendingCpt pending;
      pending.line = lineno;
      pending.cpt.variable_id = tokens[1];
      if (tokens.size() > 2) {
        if (tokens[2] != "|" || tokens.size() == 3) {
          throw ParseError(lineno, "expected 'cpt <id> | <parents...>'");
        }
        pending.cpt.parent_ids.assign(tokens.begin() + 3, tokens.end());
      }
      auto [it, inserted] = cpts.emplace(tokens[1], std::move(pending));
      if (!inserted) {
        throw ParseError(lineno, "second cpt block for '" + tokens[1] + "'");
      }
      open = &it->second;
    } else {
      throw ParseError(lineno, "unknown keyword '" + keyword + "'");
    }
  }
  if (!header_seen) throw ParseError(0, "empty network file");
  if (open != nullptr) {
    throw ParseError(open->line, "cpt block for '" + open->cpt.variable_id +
                                     "' is missing 'end'");
  }

  for (auto& [id, pending] : cpts) {
    auto v = net.find_variable(id);
    if (!v) throw ParseError(pending.line, "cpt for unknown variable '" + id + "'");
    const auto& var = net.variables[*v];
    for (std::size_t r = 0; r < pending.cpt.rows.size(); ++r) {
      auto& row = pending.cpt.rows[r];
      const std::size_t lineno = pending.row_lines[r];
      const std::string where =
          "CPT of '" + id + "' row " + std::to_string(r);
      if (row.size() != var.cardinality()) {
        throw ParseError(lineno, where + " has " + std::to_string(row.size()) +
                                     " entries, expected " +
                                     std::to_string(var.cardinality()));
      }
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0)) {
          throw ParseError(lineno, where + " has entry " + format_shortest(p) +
                                       " outside [0, 1]");
        }
        sum += p;
      }
      const double error = std::abs(sum - 1.0);
      if (error > kRenormalizeTolerance) {
        throw ParseError(lineno, where + " sums to " + format_shortest(sum) +
                                     ", not 1");
      }
      if (error > kRowSumTolerance) {
        for (double& p : row) p /= sum;
      }
    }
  }
  for (const auto& var : net.variables) {
    auto it = cpts.find(var.id);
    if (it == cpts.end()) {
      throw ParseError(variable_lines[var.id],
                       "variable '" + var.id + "' has no cpt block");
    }
    net.cpts.push_back(std::move(it->second.cpt));
  }

  if (auto report = validate_network(net); !report.empty()) {
    const auto& first = report.front();
    std::size_t lineno = 0;
    if (auto it = cpts.find(first.subject); it != cpts.end()) {
      lineno = it->second.line;
    } else if (auto vl = variable_lines.find(first.subject);
               vl != variable_lines.end()) {
      lineno = vl->second;
    }
    throw ParseError(lineno, first.message);
  }
  return net;
}

std::string serialize_network(const Network& net) {
  std::ostringstream out;
  out << kNetworkHeader << " 1\n";
  for (const auto& [key, value] : net.metadata) {
    if (value.find('\n') != std::string::npos ||
        key.find_first_of(" \t\n") != std::string::npos || key.empty()) {
      throw InvalidArgument("metadata '" + key + "' cannot be serialized");
    }
    out << "meta " << key << ' ' << value << '\n';
  }
  for (const auto& var : net.variables) {
    out << "variable " << var.id << ' ' << to_string(var.category) << ' '
        << to_string(var.role) << ' ' << quote(var.display_name);
    for (const auto& s : var.states) out << ' ' << s;
    out << '\n';
  }
  for (const auto& e : net.structure.edges) {
    out << "edge " << e.parent << ' ' << e.child << '\n';
  }
  for (const auto& cpt : net.cpts) {
    out << "cpt " << cpt.variable_id;
    if (!cpt.parent_ids.empty()) {
      out << " |";
      for (const auto& p : cpt.parent_ids) out << ' ' << p;
    }
    out << '\n';
    for (const auto& row : cpt.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        out << (k ? " " : "") << format_shortest(row[k]);
      }
      out << '\n';
    }
    out << "end\n";
  }
  return out.str();
}

std::size_t parse_state(const VariableDef& var, const std::string& token) {
  if (auto s = var.state_index(token)) return *s;
  if (auto n = parse_size(token); n && *n >= 1 && *n <= var.cardinality()) {
    return *n - 1;
  }
  throw BadState("'" + token + "' is not a state of '" + var.id + "'");
}

Dataset parse_cases(const Network& net, std::string_view text,
                    bool allow_missing) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < lines.size()) {
      auto line = trim(lines[i]);
      if (!line.empty() && line.front() != '#') break;
      ++i;
    }
  };
  auto cells = [](std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      out.emplace_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  };

  skip();
  if (i >= lines.size()) throw ParseError(0, "case file has no header");
  const std::size_t header_line = i + 1;
  const auto header = cells(lines[i++]);
  std::vector<std::size_t> columns;
  std::set<std::size_t> seen;
  for (const auto& id : header) {
    auto v = net.find_variable(id);
    if (!v) throw ParseError(header_line, "unknown variable '" + id + "'");
    if (!seen.insert(*v).second) {
      throw ParseError(header_line, "column '" + id + "' appears twice");
    }
    columns.push_back(*v);
  }
  if (!allow_missing) {
    for (const auto& var : net.variables) {
      if (!seen.count(net.variable_index(var.id))) {
        throw ParseError(header_line, "no column for variable '" + var.id + "'");
      }
    }
  }

  Dataset d;
  for (const auto& var : net.variables) d.variable_ids.push_back(var.id);
  for (;;) {
    skip();
    if (i >= lines.size()) break;
    const std::size_t lineno = i + 1;
    const auto row = cells(lines[i++]);
    if (row.size() != columns.size()) {
      throw ParseError(lineno, "expected " + std::to_string(columns.size()) +
                                   " cells, found " +
                                   std::to_string(row.size()));
    }
    CaseRecord record;
    record.states.assign(net.variables.size(), kMissing);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& var = net.variables[columns[c]];
      if (row[c] == "?") {
        if (!allow_missing) {
          throw ParseError(lineno, "missing value for '" + var.id +
                                       "' is not allowed here");
        }
        continue;
      }
      try {
        record.states[columns[c]] = parse_state(var, row[c]);
      } catch (const BadState& e) {
        throw ParseError(lineno, e.what());
      }
    }
    d.cases.push_back(std::move(record));
  }
  return d;
}

std::string serialize_cases(const Network& net, const Dataset& d) {
  std::vector<std::size_t> columns;
  for (const auto& id : d.variable_ids) columns.push_back(net.variable_index(id));
  std::string out;
  for (std::size_t c = 0; c < d.variable_ids.size(); ++c) {
    out += (c ? "," : "") + d.variable_ids[c];
  }
  out += '\n';
  for (const auto& record : d.cases) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      const std::size_t s = record.states[c];
      out += s == kMissing ? std::string("?")
                           : net.variables[columns[c]].states.at(s);
    }
    out += '\n';
  }
  return out;
}

Evidence parse_evidence(const Network& net,
                        const std::vector<std::string>& assignments) {
  Evidence ev;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("evidence '" + a + "' is not of the form id=state");
    }
    const std::string id(trim(std::string_view(a).substr(0, eq)));
    const std::string token(trim(std::string_view(a).substr(eq + 1)));
    const std::size_t state = parse_state(net.variable(id), token);
    auto [it, inserted] = ev.emplace(id, state);
    if (!inserted && it->second != state) {
      throw InvalidArgument("contradictory evidence for '" + id + "'");
    }
  }
  return ev;
}

std::string report_to_text(const Network& net, const EvaluationReport& report) {
  std::ostringstream out;
  out << "# profilernet evaluation report\n";
  for (const auto& [key, value] : report.metadata) {
    out << key << " = " << value << '\n';
  }
  out << "n_validation = " << report.n_validation << '\n'
      << "n_evaluated = " << report.n_evaluated() << '\n'
      << "n_impossible = " << report.n_impossible << '\n'
      << "macro_accuracy = " << format_general(report.macro_accuracy, 6)
      << "\n\n";

  out << "variable\tn_cases\tn_correct\taccuracy\tmean_confidence\n";
  for (const auto& v : report.variables) {
    out << v.variable_id << '\t' << v.n_cases << '\t' << v.n_correct << '\t'
        << format_general(v.accuracy, 6) << '\t'
        << format_general(v.mean_confidence, 6) << '\n';
  }
  for (const auto& v : report.variables) {
    const auto& states = net.variable(v.variable_id).states;
    out << "\nconfusion " << v.variable_id << " (rows predicted, columns observed)\n";
    out << "predicted\\observed";
    for (const auto& s : states) out << '\t' << s;
    out << '\n';
    for (std::size_t p = 0; p < v.confusion.size(); ++p) {
      out << states[p];
      for (auto c : v.confusion[p]) out << '\t' << c;
      out << '\n';
    }
  }
  return out.str();
}

std::string report_to_json(const Network& net, const EvaluationReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.metadata) meta[key] = value;
  j["metadata"] = meta;
  j["n_validation"] = report.n_validation;
  j["n_evaluated"] = report.n_evaluated();
  j["n_impossible"] = report.n_impossible;
  j["macro_accuracy"] = report.macro_accuracy;
  j["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : report.variables) {
    nlohmann::ordered_json jv;
    jv["variable"] = v.variable_id;
    jv["states"] = net.variable(v.variable_id).states;
    jv["n_cases"] = v.n_cases;
    jv["n_correct"] = v.n_correct;
    jv["accuracy"] = v.accuracy;
    jv["mean_confidence"] = v.mean_confidence;
    jv["confusion"] = v.confusion;
    j["variables"].push_back(std::move(jv));
  }
  return j.dump(2) + "\n";
}

std::string counts_to_json(const SufficientCounts& counts) {
  nlohmann::ordered_json j;
  j["format"] = "profilernet-counts";
  j["version"] = 1;
  j["alpha"] = counts.alpha;
  j["families"] = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < counts.families.size(); ++v) {
    const auto& f = counts.families[v];
    nlohmann::ordered_json jf;
    jf["variable"] = counts.variables[v].id;
    std::vector<std::string> parents;
    for (auto p : f.parents) parents.push_back(counts.variables[p].id);
    jf["parents"] = parents;
    jf["counts"] = f.counts;
    j["families"].push_back(std::move(jf));
  }
  return j.dump(1) + "\n";
}

SufficientCounts counts_from_json(std::string_view text,
                                  const std::vector<VariableDef>& vars) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("counts file: ") + e.what());
  }
  try {
    if (j.at("format") != "profilernet-counts" || j.at("version") != 1) {
      throw ParseError(0, "not a profilernet counts file");
    }
    NetworkStructure structure;
    for (const auto& var : vars) structure.nodes.push_back(var.id);
    const auto& families = j.at("families");
    if (families.size() != vars.size()) {
      throw InvalidArgument("counts file has " +
                            std::to_string(families.size()) +
                            " families for " + std::to_string(vars.size()) +
                            " variables");
    }
    for (std::size_t v = 0; v < vars.size(); ++v) {
      const auto& jf = families[v];
      if (jf.at("variable").get<std::string>() != vars[v].id) {
        throw InvalidArgument("counts file family " + std::to_string(v) +
                              " does not match variable '" + vars[v].id + "'");
      }
      for (const auto& p : jf.at("parents")) {
        structure.edges.push_back({p.get<std::string>(), vars[v].id});
      }
    }
    auto counts = make_counts(structure, vars, j.at("alpha").get<double>());
    for (std::size_t v = 0; v < vars.size(); ++v) {
      auto values = families[v].at("counts").get<std::vector<std::uint64_t>>();
      if (values.size() != counts.families[v].counts.size()) {
        throw InvalidArgument("counts for '" + vars[v].id +
                              "' have the wrong length");
      }
      counts.families[v].counts = std::move(values);
    }
    return counts;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("counts file: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Network load_network(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_network(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

void save_network(const std::filesystem::path& path, const Network& net) {
  write_file(path, serialize_network(net));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace profilernet::io
