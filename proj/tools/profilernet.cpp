// profilernet: simulate, train, evaluate and query discrete Bayesian networks
// for offender profiling.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "profilernet/error.hpp"
#include "profilernet/format.hpp"
#include "profilernet/inference.hpp"
#include "profilernet/io.hpp"
#include "profilernet/learning.hpp"
#include "profilernet/profiling.hpp"
#include "profilernet/sampler.hpp"
#include "profilernet/service.hpp"

namespace pn = profilernet;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct SearchOptions {
  bool learn_structure = false;
  std::size_t max_parents = 3;
  std::size_t restarts = 5;
  std::string tier = "auto";
};

void add_search_options(CLI::App* cmd, SearchOptions& o) {
  cmd->add_flag("--learn-structure", o.learn_structure,
                "Search the structure by hill climbing instead of using the "
                "network's edges");
  cmd->add_option("--max-parents", o.max_parents, "Parent cap for the search")
      ->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "Hill-climbing restarts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tier-constraint", o.tier,
                  "Forbid input->output edges: auto (on when the network has "
                  "both roles), on, off")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "on", "off"}));
}

pn::StructureSearchConfig search_config(const SearchOptions& o,
                                        const pn::Network& net,
                                        std::uint64_t seed) {
  pn::StructureSearchConfig cfg;
  cfg.max_parents = o.max_parents;
  cfg.restarts = o.restarts;
  cfg.seed = seed;
  if (o.tier == "auto") {
    cfg.tier_constraint =
        !pn::variables_with_role(net, pn::Role::input).empty() &&
        !pn::variables_with_role(net, pn::Role::output).empty();
  } else {
    cfg.tier_constraint = o.tier == "on";
  }
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

pn::Dataset load_training_cases(const pn::Network& net,
                                const std::string& path) {
  const std::string text = pn::io::read_file(path);
  pn::Dataset d;
  try {
    d = pn::io::parse_cases(net, text, /*allow_missing=*/false);
  } catch (const pn::ParseError& e) {
    throw pn::ParseError(e.line(), e.detail(), path);
  }
  if (d.empty()) throw pn::Error(path + ": case file contains no cases");
  return d;
}

std::string join_probs(const pn::VariableDef& var,
                       const std::vector<double>& probs, int digits) {
  std::string out;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    if (s) out += ' ';
    out += var.states[s] + "=" + pn::format_general(probs[s], digits);
  }
  return out;
}

int run_simulate(const std::string& network_path, std::size_t n,
                 std::uint64_t seed, const std::string& out_path,
                 unsigned threads) {
  const auto net = pn::io::load_network(network_path);
  const auto d = pn::simulate_dataset(net, n, {seed}, threads);
  pn::io::write_file(out_path, pn::io::serialize_cases(net, d));

  std::cout << "cases = " << n << "\nseed = " << seed << "\nout = " << out_path
            << "\n";
  for (std::size_t v = 0; v < net.variables.size(); ++v) {
    const auto& var = net.variables[v];
    std::vector<double> freq(var.cardinality(), 0.0);
    for (const auto& c : d.cases) freq[c.states[v]] += 1.0;
    for (double& f : freq) f = n > 0 ? f / static_cast<double>(n) : 0.0;
    std::cout << var.id << ": " << join_probs(var, freq, 4) << "\n";
  }
  return 0;
}

struct TrainOptions {
  std::string cases;
  std::string network;
  std::string out;
  double alpha = 1.0;
  std::uint64_t seed = kDefaultSeed;
  std::string counts_in;
  std::string counts_out;
  bool no_timestamp = false;
  SearchOptions search;
};

int run_train(const TrainOptions& o) {
  const auto hypothesis = pn::io::load_network(o.network);
  const std::string case_text = pn::io::read_file(o.cases);
  const auto data = load_training_cases(hypothesis, o.cases);

  pn::SufficientCounts counts;
  if (!o.counts_in.empty()) {
    if (o.search.learn_structure) {
      throw pn::InvalidArgument(
          "--counts-in keeps the stored structure; drop --learn-structure");
    }
    counts = pn::io::counts_from_json(pn::io::read_file(o.counts_in),
                                      hypothesis.variables);
  } else {
    pn::NetworkStructure structure = hypothesis.structure;
    if (o.search.learn_structure) {
      auto cfg = search_config(o.search, hypothesis, o.seed);
      cfg.initial = hypothesis.structure;
      structure = pn::learn_structure(data, hypothesis.variables, cfg);
    }
    counts = pn::make_counts(structure, hypothesis.variables, o.alpha);
  }
  counts = pn::incremental_update(std::move(counts), data);

  auto trained = pn::fit_from_counts(counts);
  trained.metadata = {
      {"name", hypothesis.meta("name").value_or("network")},
      {"provenance", "trained"},
      {"source_file", o.cases},
      {"source_hash", "fnv1a64:" + pn::io::fnv1a_hex(case_text)},
      {"n_cases", std::to_string(data.size())},
      {"alpha", pn::format_shortest(counts.alpha)},
      {"seed", std::to_string(o.seed)},
      {"learn_structure", o.search.learn_structure ? "true" : "false"},
  };
  if (!o.counts_in.empty()) {
    trained.metadata.emplace_back("n_cases_total",
                                  std::to_string(counts.n_cases()));
  }
  if (!o.no_timestamp) trained.metadata.emplace_back("created", utc_timestamp());

  pn::io::save_network(o.out, trained);
  if (!o.counts_out.empty()) {
    pn::io::write_file(o.counts_out, pn::io::counts_to_json(counts));
  }
  std::cout << "trained on " << data.size() << " cases, " << trained.structure.edges.size()
            << " edges, alpha " << pn::format_shortest(counts.alpha) << " -> "
            << o.out << "\n";
  return 0;
}

struct EvaluateOptions {
  std::string network;
  std::string cases;
  double split = 0.8;
  std::uint64_t seed = kDefaultSeed;
  double alpha = 1.0;
  bool pretrained = false;
  std::string report;
  std::string json;
  std::string trained_out;
  SearchOptions search;
};

int run_evaluate(const EvaluateOptions& o) {
  const auto net = pn::io::load_network(o.network);
  const auto data = load_training_cases(net, o.cases);

  pn::EvaluationReport report;
  const pn::Network* model = &net;
  pn::PipelineResult result;
  if (o.pretrained) {
    report = pn::evaluate(net, data);
    report.metadata = {{"model", net.meta("name").value_or("network")},
                       {"mode", "pretrained"},
                       {"cases", o.cases}};
  } else {
    pn::PipelineConfig cfg;
    cfg.train_fraction = o.split;
    cfg.split_seed = o.seed;
    cfg.alpha = o.alpha;
    cfg.learn_structure = o.search.learn_structure;
    cfg.search = search_config(o.search, net, o.seed);
    result = pn::run_pipeline(net, data, cfg);
    report = result.report;
    model = &result.trained;
    if (!o.trained_out.empty()) pn::io::save_network(o.trained_out, result.trained);
  }

  const std::string text = pn::io::report_to_text(*model, report);
  std::cout << text;
  if (!o.report.empty()) pn::io::write_file(o.report, text);
  if (!o.json.empty()) {
    pn::io::write_file(o.json, pn::io::report_to_json(*model, report));
  }
  return 0;
}

int run_infer(const std::string& network_path,
              const std::vector<std::string>& evidence_flags,
              std::vector<std::string> queries, bool all, bool as_json) {
  const auto net = pn::io::load_network(network_path);
  const auto ev = pn::io::parse_evidence(net, evidence_flags);
  const pn::VariableElimination engine(net);

  if (as_json) {
    std::cout << pn::service::infer_json(engine, ev) << "\n";
    return 0;
  }

  if (queries.empty()) {
    const bool has_outputs =
        !pn::variables_with_role(net, pn::Role::output).empty();
    for (const auto& var : net.variables) {
      if (ev.count(var.id)) continue;
      if (all || !has_outputs || var.role == pn::Role::output) {
        queries.push_back(var.id);
      }
    }
  }
  const auto dense = pn::dense_evidence(net, ev);
  for (const auto& q : queries) {
    const auto& var = net.variable(q);
    const pn::Posterior post{q, engine.posterior(dense, net.variable_index(q))};
    const auto pred = pn::predict(post);
    std::cout << q << ": " << join_probs(var, post.probs, 15) << " | predicted "
              << var.states[pred.predicted_state] << " confidence "
              << pn::format_general(pred.confidence, 15) << "\n";
  }
  if (queries.empty()) engine.posterior(dense, 0);  // still checks evidence
  return 0;
}

pn::service::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int run_serve(const std::string& network_path, const std::string& host,
              int port) {
  const pn::service::Service service(pn::io::load_network(network_path));
  pn::service::HttpServer server(service);
  const int bound = server.bind(host, port);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << "serving '" << service.model().meta("name").value_or(network_path)
            << "' on http://" << host << ":" << bound << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"profilernet: offender-profiling Bayesian network toolkit"};
  app.require_subcommand(1);

  // simulate
  std::string sim_network;
  std::size_t sim_n = 0;
  std::uint64_t sim_seed = kDefaultSeed;
  std::string sim_out;
  unsigned sim_threads = 1;
  auto* simulate = app.add_subcommand(
      "simulate", "Sample complete cases from a network by ancestral sampling");
  simulate->add_option("--network", sim_network, "Network file")->required();
  simulate->add_option("-n,--cases", sim_n, "Number of cases")->required();
  simulate->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output case file")->required();
  simulate->add_option("--threads", sim_threads, "Worker threads")
      ->capture_default_str();

  // train
  TrainOptions train_opts;
  auto* train = app.add_subcommand(
      "train", "Fit a network's parameters (and optionally structure)");
  train->add_option("--cases", train_opts.cases, "Complete training cases")
      ->required();
  train->add_option("--network", train_opts.network,
                    "Hypothesis network: variables, structure, search start")
      ->required();
  train->add_option("--out", train_opts.out, "Trained network file")->required();
  train->add_option("--alpha", train_opts.alpha, "Dirichlet pseudo-count")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--seed", train_opts.seed, "Structure-search seed")
      ->capture_default_str();
  train->add_option("--counts-in", train_opts.counts_in,
                    "Counts from an earlier run; new cases are added to them");
  train->add_option("--counts-out", train_opts.counts_out,
                    "Write the accumulated counts for later incremental runs");
  train->add_flag("--no-timestamp", train_opts.no_timestamp,
                  "Omit the 'created' metadata line");
  add_search_options(train, train_opts.search);

  // evaluate
  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Split, train and evaluate; or evaluate a trained network");
  evaluate->add_option("--network", eval_opts.network, "Network file")
      ->required();
  evaluate->add_option("--cases", eval_opts.cases, "Complete cases")->required();
  evaluate->add_option("--split", eval_opts.split, "Training fraction")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--seed", eval_opts.seed, "Split and search seed")
      ->capture_default_str();
  evaluate->add_option("--alpha", eval_opts.alpha, "Dirichlet pseudo-count")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  evaluate->add_flag("--pretrained", eval_opts.pretrained,
                     "Evaluate the network as given on every case");
  evaluate->add_option("--report", eval_opts.report, "Write the text report");
  evaluate->add_option("--json", eval_opts.json, "Write the JSON report");
  evaluate->add_option("--trained-out", eval_opts.trained_out,
                       "Write the network trained on the training split");
  add_search_options(evaluate, eval_opts.search);

  // infer
  std::string inf_network;
  std::vector<std::string> inf_evidence;
  std::vector<std::string> inf_queries;
  bool inf_all = false;
  bool inf_json = false;
  auto* infer = app.add_subcommand(
      "infer", "Posteriors and predictions given crime-scene evidence");
  infer->add_option("--network", inf_network, "Network file")->required();
  infer->add_option("-e,--evidence", inf_evidence,
                    "Evidence as id=state (label or 1-based index); repeat");
  infer->add_option("-q,--query", inf_queries, "Variables to report; repeat");
  infer->add_flag("--all", inf_all, "Report every unobserved variable");
  infer->add_flag("--json", inf_json, "Print the /infer response body");

  // serve
  std::string srv_network;
  std::string srv_bind = "127.0.0.1";
  int srv_port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP inference service");
  serve->add_option("--network", srv_network, "Network file")->required();
  serve->add_option("--bind", srv_bind, "Bind address")->capture_default_str();
  serve->add_option("--port", srv_port, "Port (0 picks a free one)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      return run_simulate(sim_network, sim_n, sim_seed, sim_out, sim_threads);
    }
    if (*train) return run_train(train_opts);
    if (*evaluate) return run_evaluate(eval_opts);
    if (*infer) {
      return run_infer(inf_network, inf_evidence, inf_queries, inf_all,
                       inf_json);
    }
    if (*serve) return run_serve(srv_network, srv_bind, srv_port);
  } catch (const std::exception& e) {
    std::cerr << "profilernet: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
