#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "profilernet/error.hpp"
#include "profilernet/fixtures.hpp"
#include "profilernet/profiling.hpp"
#include "profilernet/sampler.hpp"
#include "test_support.hpp"

using namespace profilernet;

namespace {

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Three-node example with X1 as the hidden offender trait and X2, X3 as the
// observed crime-scene actions.
Network reversed_roles() {
  auto net = fixtures::three_node_example();
  net.variables[0].role = Role::output;
  net.variables[1].role = Role::input;
  net.variables[2].role = Role::input;
  return net;
}

}  // namespace

TEST_CASE("empty evidence predicts the prior argmax") {
  const auto net = fixtures::three_node_example();
  const auto preds = predict_profile(net, {});
  REQUIRE(preds.size() == 2);
  const auto marginals = testing::brute_marginals(net);
  CHECK(preds[0].variable_id == "X2");
  CHECK(preds[0].predicted_state == argmax(marginals[1]));
  CHECK(preds[0].confidence == doctest::Approx(marginals[1][argmax(marginals[1])]));
  CHECK(preds[1].predicted_state == argmax(marginals[2]));
}

TEST_CASE("observed parents give the CPT row argmax") {
  const auto net = fixtures::three_node_example();
  for (std::size_t x1 = 0; x1 < 3; ++x1) {
    const auto preds = predict_profile(net, {{"X1", x1}});
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& row = net.cpts[k + 1].rows[x1];
      CHECK(preds[k].predicted_state == argmax(row));
      CHECK(preds[k].confidence == doctest::Approx(row[argmax(row)]).epsilon(1e-12));
    }
  }
  // X2 | x1_3 is 0.5 / 0.5: the tie goes to the first state.
  CHECK(predict_profile(net, {{"X1", 2}})[0].predicted_state == 0);
}

TEST_CASE("hidden root inferred from its children matches the oracle") {
  const auto net = reversed_roles();
  for (std::size_t x2 = 0; x2 < 2; ++x2) {
    for (std::size_t x3 = 0; x3 < 2; ++x3) {
      std::vector<double> joint(3, 0.0);
      testing::for_each_assignment(net, [&](const auto& states, double p) {
        if (states[1] == x2 && states[2] == x3) joint[states[0]] += p;
      });
      double total = joint[0] + joint[1] + joint[2];
      const auto preds = predict_profile(net, {{"X2", x2}, {"X3", x3}});
      REQUIRE(preds.size() == 1);
      CHECK(preds[0].predicted_state == argmax(joint));
      CHECK(preds[0].confidence ==
            doctest::Approx(joint[argmax(joint)] / total).epsilon(1e-12));
    }
  }
}

TEST_CASE("evidence on an output is rejected") {
  const auto net = fixtures::three_node_example();
  CHECK_THROWS_AS(predict_profile(net, {{"X2", 0}}), InvalidArgument);
  CHECK_THROWS_AS(predict_profile(net, {{"nope", 0}}), UnknownVariable);
}

TEST_CASE("evaluate a single case") {
  const auto net = fixtures::three_node_example();
  Dataset v;
  v.variable_ids = {"X1", "X2", "X3"};
  v.cases = {{{0, 1, 0}}};  // predictions for x1_1: X2 = x2_2, X3 = x3_1
  const auto report = evaluate(net, v);
  CHECK(report.n_validation == 1);
  CHECK(report.n_impossible == 0);
  CHECK(report.macro_accuracy == 1.0);
  CHECK(report.variable("X2").confusion ==
        std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}});
  CHECK(report.variable("X3").mean_confidence == doctest::Approx(0.7));

  v.cases = {{{0, 0, 1}}};
  CHECK(evaluate(net, v).macro_accuracy == 0.0);
  CHECK_THROWS_AS(report.variable("X1"), UnknownVariable);
}

TEST_CASE("degenerate output variable") {
  auto net = fixtures::three_node_example();
  net.cpts[1].rows = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
  const auto d = simulate_dataset(net, 300, {4});
  const auto report = evaluate(net, d);
  CHECK(report.variable("X2").accuracy == 1.0);
  CHECK(report.variable("X2").mean_confidence == 1.0);
}

TEST_CASE("output values never leak into predictions") {
  const auto net = fixtures::profiling_example();
  const auto d = simulate_dataset(net, 500, {8});
  auto corrupted = d;
  const auto outputs = variables_with_role(net, Role::output);
  for (auto& c : corrupted.cases) {
    for (const auto& id : outputs) {
      auto& s = c.states[net.variable_index(id)];
      s = 1 - s;
    }
  }
  const auto a = evaluate(net, d);
  const auto b = evaluate(net, corrupted);
  for (std::size_t k = 0; k < a.variables.size(); ++k) {
    // Flipping every observed binary label swaps the confusion columns.
    const auto& ca = a.variables[k].confusion;
    const auto& cb = b.variables[k].confusion;
    for (std::size_t p = 0; p < 2; ++p) {
      CHECK(ca[p][0] == cb[p][1]);
      CHECK(ca[p][1] == cb[p][0]);
    }
    CHECK(a.variables[k].mean_confidence == b.variables[k].mean_confidence);
  }
}

TEST_CASE("confusion matrices account for every evaluated case") {
  const auto net = fixtures::profiling_example();
  const auto d = simulate_dataset(net, 700, {13});
  const auto report = evaluate(net, d);
  CHECK(report.variables.size() == 4);
  for (const auto& ve : report.variables) {
    std::size_t total = 0;
    std::size_t diagonal = 0;
    for (std::size_t p = 0; p < ve.confusion.size(); ++p) {
      for (std::size_t o = 0; o < ve.confusion.size(); ++o) {
        total += ve.confusion[p][o];
        if (p == o) diagonal += ve.confusion[p][o];
      }
    }
    CHECK(total == report.n_evaluated());
    CHECK(diagonal == ve.n_correct);
    CHECK(ve.accuracy == doctest::Approx(static_cast<double>(diagonal) / total));
  }
}

TEST_CASE("impossible crime-scene evidence is counted, not scored") {
  auto net = fixtures::three_node_example();
  net = reversed_roles();
  net.cpts[1].rows[0] = {0.0, 1.0};
  net.cpts[1].rows[1] = {0.0, 1.0};
  net.cpts[1].rows[2] = {0.0, 1.0};
  Dataset v;
  v.variable_ids = {"X1", "X2", "X3"};
  v.cases = {{{0, 0, 0}}, {{0, 1, 0}}};
  const auto report = evaluate(net, v);
  CHECK(report.n_impossible == 1);
  CHECK(report.n_evaluated() == 1);
  CHECK(report.variable("X1").n_cases == 1);
}

TEST_CASE("pipeline is deterministic and reports its settings") {
  const auto truth = fixtures::profiling_example();
  const auto d = simulate_dataset(truth, 1000, {42});
  const auto a = run_pipeline(truth, d, {});
  const auto b = run_pipeline(truth, d, {});
  CHECK(a.report == b.report);
  CHECK(a.trained == b.trained);
  CHECK(a.report.n_validation == 200);
  CHECK(a.trained.meta("provenance") == "trained");
  CHECK(a.trained.meta("n_train") == "800");

  PipelineConfig other;
  other.split_seed = 7;
  CHECK_FALSE(run_pipeline(truth, d, other).report == a.report);
}

TEST_CASE("pipeline beats the majority baseline and tracks the oracle") {
  const auto truth = fixtures::profiling_example();
  const auto d = simulate_dataset(truth, 5000, {42});
  const auto result = run_pipeline(truth, d, {});
  const auto [train, validation] = split_dataset(d, 0.8, 42);
  const auto oracle = evaluate(truth, validation);
  for (const auto& ve : result.report.variables) {
    const auto o = truth.variable_index(ve.variable_id);
    double zeros = 0;
    for (const auto& c : validation.cases) zeros += c.states[o] == 0;
    const double majority =
        std::max(zeros, validation.size() - zeros) / validation.size();
    CHECK(ve.accuracy >= majority - 0.05);
    CHECK(std::abs(ve.accuracy - oracle.variable(ve.variable_id).accuracy) <= 0.03);
  }
}

TEST_CASE("pipeline with structure learning") {
  const auto truth = fixtures::three_node_example();
  const auto d = simulate_dataset(truth, 2000, {3});
  PipelineConfig cfg;
  cfg.learn_structure = true;
  cfg.search.restarts = 2;
  const auto a = run_pipeline(truth, d, cfg);
  CHECK(a.report == run_pipeline(truth, d, cfg).report);
  CHECK(markov_equivalent(a.trained.structure, truth.structure));
}

TEST_CASE("pipeline with an empty validation set") {
  const auto truth = fixtures::three_node_example();
  const auto d = simulate_dataset(truth, 2, {3});
  PipelineConfig cfg;
  cfg.train_fraction = 0.9;  // rounds to 2 of 2
  CHECK_THROWS_AS(run_pipeline(truth, d, cfg), InvalidArgument);
}
