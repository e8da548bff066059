#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "profilernet/error.hpp"
#include "profilernet/fixtures.hpp"
#include "profilernet/inference.hpp"
#include "test_support.hpp"

using namespace profilernet;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

Evidence random_evidence(const Network& net, Substream& rng) {
  Evidence ev;
  for (const auto& var : net.variables) {
    if (rng.uniform() < 0.3) ev[var.id] = rng.below(var.cardinality());
  }
  return ev;
}

}  // namespace

TEST_CASE("joint probability") {
  const auto net = fixtures::three_node_example();
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(joint_probability(net, std::vector<std::size_t>{0, 0, s}) ==
          doctest::Approx(0.2 * 0.2 * net.cpts[2].rows[0][s]).epsilon(1e-15));
  }
  CHECK(joint_probability(net, Assignment{{"X1", 0}, {"X2", 0}, {"X3", 1}}) ==
        doctest::Approx(0.2 * 0.2 * 0.3));

  double total = 0.0;
  testing::for_each_assignment(net, [&](const auto& states, double) {
    total += joint_probability(net, states);
  });
  CHECK(std::abs(total - 1.0) < 1e-9);

  auto with_zero = net;
  with_zero.cpts[1].rows[0] = {0.0, 1.0};
  CHECK(joint_probability(with_zero, std::vector<std::size_t>{0, 0, 0}) == 0.0);

  CHECK_THROWS_AS(joint_probability(net, std::vector<std::size_t>{0, 0}),
                  InvalidArgument);
  CHECK_THROWS_AS(joint_probability(net, Assignment{{"X1", 0}, {"X2", 0}}),
                  InvalidArgument);
}

TEST_CASE("enumeration on the three-node example") {
  const auto net = fixtures::three_node_example();

  const auto prior = posterior_by_enumeration(net, {}, "X1");
  CHECK(max_abs_diff(prior.probs, {0.2, 0.5, 0.3}) < 1e-12);

  const auto x2 = posterior_by_enumeration(net, {{"X1", 0}}, "X2");
  CHECK(max_abs_diff(x2.probs, {0.2, 0.8}) < 1e-12);

  // Bayes rule by hand, X2 = x2_1:
  //   P(X1, x2_1) = [0.2 * 0.2, 0.5 * 0.9, 0.3 * 0.5] = [0.04, 0.45, 0.15]
  //   P(x2_1) = 0.64
  //   P(X1 | x2_1) = [0.0625, 0.703125, 0.234375]
  const auto x1 = posterior_by_enumeration(net, {{"X2", 0}}, "X1");
  CHECK(max_abs_diff(x1.probs, {0.0625, 0.703125, 0.234375}) < 1e-12);
}

TEST_CASE("variable elimination matches enumeration on the three-node example") {
  const auto net = fixtures::three_node_example();
  for (const auto& ev_var : net.variables) {
    for (std::size_t s = 0; s < ev_var.cardinality(); ++s) {
      for (const auto& q : net.variables) {
        const Evidence ev{{ev_var.id, s}};
        CHECK(max_abs_diff(posterior_ve(net, ev, q.id).probs,
                           posterior_by_enumeration(net, ev, q.id).probs) <
              1e-12);
      }
    }
  }
  for (const auto& q : net.variables) {
    CHECK(max_abs_diff(posterior_ve(net, {}, q.id).probs,
                       posterior_by_enumeration(net, {}, q.id).probs) < 1e-12);
  }
}

TEST_CASE("evidenced query gets a degenerate posterior") {
  const auto net = fixtures::three_node_example();
  const auto post = posterior_ve(net, {{"X1", 2}, {"X3", 0}}, "X1");
  CHECK(post.probs == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(posterior_by_enumeration(net, {{"X1", 2}}, "X1").probs ==
        std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("impossible evidence is an error in both engines") {
  auto net = fixtures::three_node_example();
  net.cpts[1].rows = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};  // X2 never x2_1
  const Evidence ev{{"X2", 0}};
  CHECK_THROWS_AS(posterior_ve(net, ev, "X1"), ImpossibleEvidence);
  CHECK_THROWS_AS(posterior_by_enumeration(net, ev, "X1"), ImpossibleEvidence);
  CHECK_THROWS_AS(posterior_ve(net, ev, "X2"), ImpossibleEvidence);
  CHECK_THROWS_AS(posterior_by_enumeration(net, ev, "X2"), ImpossibleEvidence);
}

TEST_CASE("bad evidence and queries") {
  const auto net = fixtures::three_node_example();
  CHECK_THROWS_AS(posterior_ve(net, {{"X9", 0}}, "X1"), UnknownVariable);
  CHECK_THROWS_AS(posterior_ve(net, {{"X2", 2}}, "X1"), BadState);
  CHECK_THROWS_AS(posterior_ve(net, {}, "X9"), UnknownVariable);
}

TEST_CASE("enumeration refuses large networks") {
  const auto big = testing::random_network(25, 3, 0.1);
  CHECK_THROWS_AS(posterior_by_enumeration(big, {}, "V0"), InvalidArgument);
  // Variable elimination has no such limit.
  const auto post = posterior_ve(big, {{"V24", 1}}, "V0");
  double sum = 0.0;
  for (double p : post.probs) sum += p;
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("random 8-node binary networks: VE equals enumeration") {
  Substream rng(77);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto net = testing::random_network(8, seed, 0.35);
    const auto ev = random_evidence(net, rng);
    for (const auto& q : net.variables) {
      const auto ve = posterior_ve(net, ev, q.id);
      const auto en = posterior_by_enumeration(net, ev, q.id);
      worst = std::max(worst, max_abs_diff(ve.probs, en.probs));
      double sum = 0.0;
      for (double p : ve.probs) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("multi-state random networks: VE equals enumeration") {
  Substream rng(78);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto net = testing::random_network(7, seed * 13, 0.4, 4);
    const auto ev = random_evidence(net, rng);
    for (const auto& q : net.variables) {
      CHECK(max_abs_diff(posterior_ve(net, ev, q.id).probs,
                         posterior_by_enumeration(net, ev, q.id).probs) < 1e-9);
    }
  }
}

TEST_CASE("conditioning consistency against joint sums") {
  const auto net = testing::random_network(6, 555, 0.5);
  const Evidence ev{{"V1", 1}, {"V4", 0}};
  const std::size_t q = 5;
  std::vector<double> joint_q(2, 0.0);
  double joint_ev = 0.0;
  testing::for_each_assignment(net, [&](const auto& states, double p) {
    if (states[1] != 1 || states[4] != 0) return;
    joint_ev += p;
    joint_q[states[q]] += p;
  });
  const auto post = posterior_ve(net, ev, "V5");
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(std::abs(post.probs[s] - joint_q[s] / joint_ev) < 1e-9);
  }
}

TEST_CASE("posteriors_ve answers several queries") {
  const auto net = fixtures::profiling_example();
  const std::vector<std::string> queries{"off_gender", "off_knew_victim"};
  const Evidence ev{{"cs_sexual_assault", 1}};
  const auto posts = posteriors_ve(net, ev, queries);
  REQUIRE(posts.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(posts[i].variable_id == queries[i]);
    CHECK(posts[i].probs == posterior_ve(net, ev, queries[i]).probs);
  }
}

TEST_CASE("predict") {
  CHECK(predict({"X2", {0.2, 0.8}}) == Prediction{"X2", 1, 0.8});
  CHECK(predict({"X", {0.5, 0.5}}) == Prediction{"X", 0, 0.5});
  CHECK(predict({"X", {1.0, 0.0}}) == Prediction{"X", 0, 1.0});
  CHECK_THROWS_AS(predict({"X", {}}), InvalidArgument);

  // Rescaling an unnormalized vector and renormalizing keeps the argmax.
  Substream rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> raw(2 + rng.below(4));
    for (auto& x : raw) x = rng.uniform();
    const double scale = 0.001 + 1000.0 * rng.uniform();
    std::vector<double> a = raw;
    std::vector<double> b = raw;
    double sa = 0.0;
    double sb = 0.0;
    for (auto& x : b) x *= scale;
    for (double x : a) sa += x;
    for (double x : b) sb += x;
    for (auto& x : a) x /= sa;
    for (auto& x : b) x /= sb;
    CHECK(predict({"X", a}).predicted_state == predict({"X", b}).predicted_state);
  }
}
