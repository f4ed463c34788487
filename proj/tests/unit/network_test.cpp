#include <doctest.h>

#include <cmath>
#include <string>

#include "helpers.hpp"
#include "oracles.hpp"
#include "xspn/error.hpp"
#include "xspn/model_io.hpp"
#include "xspn/network.hpp"

using namespace xspn;

namespace {

Node bernoulli(VariableId v, double p) { return {Scope({v}), LeafNode{BernoulliLeaf(v, p)}}; }

bool has(const std::vector<Violation>& vs, ViolationKind kind, NodeId node) {
  for (const auto& v : vs)
    if (v.kind == kind && v.node == node) return true;
  return false;
}

}  // namespace

TEST_CASE("validate") {
  const Network single({bernoulli(0, 0.3)}, 0, 1);
  CHECK(single.validate().empty());

  const Network overlap({{Scope({0}), ProductNode{{1, 2}}}, bernoulli(0, 0.3), bernoulli(0, 0.6)}, 0, 1);
  CHECK(has(overlap.validate(), ViolationKind::decomposability, 0));

  const Network heavy({{Scope({0}), SumNode{{1, 2}, {0.6, 0.6}}}, bernoulli(0, 0.3), bernoulli(0, 0.6)}, 0, 1);
  CHECK(has(heavy.validate(), ViolationKind::weight_normalization, 0));

  const Network incomplete({{Scope({0, 1}), SumNode{{1, 2}, {0.5, 0.5}}}, bernoulli(0, 0.3), bernoulli(1, 0.6)}, 0, 2);
  CHECK(has(incomplete.validate(), ViolationKind::completeness, 0));

  const Network dangling({{Scope({0}), SumNode{{1, 7}, {0.5, 0.5}}}, bernoulli(0, 0.3)}, 0, 1);
  CHECK(has(dangling.validate(), ViolationKind::dangling_child, 0));

  const Network cyclic({{Scope({0}), SumNode{{1, 2}, {0.5, 0.5}}}, {Scope({0}), SumNode{{0, 2}, {0.5, 0.5}}},
                        bernoulli(0, 0.4)},
                       0, 1);
  const auto vs = cyclic.validate();
  bool cycle = false;
  for (const auto& v : vs) cycle = cycle || v.kind == ViolationKind::cycle;
  CHECK(cycle);
  const std::vector<std::uint8_t> x{1};
  CHECK_THROWS_AS(cyclic.log_evaluate(x), InputError);

  const Network orphan({bernoulli(0, 0.3), bernoulli(0, 0.5)}, 0, 1);
  CHECK(has(orphan.validate(), ViolationKind::unreachable, 1));
}

TEST_CASE("log_evaluate hand cases") {
  const Network uniform({{Scope({0, 1}), LeafNode{ExchangeableLeaf(Scope({0, 1}), {0.25, 0.25, 0.25})}}}, 0, 2);
  const std::vector<std::uint8_t> x01{0, 1};
  CHECK(uniform.log_evaluate(x01) == doctest::Approx(std::log(0.25)).epsilon(1e-15));

  const Network mix({{Scope({0}), SumNode{{1, 2}, {0.5, 0.5}}}, bernoulli(0, 0.2), bernoulli(0, 0.6)}, 0, 1);
  const std::vector<std::uint8_t> one{1};
  CHECK(mix.log_evaluate(one) == doctest::Approx(std::log(0.4)).epsilon(1e-15));

  const std::vector<std::uint8_t> shorter{1};
  CHECK_THROWS_AS(uniform.log_evaluate(shorter), InputError);

  // Zero-probability children: log-sum-exp over all -inf stays -inf.
  const Network dead({{Scope({0, 1}), SumNode{{1, 2}, {0.5, 0.5}}},
                      {Scope({0, 1}), LeafNode{ExchangeableLeaf(Scope({0, 1}), {1.0, 0.0, 0.0})}},
                      {Scope({0, 1}), LeafNode{ExchangeableLeaf(Scope({0, 1}), {0.0, 0.0, 1.0})}}},
                     0, 2);
  CHECK(dead.log_evaluate(x01) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("random networks against the linear-space oracle") {
  oracle::NetworkFactory factory(2024);
  Xoshiro256 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const Network net = factory.make(n);
    REQUIRE(net.validate().empty());

    double total = 0.0;
    for (std::uint64_t i = 0; i < (1ULL << n); ++i) {
      const auto x = oracle::assignment(i, n);
      const double lp = net.log_evaluate(x);
      CHECK(lp == doctest::Approx(std::log(oracle::prob(net, x))).epsilon(1e-9));
      total += std::exp(lp);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<std::int8_t> e(n, -1);
    CHECK(net.log_marginal(e) == doctest::Approx(0.0).epsilon(1e-12));
    double previous = net.log_marginal(e);
    // Observing variables one at a time never increases the marginal.
    const auto x = oracle::assignment(rng.below(1ULL << n), n);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = static_cast<std::int8_t>(x[j]);
      const double now = net.log_marginal(e);
      CHECK(now == doctest::Approx(std::log(oracle::marginal(net, e))).epsilon(1e-9));
      CHECK(now <= previous + 1e-12);
      previous = now;
    }
    CHECK(previous == doctest::Approx(net.log_evaluate(x)).epsilon(1e-12));

    EvalCounter counter;
    net.log_evaluate(x, &counter);
    CHECK(counter.node_visits == net.evaluation_order().size());
  }
}

TEST_CASE("model text round trip is exact") {
  oracle::NetworkFactory factory(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Network net = factory.make(8);
    const Network back = parse_model_text(to_model_text(net));
    CHECK(structurally_equal(net, back));
    CHECK(to_model_text(back) == to_model_text(net));
    for (std::uint64_t i = 0; i < 256; i += 7) {
      const auto x = oracle::assignment(i, 8);
      CHECK(back.log_evaluate(x) == net.log_evaluate(x));
    }
  }
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("model schema errors name the field") {
  const Network net({{Scope({0}), SumNode{{1, 2}, {0.25, 0.75}}}, bernoulli(0, 0.2), bernoulli(0, 0.6)}, 0, 1);
  std::string text = to_model_text(net);

  auto message = [](const std::string& t) {
    try {
      parse_model_text(t);
    } catch (const SchemaError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("not json").starts_with("$:"));
  CHECK(message("{\"format\": \"other\"}").starts_with("$.format"));

  std::string broken = text;
  broken.replace(broken.find("\"weights\""), 9, "\"weightz\"");
  CHECK(message(broken).starts_with("$.nodes[0].weights"));

  broken = text;
  broken.replace(broken.find("\"bernoulli\""), 11, "\"gaussian\"");
  CHECK(message(broken).starts_with("$.nodes[1].leaf_kind"));
}
