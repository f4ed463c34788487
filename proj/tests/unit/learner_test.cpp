#include <doctest.h>

#include <variant>

#include "helpers.hpp"
#include "xspn/datagen.hpp"
#include "xspn/error.hpp"
#include "xspn/learner.hpp"
#include "xspn/model_io.hpp"

using namespace xspn;

namespace {

const LeafDistribution* root_leaf(const Network& net) {
  const auto* leaf = std::get_if<LeafNode>(&net.node(net.root()).body);
  return leaf ? &leaf->distribution : nullptr;
}

// X0..X2 exchangeable and strongly coupled, X3 independent.
MevmSpec block_and_single() {
  MevmSpec spec;
  spec.n = 4;
  spec.mixture = {1.0};
  spec.components = {MevmComponent{{MevmBlock{{0, 1, 2}, {0.45, 0.05 / 3, 0.05 / 3, 0.45}}, MevmBlock{{3}, {0.3, 0.7}}}}};
  return spec;
}

}  // namespace

TEST_CASE("learner hand cases") {
  const auto one = testing::coin_flips(500, 1, 3, 0.3);
  const Network single = learn(one, Hyperparams{});
  REQUIRE(root_leaf(single));
  CHECK(std::holds_alternative<BernoulliLeaf>(*root_leaf(single)));
  CHECK(count_parameters(single) == 1);

  // Fewer rows than m: the fallback leaf fires before anything else.
  const auto few = testing::coin_flips(50, 5, 4);
  const Network small = learn(few, Hyperparams{});
  REQUIRE(root_leaf(small));
  CHECK(std::holds_alternative<ExchangeableLeaf>(*root_leaf(small)));

  const auto four = testing::coin_flips(50, 4, 4);
  CHECK(count_parameters(learn(four, Hyperparams{})) == 5);

  CHECK_THROWS_AS(learn(BinaryDataset(0, 3, {}), Hyperparams{}), InputError);
  Hyperparams bad;
  bad.exch_significance = 1.5;
  CHECK_THROWS_AS(learn(few, bad), InputError);
}

TEST_CASE("exchangeable block times an independent variable") {
  const auto data = generate_mevm(block_and_single(), 5000, 41);
  const Network net = learn(data, Hyperparams{});
  REQUIRE(net.validate().empty());
  const auto* prod = std::get_if<ProductNode>(&net.node(net.root()).body);
  REQUIRE(prod);
  REQUIRE(prod->children.size() == 2);
  const auto& a = std::get<LeafNode>(net.node(prod->children[0]).body).distribution;
  const auto& b = std::get<LeafNode>(net.node(prod->children[1]).body).distribution;
  CHECK(std::holds_alternative<ExchangeableLeaf>(a));
  CHECK(leaf_scope(a) == Scope({0, 1, 2}));
  CHECK(std::holds_alternative<BernoulliLeaf>(b));
  CHECK(leaf_scope(b) == Scope({3}));
  CHECK(count_parameters(net) == 5);
}

TEST_CASE("fully exchangeable data gives an exchangeable root") {
  const ConstraintSpec spec{ConstraintKind::exact, 10, 5, 0, 0};
  for (std::uint64_t seed : {1, 2, 3}) {
    const Network net = learn(generate_constraint(spec, 5000, seed), Hyperparams{});
    REQUIRE(root_leaf(net));
    CHECK(std::holds_alternative<ExchangeableLeaf>(*root_leaf(net)));
  }
}

TEST_CASE("variant leaf census") {
  const auto mevm = random_mevm(8, 3, 2, 5);
  const auto data = generate_mevm(mevm, 1500, 6);
  for (Variant v : {Variant::spn, Variant::spn_clt, Variant::xspn_t, Variant::xspn_tf}) {
    Hyperparams hp;
    hp.variant = v;
    hp.min_instances = 100;
    hp.seed = 12;
    LearnStats stats;
    const Network net = learn(data, hp, &stats);
    CHECK(net.validate().empty());
    const auto census = summarize(net).leaf_census;
    auto count = [&](const char* k) {
      auto it = census.find(k);
      return it == census.end() ? std::size_t{0} : it->second;
    };
    INFO("variant " << to_string(v));
    switch (v) {
      case Variant::spn:
        CHECK(count("exchangeable_counting") + count("chow_liu") == 0);
        CHECK(stats.exchangeability_tests == 0);
        break;
      case Variant::spn_clt:
        CHECK(count("exchangeable_counting") == 0);
        break;
      case Variant::xspn_t:
        CHECK(count("chow_liu") == 0);
        CHECK(count("exchangeable_counting") == stats.exchangeable_by_test);
        break;
      case Variant::xspn_tf:
        CHECK(count("factorized") + count("chow_liu") == 0);
        break;
    }
  }
}

TEST_CASE("learning is deterministic and honours the depth cap") {
  const auto data = generate_mevm(random_mevm(10, 2, 3, 9), 2000, 10);
  Hyperparams hp;
  hp.seed = 77;
  hp.min_instances = 50;
  const Network a = learn(data, hp);
  const Network b = learn(data, hp);
  CHECK(to_model_text(a) == to_model_text(b));

  hp.max_depth = 0;
  CHECK_THROWS_AS(learn(data, hp), CapacityError);

  Hyperparams full;
  full.exch_test = ExchangeabilityTest::full;
  CHECK_THROWS_AS(learn(data, full), CapacityError);
  CHECK(parse_variant("xspn-tf") == Variant::xspn_tf);
  CHECK(parse_variant("SPN_CLT") == Variant::spn_clt);
  CHECK_THROWS_AS(parse_variant("dspn"), InputError);
}
