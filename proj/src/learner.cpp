#include "xspn/learner.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <optional>
#include <string>

#include "xspn/cluster.hpp"
#include "xspn/error.hpp"
#include "xspn/random.hpp"

namespace xspn {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::spn: return "SPN";
    case Variant::spn_clt: return "SPN_CLT";
    case Variant::xspn_t: return "XSPN_T";
    case Variant::xspn_tf: return "XSPN_TF";
  }
  return "?";
}

namespace {

std::string normalize_token(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return s;
}

}  // namespace

Variant parse_variant(std::string_view text) {
  const std::string s = normalize_token(text);
  if (s == "SPN") return Variant::spn;
  if (s == "SPN_CLT") return Variant::spn_clt;
  if (s == "XSPN_T") return Variant::xspn_t;
  if (s == "XSPN_TF") return Variant::xspn_tf;
  throw InputError("unknown variant '" + std::string(text) + "'");
}

std::string_view to_string(ExchangeabilityTest t) noexcept {
  return t == ExchangeabilityTest::pairwise ? "pairwise" : "full";
}

ExchangeabilityTest parse_exchangeability_test(std::string_view text) {
  const std::string s = normalize_token(text);
  if (s == "PAIRWISE") return ExchangeabilityTest::pairwise;
  if (s == "FULL") return ExchangeabilityTest::full;
  throw InputError("unknown exchangeability test '" + std::string(text) + "'");
}

void Hyperparams::validate() const {
  if (!(rho > 0.0)) throw InputError("rho must be positive");
  if (min_instances < 1) throw InputError("min_instances must be at least 1");
  if (!(exch_significance > 0.0 && exch_significance < 1.0)) throw InputError("p must lie in (0, 1)");
  if (!(alpha >= 0.0)) throw InputError("alpha must be non-negative");
  if (max_children < 2) throw InputError("max_children must be at least 2");
  if (exch_test_max_rows < 2) throw InputError("exch_test_max_rows must be at least 2");
}

namespace {

class Learner {
 public:
  Learner(const BinaryDataset& data, const Hyperparams& hp, LearnStats& stats) : data_(data), hp_(hp), stats_(stats) {}

  Network run(std::span<const std::size_t> rows) {
    std::vector<VariableId> vars(data_.cols());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = static_cast<VariableId>(i);
    const NodeId root = learn(std::vector<std::size_t>(rows.begin(), rows.end()), vars, hp_.seed, 0);
    return Network(std::move(nodes_), root, data_.cols());
  }

 private:
  NodeId reserve(const std::vector<VariableId>& vars) {
    nodes_.push_back(Node{Scope(vars), ProductNode{}});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId add_leaf(const std::vector<VariableId>& vars, LeafDistribution leaf) {
    nodes_.push_back(Node{Scope(vars), LeafNode{std::move(leaf)}});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId fallback_leaf(const std::vector<std::size_t>& rows, const std::vector<VariableId>& vars) {
    const Scope scope(vars);
    switch (hp_.variant) {
      case Variant::spn:
      case Variant::xspn_t:
        return add_leaf(vars, FactorizedLeaf::fit(data_, rows, scope, hp_.alpha));
      case Variant::spn_clt:
        if (vars.size() == 1) return add_leaf(vars, FactorizedLeaf::fit(data_, rows, scope, hp_.alpha));
        return add_leaf(vars, ChowLiuLeaf::fit(data_, rows, scope, hp_.alpha));
      case Variant::xspn_tf:
        if (vars.size() == 1) return add_leaf(vars, BernoulliLeaf::fit(data_, rows, vars[0], hp_.alpha));
        return add_leaf(vars, ExchangeableLeaf::fit(data_, rows, scope, hp_.alpha));
    }
    throw InputError("unknown variant");
  }

  bool exchangeable(const std::vector<std::size_t>& rows, const std::vector<VariableId>& vars, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> sample;
    std::span<const std::size_t> test_rows = rows;
    if (rows.size() > hp_.exch_test_max_rows) {
      sample = rows;
      Xoshiro256 rng(seed);
      for (std::size_t i = 0; i < hp_.exch_test_max_rows; ++i)
        std::swap(sample[i], sample[i + rng.below(sample.size() - i)]);
      sample.resize(hp_.exch_test_max_rows);
      std::sort(sample.begin(), sample.end());
      test_rows = sample;
    }
    bool verdict;
    if (hp_.exch_test == ExchangeabilityTest::full)
      verdict = chi2_exchangeability_full(data_, test_rows, vars, hp_.exch_significance, hp_.full_test_max_vars)
                    .exchangeable;
    else
      verdict = chi2_exchangeability_pairwise(data_, test_rows, vars, hp_.exch_significance, hp_.pair_correction)
                    .exchangeable;
    ++stats_.exchangeability_tests;
    stats_.exchangeability_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return verdict;
  }

  // Product over `children` with at most max_children per node: the first
  // max_children - 1 children stay, the rest nest in a product node.
  NodeId fold_product(std::span<const NodeId> children) {
    if (children.size() == 1) return children.front();
    const std::size_t keep = children.size() <= hp_.max_children ? children.size() : hp_.max_children - 1;
    std::vector<NodeId> kids(children.begin(), children.begin() + static_cast<std::ptrdiff_t>(keep));
    if (keep < children.size()) kids.push_back(fold_product(children.subspan(keep)));
    std::vector<VariableId> vars;
    for (NodeId c : kids) {
      auto v = nodes_[c].scope.variables();
      vars.insert(vars.end(), v.begin(), v.end());
    }
    nodes_.push_back(Node{Scope(std::move(vars)), ProductNode{std::move(kids)}});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId learn(std::vector<std::size_t> rows, const std::vector<VariableId>& vars, std::uint64_t seed,
               std::size_t depth) {
    if (depth > hp_.max_depth)
      throw CapacityError("structure learning exceeded the recursion depth limit of " +
                          std::to_string(hp_.max_depth));

    if (rows.size() < hp_.min_instances) {
      ++stats_.min_instance_leaves;
      return fallback_leaf(rows, vars);
    }
    if (vars.size() == 1) {
      ++stats_.univariate_leaves;
      return add_leaf(vars, BernoulliLeaf::fit(data_, rows, vars[0], hp_.alpha));
    }
    if (hp_.tests_exchangeability() && exchangeable(rows, vars, derive_seed(seed, 0x5EED))) {
      ++stats_.exchangeable_by_test;
      return add_leaf(vars, ExchangeableLeaf::fit(data_, rows, Scope(vars), hp_.alpha));
    }

    auto groups = split_variables(data_, rows, vars, hp_.rho, hp_.alpha);
    if (groups.size() >= 2) {
      ++stats_.product_splits;
      std::vector<NodeId> kids;
      for (std::size_t g = 0; g < groups.size(); ++g)
        kids.push_back(learn(rows, groups[g], derive_seed(seed, g + 1), depth + 1));
      return fold_product(kids);
    }

    const auto part = cluster_rows(data_, rows, vars, hp_.max_children, derive_seed(seed, 0));
    if (part.degenerate) {
      ++stats_.degenerate_fallbacks;
      return fallback_leaf(rows, vars);
    }
    ++stats_.sum_splits;
    auto members = part.members(rows);
    const double total = static_cast<double>(rows.size());
    rows.clear();
    rows.shrink_to_fit();
    const NodeId self = reserve(vars);
    SumNode sum;
    for (std::size_t c = 0; c < members.size(); ++c) {
      sum.weights.push_back(static_cast<double>(members[c].size()) / total);
      sum.children.push_back(learn(std::move(members[c]), vars, derive_seed(seed, c + 1), depth + 1));
    }
    nodes_[self].body = std::move(sum);
    return self;
  }

  const BinaryDataset& data_;
  const Hyperparams& hp_;
  LearnStats& stats_;
  std::vector<Node> nodes_;
};

}  // namespace

Network learn(const BinaryDataset& data, const Hyperparams& hp, LearnStats* stats) {
  const auto rows = all_rows(data.rows());
  return learn(data, rows, hp, stats);
}

Network learn(const BinaryDataset& data, std::span<const std::size_t> rows, const Hyperparams& hp,
              LearnStats* stats) {
  hp.validate();
  if (rows.empty()) throw InputError("cannot learn from an empty dataset");
  if (data.cols() == 0) throw InputError("cannot learn over an empty variable set");
  if (hp.tests_exchangeability() && hp.exch_test == ExchangeabilityTest::full &&
      data.cols() > hp.full_test_max_vars)
    throw CapacityError("full exchangeability test supports at most " + std::to_string(hp.full_test_max_vars) +
                        " variables; data has " + std::to_string(data.cols()));
  LearnStats local;
  Learner learner(data, hp, stats ? *stats : local);
  return learner.run(rows);
}

std::size_t count_parameters(const Network& network) {
  std::size_t total = 0;
  for (const Node& n : network.nodes()) {
    if (const auto* s = std::get_if<SumNode>(&n.body))
      total += s->weights.size();
    else if (const auto* l = std::get_if<LeafNode>(&n.body))
      total += leaf_parameter_count(l->distribution);
  }
  return total;
}

NetworkSummary summarize(const Network& network) {
  NetworkSummary s;
  s.nodes = network.size();
  for (const Node& n : network.nodes()) {
    if (std::holds_alternative<SumNode>(n.body)) {
      ++s.sums;
    } else if (std::holds_alternative<ProductNode>(n.body)) {
      ++s.products;
    } else {
      ++s.leaves;
      ++s.leaf_census[std::string(leaf_kind(std::get<LeafNode>(n.body).distribution))];
    }
  }
  s.parameters = count_parameters(network);
  s.depth = network.depth();
  return s;
}

}  // namespace xspn
