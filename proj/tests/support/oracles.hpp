#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's inference code: probabilities are rebuilt from node parameters in
// linear space and marginals come from explicit enumeration.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <variant>
#include <vector>

#include "xspn/network.hpp"
#include "xspn/random.hpp"

namespace oracle {

using xspn::VariableId;

/// All 2^n assignments of n variables, variable j = bit j of the index.
inline std::vector<std::uint8_t> assignment(std::uint64_t index, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<std::uint8_t>((index >> j) & 1u);
  return x;
}

/// C(n, k) from Pascal's rule in exact integers.
inline std::uint64_t pascal(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::vector<std::uint64_t> row(n + 1, 0);
  row[0] = 1;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i; j > 0; --j) row[j] += row[j - 1];
  return row[k];
}

inline double leaf_prob(const xspn::LeafDistribution& leaf, const std::vector<std::uint8_t>& x) {
  if (const auto* b = std::get_if<xspn::BernoulliLeaf>(&leaf)) return x[b->variable()] ? b->p_one() : 1.0 - b->p_one();
  if (const auto* f = std::get_if<xspn::FactorizedLeaf>(&leaf)) {
    double p = 1.0;
    for (const auto& b : f->factors()) p *= x[b.variable()] ? b.p_one() : 1.0 - b.p_one();
    return p;
  }
  if (const auto* e = std::get_if<xspn::ExchangeableLeaf>(&leaf)) {
    std::size_t t = 0;
    for (VariableId v : e->scope().variables()) t += x[v];
    return e->weights()[t];
  }
  const auto& c = std::get<xspn::ChowLiuLeaf>(leaf);
  const auto vars = c.scope().variables();
  double p = 1.0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const int pa = c.parent()[i];
    const int a = pa < 0 ? 0 : x[vars[static_cast<std::size_t>(pa)]];
    p *= c.cpt()[i][static_cast<std::size_t>(a)][x[vars[i]]];
  }
  return p;
}

/// P(x) by plain recursion over the DAG.
inline double prob(const xspn::Network& net, xspn::NodeId id, const std::vector<std::uint8_t>& x) {
  const xspn::Node& node = net.node(id);
  if (const auto* s = std::get_if<xspn::SumNode>(&node.body)) {
    double p = 0.0;
    for (std::size_t i = 0; i < s->children.size(); ++i) p += s->weights[i] * prob(net, s->children[i], x);
    return p;
  }
  if (const auto* pr = std::get_if<xspn::ProductNode>(&node.body)) {
    double p = 1.0;
    for (auto c : pr->children) p *= prob(net, c, x);
    return p;
  }
  return leaf_prob(std::get<xspn::LeafNode>(node.body).distribution, x);
}

inline double prob(const xspn::Network& net, const std::vector<std::uint8_t>& x) { return prob(net, net.root(), x); }

/// Sum of P(x) over completions of the evidence (negative = unobserved).
inline double marginal(const xspn::Network& net, const std::vector<std::int8_t>& evidence) {
  const std::size_t n = net.variable_count();
  double total = 0.0;
  for (std::uint64_t i = 0; i < (1ULL << n); ++i) {
    const auto x = assignment(i, n);
    bool consistent = true;
    for (std::size_t j = 0; j < n && consistent; ++j)
      if (evidence[j] >= 0 && evidence[j] != x[j]) consistent = false;
    if (consistent) total += prob(net, x);
  }
  return total;
}

// ------------------------------------------------------------ random networks

class NetworkFactory {
 public:
  explicit NetworkFactory(std::uint64_t seed) : rng_(seed) {}

  xspn::Network make(std::size_t n, std::size_t max_depth = 4) {
    nodes_.clear();
    std::vector<VariableId> vars(n);
    std::iota(vars.begin(), vars.end(), VariableId{0});
    const auto root = build(vars, max_depth);
    return xspn::Network(std::move(nodes_), root, n);
  }

 private:
  double unit() { return 0.02 + 0.96 * rng_.uniform(); }

  std::vector<double> simplex(std::size_t k) {
    std::vector<double> w(k);
    double s = 0.0;
    for (double& v : w) s += v = unit();
    for (double& v : w) v /= s;
    return w;
  }

  xspn::NodeId push(xspn::Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<xspn::NodeId>(nodes_.size() - 1);
  }

  xspn::LeafDistribution leaf(const std::vector<VariableId>& vars) {
    if (vars.size() == 1) return xspn::BernoulliLeaf(vars[0], unit());
    switch (rng_.below(3)) {
      case 0: {
        std::vector<xspn::BernoulliLeaf> f;
        for (auto v : vars) f.emplace_back(v, unit());
        return xspn::FactorizedLeaf(std::move(f));
      }
      case 1: {
        const std::size_t n = vars.size();
        auto q = simplex(n + 1);
        std::vector<double> w(n + 1);
        for (std::size_t t = 0; t <= n; ++t) w[t] = q[t] / static_cast<double>(pascal(n, t));
        return xspn::ExchangeableLeaf(xspn::Scope(vars), std::move(w));
      }
      default: {
        // Random tree: each local variable i > 0 hangs below a random earlier one.
        const std::size_t n = vars.size();
        std::vector<int> parent(n, -1);
        std::vector<xspn::ChowLiuLeaf::Table> cpt(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (i > 0) parent[i] = static_cast<int>(rng_.below(i));
          const double p0 = unit(), p1 = i > 0 ? unit() : p0;
          cpt[i] = {{{1.0 - p0, p0}, {1.0 - p1, p1}}};
        }
        return xspn::ChowLiuLeaf(xspn::Scope(vars), std::move(parent), std::move(cpt));
      }
    }
  }

  xspn::NodeId build(std::vector<VariableId> vars, std::size_t depth) {
    const auto choice = depth == 0 ? 2 : rng_.below(vars.size() == 1 ? 2 : 3);
    if (choice == 0) {  // sum
      const std::size_t k = 2 + rng_.below(2);
      xspn::SumNode s;
      s.weights = simplex(k);
      for (std::size_t i = 0; i < k; ++i) s.children.push_back(build(vars, depth - 1));
      return push({xspn::Scope(vars), std::move(s)});
    }
    if (choice == 2 || vars.size() == 1) {
      auto l = leaf(vars);
      return push({xspn::Scope(vars), xspn::LeafNode{std::move(l)}});
    }
    // product: shuffle, cut into 2 or 3 non-empty parts
    for (std::size_t i = vars.size() - 1; i > 0; --i) std::swap(vars[i], vars[rng_.below(i + 1)]);
    const std::size_t parts = std::min<std::size_t>(vars.size(), 2 + rng_.below(2));
    std::vector<std::size_t> cuts{0};
    for (std::size_t p = 1; p < parts; ++p) cuts.push_back(p);  // ensure non-empty
    for (std::size_t p = 1; p < parts; ++p) cuts[p] = std::max(cuts[p], cuts[p - 1] + 1);
    std::size_t spare = vars.size() - parts;
    for (std::size_t p = 1; p < parts; ++p) {
      const std::size_t extra = rng_.below(spare + 1);
      for (std::size_t q = p; q < parts; ++q) cuts[q] += extra;
      spare -= extra;
    }
    cuts.push_back(vars.size());
    xspn::ProductNode pr;
    for (std::size_t p = 0; p < parts; ++p)
      pr.children.push_back(build({vars.begin() + static_cast<std::ptrdiff_t>(cuts[p]),
                                   vars.begin() + static_cast<std::ptrdiff_t>(cuts[p + 1])},
                                  depth - 1));
    return push({xspn::Scope(vars), std::move(pr)});
  }

  xspn::Xoshiro256 rng_;
  std::vector<xspn::Node> nodes_;
};

}  // namespace oracle
