#include "xspn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "xspn/error.hpp"
#include "xspn/logmath.hpp"

namespace xspn {

std::span<const NodeId> children_of(const Node& node) noexcept {
  if (const auto* s = std::get_if<SumNode>(&node.body)) return s->children;
  if (const auto* p = std::get_if<ProductNode>(&node.body)) return p->children;
  return {};
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::dangling_child: return "dangling_child";
    case ViolationKind::cycle: return "cycle";
    case ViolationKind::unreachable: return "unreachable";
    case ViolationKind::too_few_children: return "too_few_children";
    case ViolationKind::weight_count: return "weight_count";
    case ViolationKind::non_positive_weight: return "non_positive_weight";
    case ViolationKind::weight_normalization: return "weight_normalization";
    case ViolationKind::completeness: return "completeness";
    case ViolationKind::decomposability: return "decomposability";
    case ViolationKind::leaf_scope: return "leaf_scope";
    case ViolationKind::root_scope: return "root_scope";
  }
  return "unknown";
}

Network::Network(std::vector<Node> nodes, NodeId root, std::size_t variable_count)
    : nodes_(std::move(nodes)), root_(root), variable_count_(variable_count) {
  if (root_ >= nodes_.size()) return;
  // Iterative DFS; post-order puts children before parents.
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> colour(nodes_.size(), white);
  std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
  colour[root_] = grey;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    auto kids = children_of(nodes_[id]);
    if (next < kids.size()) {
      const NodeId c = kids[next++];
      if (c >= nodes_.size()) {
        dangling_ = true;
      } else if (colour[c] == grey) {
        cyclic_nodes_.push_back(id);
      } else if (colour[c] == white) {
        colour[c] = grey;
        stack.emplace_back(c, 0);
      }
      continue;
    }
    colour[id] = black;
    order_.push_back(id);
    stack.pop_back();
  }
}

std::vector<Violation> Network::validate() const {
  std::vector<Violation> out;
  auto report = [&](NodeId id, ViolationKind kind, std::string detail) {
    out.push_back({id, kind, std::move(detail)});
  };

  if (root_ >= nodes_.size()) {
    report(root_, ViolationKind::dangling_child, "root id " + std::to_string(root_) + " does not exist");
    return out;
  }
  for (NodeId id : cyclic_nodes_) report(id, ViolationKind::cycle, "node lies on a directed cycle");

  std::vector<bool> reachable(nodes_.size(), false);
  for (NodeId id : order_) reachable[id] = true;

  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (!reachable[id]) report(id, ViolationKind::unreachable, "node is not reachable from the root");

    auto kids = children_of(n);
    bool children_ok = true;
    for (NodeId c : kids)
      if (c >= nodes_.size()) {
        report(id, ViolationKind::dangling_child, "child id " + std::to_string(c) + " does not exist");
        children_ok = false;
      }

    if (const auto* sum = std::get_if<SumNode>(&n.body)) {
      if (kids.size() < 2) report(id, ViolationKind::too_few_children, "sum node has fewer than 2 children");
      if (sum->weights.size() != kids.size()) {
        report(id, ViolationKind::weight_count, "sum node weight count differs from child count");
      } else {
        double total = 0.0;
        for (double w : sum->weights) {
          if (!(w > 0.0) || !std::isfinite(w))
            report(id, ViolationKind::non_positive_weight, "sum weight " + std::to_string(w) + " is not positive");
          total += w;
        }
        if (!(std::abs(total - 1.0) <= kWeightTolerance))
          report(id, ViolationKind::weight_normalization, "sum weights total " + std::to_string(total));
      }
      if (children_ok)
        for (NodeId c : kids)
          if (!(nodes_[c].scope == n.scope))
            report(id, ViolationKind::completeness, "child " + std::to_string(c) + " has a different scope");
    } else if (std::get_if<ProductNode>(&n.body)) {
      if (kids.size() < 2) report(id, ViolationKind::too_few_children, "product node has fewer than 2 children");
      if (children_ok) {
        bool overlap = false;
        for (std::size_t i = 0; i < kids.size() && !overlap; ++i)
          for (std::size_t j = i + 1; j < kids.size() && !overlap; ++j)
            overlap = !disjoint(nodes_[kids[i]].scope, nodes_[kids[j]].scope);
        if (overlap) report(id, ViolationKind::decomposability, "child scopes overlap");
        std::vector<VariableId> uni;
        for (NodeId c : kids) {
          auto v = nodes_[c].scope.variables();
          uni.insert(uni.end(), v.begin(), v.end());
        }
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        if (!std::equal(uni.begin(), uni.end(), n.scope.begin(), n.scope.end()))
          report(id, ViolationKind::decomposability, "union of child scopes differs from the node scope");
      }
    } else {
      const auto& leaf = std::get<LeafNode>(n.body);
      if (!(leaf_scope(leaf.distribution) == n.scope))
        report(id, ViolationKind::leaf_scope, "leaf distribution scope differs from the node scope");
    }
  }

  if (!(nodes_[root_].scope == Scope::range(variable_count_ == 0 ? 1 : variable_count_)) || variable_count_ == 0)
    report(root_, ViolationKind::root_scope, "root scope must be {0.." + std::to_string(variable_count_) + "-1}");
  return out;
}

void Network::require_evaluable() const {
  if (root_ >= nodes_.size()) throw InputError("network root does not exist");
  if (dangling_) throw InputError("network references a node id that does not exist");
  if (!cyclic_nodes_.empty()) throw InputError("network contains a cycle");
}

double Network::log_evaluate(std::span<const std::uint8_t> x, EvalCounter* counter) const {
  if (x.size() < variable_count_)
    throw InputError("assignment covers " + std::to_string(x.size()) + " of " + std::to_string(variable_count_) +
                     " variables");
  std::vector<std::int8_t> values(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1) throw InputError("assignment value for variable " + std::to_string(i) + " is not binary");
    values[i] = static_cast<std::int8_t>(x[i]);
  }
  return log_marginal(std::span<const std::int8_t>(values), counter);
}

double Network::log_marginal(const PartialEvidence& e, EvalCounter* counter) const {
  return log_marginal(e.values(), counter);
}

double Network::log_marginal(std::span<const std::int8_t> values, EvalCounter* counter) const {
  require_evaluable();
  std::vector<double> value(nodes_.size(), 0.0);
  std::vector<double> terms;
  for (NodeId id : order_) {
    const Node& n = nodes_[id];
    if (const auto* sum = std::get_if<SumNode>(&n.body)) {
      terms.clear();
      for (std::size_t i = 0; i < sum->children.size(); ++i)
        terms.push_back(safe_log(sum->weights[i]) + value[sum->children[i]]);
      value[id] = log_sum_exp(terms);
    } else if (const auto* prod = std::get_if<ProductNode>(&n.body)) {
      double acc = 0.0;
      for (NodeId c : prod->children) acc += value[c];
      value[id] = acc;
    } else {
      value[id] = leaf_log_marginal(std::get<LeafNode>(n.body).distribution, values);
    }
  }
  if (counter) counter->node_visits += order_.size();
  return value[root_];
}

std::size_t Network::depth() const {
  require_evaluable();
  std::vector<std::size_t> d(nodes_.size(), 0);
  for (NodeId id : order_)
    for (NodeId c : children_of(nodes_[id])) d[id] = std::max(d[id], d[c] + 1);
  return d[root_];
}

bool structurally_equal(const Network& a, const Network& b) {
  if (a.variable_count() != b.variable_count()) return false;
  if (a.root() >= a.size() || b.root() >= b.size()) return false;
  std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
  std::size_t steps = 0;
  const std::size_t limit = (a.size() + 1) * (b.size() + 1);
  while (!stack.empty()) {
    if (++steps > limit) return false;  // cyclic input
    auto [x, y] = stack.back();
    stack.pop_back();
    const Node& nx = a.node(x);
    const Node& ny = b.node(y);
    if (nx.body.index() != ny.body.index() || !(nx.scope == ny.scope)) return false;
    if (const auto* lx = std::get_if<LeafNode>(&nx.body)) {
      if (leaf_kind(lx->distribution) != leaf_kind(std::get<LeafNode>(ny.body).distribution)) return false;
      continue;
    }
    auto cx = children_of(nx);
    auto cy = children_of(ny);
    if (cx.size() != cy.size()) return false;
    for (std::size_t i = 0; i < cx.size(); ++i) {
      if (cx[i] >= a.size() || cy[i] >= b.size()) return false;
      stack.emplace_back(cx[i], cy[i]);
    }
  }
  return true;
}

}  // namespace xspn
