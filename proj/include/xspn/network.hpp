#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xspn/leaves.hpp"
#include "xspn/scope.hpp"

namespace xspn {

struct SumNode {
  std::vector<NodeId> children;
  std::vector<double> weights;  // linear space, same order as children
};

struct ProductNode {
  std::vector<NodeId> children;
};

struct LeafNode {
  LeafDistribution distribution;
};

struct Node {
  Scope scope;
  std::variant<SumNode, ProductNode, LeafNode> body;
};

std::span<const NodeId> children_of(const Node& node) noexcept;

enum class ViolationKind {
  dangling_child,
  cycle,
  unreachable,
  too_few_children,
  weight_count,
  non_positive_weight,
  weight_normalization,
  completeness,
  decomposability,
  leaf_scope,
  root_scope,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  NodeId node;
  ViolationKind kind;
  std::string detail;
};

/// Counts node visits of one evaluation pass.
struct EvalCounter {
  std::size_t node_visits = 0;
};

/// Rooted DAG of sum, product and leaf nodes stored by index. Immutable once
/// built; evaluation is const and safe to call from many threads.
class Network {
 public:
  static constexpr double kWeightTolerance = 1e-9;

  /// Does not validate; call `validate()` for structural checks. Evaluation
  /// throws InputError if the graph has a dangling child id or a cycle.
  Network(std::vector<Node> nodes, NodeId root, std::size_t variable_count);

  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  NodeId root() const noexcept { return root_; }
  std::size_t variable_count() const noexcept { return variable_count_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Every violated structural invariant; empty iff the network is valid.
  std::vector<Violation> validate() const;

  /// ln P(x) for a full assignment over variables 0..variable_count-1.
  double log_evaluate(std::span<const std::uint8_t> x, EvalCounter* counter = nullptr) const;
  /// ln P(e), summing out unobserved variables inside the leaves.
  double log_marginal(const PartialEvidence& e, EvalCounter* counter = nullptr) const;
  /// Same as log_marginal on raw evidence values (negative = unobserved).
  double log_marginal(std::span<const std::int8_t> values, EvalCounter* counter = nullptr) const;

  /// Nodes in an order where children precede parents (reachable nodes only).
  std::span<const NodeId> evaluation_order() const noexcept { return order_; }

  /// Longest root-to-leaf path length in edges.
  std::size_t depth() const;

 private:
  void require_evaluable() const;

  std::vector<Node> nodes_;
  NodeId root_;
  std::size_t variable_count_;
  std::vector<NodeId> order_;
  std::vector<NodeId> cyclic_nodes_;
  bool dangling_ = false;
};

/// Same node kinds, scopes, leaf kinds and child arrangement, visited from the
/// roots. Parameters are not compared.
bool structurally_equal(const Network& a, const Network& b);

}  // namespace xspn
