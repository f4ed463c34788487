#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xspn {

using VariableId = std::uint32_t;
using NodeId = std::uint32_t;

/// Ascending, duplicate-free, non-empty set of variables.
class Scope {
 public:
  Scope() = default;
  /// Sorts `variables`; throws InputError when empty or when an id repeats.
  explicit Scope(std::vector<VariableId> variables);

  /// {0, 1, ..., count-1}
  static Scope range(std::size_t count);

  std::span<const VariableId> variables() const noexcept { return vars_; }
  std::size_t size() const noexcept { return vars_.size(); }
  bool empty() const noexcept { return vars_.empty(); }
  VariableId operator[](std::size_t i) const { return vars_[i]; }
  auto begin() const noexcept { return vars_.begin(); }
  auto end() const noexcept { return vars_.end(); }

  bool contains(VariableId v) const noexcept;
  /// Largest id plus one, 0 for an empty scope.
  std::size_t extent() const noexcept { return vars_.empty() ? 0 : vars_.back() + 1; }

  friend bool operator==(const Scope&, const Scope&) = default;

 private:
  std::vector<VariableId> vars_;
};

bool disjoint(const Scope& a, const Scope& b) noexcept;

/// Per-variable observation: 0, 1 or unobserved.
class PartialEvidence {
 public:
  static constexpr std::int8_t kUnobserved = -1;

  PartialEvidence() = default;
  /// `count` variables, all unobserved.
  explicit PartialEvidence(std::size_t count) : values_(count, kUnobserved) {}

  /// Every variable observed; throws InputError on values other than 0/1.
  static PartialEvidence full(std::span<const std::uint8_t> assignment);

  std::size_t size() const noexcept { return values_.size(); }
  std::int8_t operator[](VariableId v) const { return values_[v]; }
  bool observed(VariableId v) const { return values_[v] != kUnobserved; }

  void observe(VariableId v, std::uint8_t value);
  void forget(VariableId v) { values_.at(v) = kUnobserved; }

  std::span<const std::int8_t> values() const noexcept { return values_; }

 private:
  std::vector<std::int8_t> values_;
};

}  // namespace xspn
