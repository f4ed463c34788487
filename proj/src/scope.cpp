#include "xspn/scope.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "xspn/error.hpp"

namespace xspn {

Scope::Scope(std::vector<VariableId> variables) : vars_(std::move(variables)) {
  if (vars_.empty()) throw InputError("scope must not be empty");
  std::sort(vars_.begin(), vars_.end());
  if (std::adjacent_find(vars_.begin(), vars_.end()) != vars_.end())
    throw InputError("scope contains a duplicate variable");
}

Scope Scope::range(std::size_t count) {
  std::vector<VariableId> v(count);
  std::iota(v.begin(), v.end(), VariableId{0});
  return Scope(std::move(v));
}

bool Scope::contains(VariableId v) const noexcept {
  return std::binary_search(vars_.begin(), vars_.end(), v);
}

bool disjoint(const Scope& a, const Scope& b) noexcept {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return true;
}

PartialEvidence PartialEvidence::full(std::span<const std::uint8_t> assignment) {
  PartialEvidence e(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) e.observe(static_cast<VariableId>(i), assignment[i]);
  return e;
}

void PartialEvidence::observe(VariableId v, std::uint8_t value) {
  if (value > 1) throw InputError("evidence value for variable " + std::to_string(v) + " is not binary");
  values_.at(v) = static_cast<std::int8_t>(value);
}

}  // namespace xspn
