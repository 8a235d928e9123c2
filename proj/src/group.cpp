#include "nilkit/group.hpp"

#include <algorithm>

namespace nilkit {

namespace {

std::vector<int> positions(const LieAlgebra& L, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != L.dim()) throw DomainError("basis order length mismatch");
  std::vector<int> pos(L.dim(), -1);
  for (int i = 0; i < L.dim(); ++i) {
    if (order[i] < 0 || order[i] >= L.dim() || pos[order[i]] != -1)
      throw DomainError("basis order is not a permutation");
    pos[order[i]] = i;
  }
  return pos;
}

}  // namespace

bool has_nesting_property(const LieAlgebra& L, const std::vector<int>& order) {
  auto pos = positions(L, order);
  for (const auto& sc : L.constants())
    if (pos[sc.k] <= std::min(pos[sc.i], pos[sc.j])) return false;
  return true;
}

bool tails_are_ideals(const LieAlgebra& L, const std::vector<int>& order) {
  auto pos = positions(L, order);
  for (const auto& sc : L.constants())
    if (pos[sc.k] < pos[sc.j]) return false;
  return true;
}

}  // namespace nilkit
