#pragma once

#include "nilkit/lie_algebra.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace nilkit {

/// A word in the letters X (bit 0) and Y (bit 1); letter p of the word is bit p.
struct DynkinTerm {
  std::uint32_t letters = 0;
  int length = 0;
  Rational coeff;
};

/// Terms of the Dynkin series of log(exp X exp Y) of total degree `degree`,
/// each standing for coeff * [w_0, [w_1, ... [w_{m-2}, w_{m-1}]...]].
/// Words whose right-nested bracket vanishes identically are omitted.
const std::vector<DynkinTerm>& dynkin_terms(int degree);

/// log(exp(x) exp(y)) in the algebra, truncated at the algebra's nilpotency step.
template <typename Scalar>
Vec<Scalar> bch(const LieAlgebra& L, const Vec<Scalar>& x, const Vec<Scalar>& y) {
  if (!L.validated()) throw DomainError("bch: algebra has not passed validation");
  if (x.size() != L.dim() || y.size() != L.dim()) throw DomainError("bch: dimension mismatch");
  Vec<Scalar> z = x + y;
  const int step = L.step();
  if (step < 2) return z;
  // Right-nested bracket values, memoised by suffix (length, letters).
  std::unordered_map<std::uint64_t, Vec<Scalar>> memo;
  auto key = [](int len, std::uint32_t bits) { return (static_cast<std::uint64_t>(len) << 32) | bits; };
  auto value = [&](auto&& self, int len, std::uint32_t bits) -> const Vec<Scalar>& {
    auto k = key(len, bits);
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;
    Vec<Scalar> v;
    if (len == 1) {
      v = (bits & 1u) ? y : x;
    } else {
      const Vec<Scalar>& head = (bits & 1u) ? y : x;
      v = L.bracket<Scalar>(head, self(self, len - 1, bits >> 1));
    }
    return memo.emplace(k, std::move(v)).first->second;
  };
  for (int m = 2; m <= step; ++m) {
    for (const auto& term : dynkin_terms(m)) {
      const Vec<Scalar>& b = value(value, term.length, term.letters);
      const Scalar c = scalar_from_rational<Scalar>(term.coeff);
      for (Eigen::Index i = 0; i < b.size(); ++i)
        if (!is_zero(b(i))) z(i) += c * b(i);
    }
  }
  return z;
}

}  // namespace nilkit
