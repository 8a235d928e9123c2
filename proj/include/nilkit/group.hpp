#pragma once

#include "nilkit/bch.hpp"

#include <numeric>
#include <utility>

namespace nilkit {

/// g = exp(sum_i t_i e_i), stored by its first-kind coordinate vector t = log g.
template <typename Scalar>
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(AlgebraPtr algebra, Vec<Scalar> log_coords)
      : algebra_(std::move(algebra)), t_(std::move(log_coords)) {
    if (!algebra_) throw DomainError("GroupElement: null algebra");
    if (t_.size() != algebra_->dim()) throw DomainError("GroupElement: coordinate length mismatch");
  }

  static GroupElement identity(AlgebraPtr algebra) {
    Vec<Scalar> z(algebra->dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Scalar(0);
    return GroupElement(std::move(algebra), std::move(z));
  }

  const AlgebraPtr& algebra() const { return algebra_; }
  const LieAlgebra& lie() const { return *algebra_; }
  const Vec<Scalar>& log() const { return t_; }
  int dim() const { return static_cast<int>(t_.size()); }

  bool is_identity() const {
    for (Eigen::Index i = 0; i < t_.size(); ++i)
      if (!is_zero(t_(i))) return false;
    return true;
  }

  GroupElement operator*(const GroupElement& other) const {
    check_same(other);
    return GroupElement(algebra_, bch<Scalar>(*algebra_, t_, other.t_));
  }

  GroupElement inverse() const { return GroupElement(algebra_, Vec<Scalar>(-t_)); }

  /// g^s = exp(s log g).
  GroupElement pow(const Scalar& s) const { return GroupElement(algebra_, Vec<Scalar>(t_ * s)); }

  bool operator==(const GroupElement& other) const {
    return t_.size() == other.t_.size() && t_ == other.t_;
  }
  bool operator!=(const GroupElement& other) const { return !(*this == other); }

 private:
  void check_same(const GroupElement& other) const {
    if (algebra_ != other.algebra_ && !(algebra_ && other.algebra_ && *algebra_ == *other.algebra_))
      throw DomainError("group operation on elements of different algebras");
  }

  AlgebraPtr algebra_;
  Vec<Scalar> t_;
};

using ElementQ = GroupElement<Rational>;
using ElementD = GroupElement<double>;

template <typename Scalar>
GroupElement<Scalar> bch_product(const GroupElement<Scalar>& x, const GroupElement<Scalar>& y) {
  return x * y;
}

template <typename Scalar>
GroupElement<Scalar> power(const GroupElement<Scalar>& g, const Scalar& t) {
  return g.pow(t);
}

/// [g, h] = g^{-1} h^{-1} g h.
template <typename Scalar>
GroupElement<Scalar> commutator(const GroupElement<Scalar>& g, const GroupElement<Scalar>& h) {
  return g.inverse() * h.inverse() * g * h;
}

/// exp(u_0 e_{p_0}) exp(u_1 e_{p_1}) ... for the basis order p.
template <typename Scalar>
GroupElement<Scalar> from_second_kind(const AlgebraPtr& algebra, const Vec<Scalar>& u,
                                      const std::vector<int>& order) {
  const int d = algebra->dim();
  if (u.size() != d || static_cast<int>(order.size()) != d)
    throw DomainError("from_second_kind: length mismatch");
  auto g = GroupElement<Scalar>::identity(algebra);
  for (int i = 0; i < d; ++i) {
    if (is_zero(u(i))) continue;
    Vec<Scalar> v(d);
    for (int k = 0; k < d; ++k) v(k) = Scalar(0);
    v(order[i]) = u(i);
    g = g * GroupElement<Scalar>(algebra, v);
  }
  return g;
}

template <typename Scalar>
GroupElement<Scalar> from_second_kind(const AlgebraPtr& algebra, const Vec<Scalar>& u) {
  std::vector<int> order(algebra->dim());
  std::iota(order.begin(), order.end(), 0);
  return from_second_kind(algebra, u, order);
}

/// u with g = exp(u_0 X_0) ... exp(u_{d-1} X_{d-1}), X_i = e_{order[i]}.
/// Peels one factor at a time from the left. If some bracket of two tail
/// vectors leaks back into an already peeled direction (see
/// has_nesting_property), exact mode throws.
template <typename Scalar>
Vec<Scalar> coords_second_kind(const GroupElement<Scalar>& g, const std::vector<int>& order) {
  const int d = g.dim();
  if (static_cast<int>(order.size()) != d) throw DomainError("coords_second_kind: order length mismatch");
  std::vector<bool> seen(d, false);
  for (int p : order) {
    if (p < 0 || p >= d || seen[p]) throw DomainError("coords_second_kind: order is not a permutation");
    seen[p] = true;
  }
  Vec<Scalar> u(d);
  GroupElement<Scalar> rest = g;
  for (int i = 0; i < d; ++i) {
    if constexpr (!std::is_same_v<Scalar, double>) {
      for (int j = 0; j < i; ++j) {
        if (!is_zero(rest.log()(order[j])))
          throw DomainError("coords_second_kind: basis order lacks the nesting property");
      }
    }
    u(i) = rest.log()(order[i]);
    if (is_zero(u(i))) continue;
    Vec<Scalar> v(d);
    for (int k = 0; k < d; ++k) v(k) = Scalar(0);
    v(order[i]) = -u(i);
    rest = GroupElement<Scalar>(g.algebra(), v) * rest;
  }
  if (!std::is_same_v<Scalar, double> && !rest.is_identity())
    throw DomainError("coords_second_kind: basis order lacks the nesting property");
  return u;
}

template <typename Scalar>
Vec<Scalar> coords_second_kind(const GroupElement<Scalar>& g) {
  std::vector<int> order(g.dim());
  std::iota(order.begin(), order.end(), 0);
  return coords_second_kind(g, order);
}

/// True when [T_i, T_i] lies in T_{i+1} for every tail T_i = span(X_i, ..., X_{d-1}),
/// which is exactly what left-to-right peeling in coords_second_kind needs.
bool has_nesting_property(const LieAlgebra& L, const std::vector<int>& order);

/// True when every tail T_i is an ideal of the whole algebra.
bool tails_are_ideals(const LieAlgebra& L, const std::vector<int>& order);

}  // namespace nilkit
