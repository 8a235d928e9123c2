#pragma once

#include "nilkit/filtration.hpp"
#include "nilkit/group.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nilkit {

using MultiIndex = std::vector<int>;

/// Total order on multi-indices: by |i|, then lexicographically.
struct IndexOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

int total_degree(const MultiIndex& i);

/// C(n, k) for integer n (any sign) and k >= 0, exactly.
Integer binomial(const Integer& n, int k);
/// prod_a C(n_a, i_a).
Integer binomial(const std::vector<long long>& n, const MultiIndex& i);

/// g(n) = prod_i g_i^{C(n, i)} over the support in IndexOrder.  Coefficients are
/// stored as log vectors.
class PolySequence {
 public:
  PolySequence() = default;
  /// Throws DomainError naming the first index whose coefficient is outside G_i.
  PolySequence(AlgebraPtr algebra, Filtration filtration, int arity,
               std::map<MultiIndex, VecQ, IndexOrder> coeffs);

  static PolySequence identity(AlgebraPtr algebra, Filtration filtration, int arity);

  const AlgebraPtr& algebra() const { return algebra_; }
  const Filtration& filtration() const { return filtration_; }
  int arity() const { return arity_; }
  const std::map<MultiIndex, VecQ, IndexOrder>& coeffs() const { return coeffs_; }
  /// Coefficient at i (zero vector when absent).
  VecQ coeff(const MultiIndex& i) const;
  /// Largest |i| with a nonzero coefficient (0 for constant or identity sequences).
  int degree() const;

  template <typename Scalar>
  GroupElement<Scalar> eval(const std::vector<long long>& n) const;
  ElementQ operator()(long long n) const { return eval<Rational>({n}); }

 private:
  AlgebraPtr algebra_;
  Filtration filtration_;
  int arity_ = 1;
  std::map<MultiIndex, VecQ, IndexOrder> coeffs_;
};

/// Subspace that a coefficient at multi-index i must lie in.
Subspace coefficient_space(const Filtration& F, const MultiIndex& i);

struct PolynomialCheck {
  bool ok = true;
  std::optional<MultiIndex> witness;
};

/// True iff each coefficient lies in G_i.
PolynomialCheck is_polynomial(const std::map<MultiIndex, VecQ, IndexOrder>& coeffs, const Filtration& F);

/// Recovers the Taylor form of an exact sequence of Taylor degree at most `max_degree`
/// from its values on {|i| <= max_degree}, then confirms it at extra points.
PolySequence interpolate(const AlgebraPtr& algebra, const Filtration& F, int arity, int max_degree,
                         const std::function<ElementQ(const std::vector<long long>&)>& fn);

/// n -> g(n + h) g(n)^{-1}.
PolySequence derivative(const PolySequence& g, const std::vector<long long>& h);
/// n -> g(n + h).
PolySequence shift(const PolySequence& g, const std::vector<long long>& h);
/// n -> g(n) h(n).
PolySequence pointwise_product(const PolySequence& g, const PolySequence& h);
/// n -> exp(sum_k C(n, k) x_k), arity one.
PolySequence from_first_kind(const AlgebraPtr& algebra, const Filtration& F, const std::vector<VecQ>& x);
/// x_k with log g(n) = sum_k C(n, k) x_k (arity one), by forward differences.
std::vector<VecQ> first_kind_coefficients(const PolySequence& g);

/// Element of G_(i,1)/G_(i,2) in coordinates read off the reduced-echelon pivots.
struct HorizontalElement {
  int level = 1;
  VecQ coords;
};

/// Coordinates of x ∈ A modulo B ⊆ A: reduce by B, read the entries at pivots(A) \ pivots(B).
VecQ horizontal_coords(const Subspace& A, const Subspace& B, const VecQ& x);
/// Vector of A whose horizontal coordinates are `coords` (combination of reduced-echelon rows).
VecQ horizontal_lift(const Subspace& A, const Subspace& B, const VecQ& coords);
int horizontal_dim(const Filtration& F, int level);

/// Taylor_i(g) = g_i mod G_(i,2).  Arity one, degree-rank filtration.
HorizontalElement taylor_coefficient(const PolySequence& g, int i);

/// alpha[i](j) for g(n) = prod_i prod_j exp(X_j)^{alpha_{i,j} n^i / i!}, X_j = e_{order[j]}.
struct GradedTaylor {
  std::vector<int> order;
  std::vector<VecQ> alpha;  // alpha[i] has length dim; index i runs over 0..degree
};

/// Stripping algorithm.  `order` must list the standard basis so that each G_i is
/// spanned by a tail of it (degree filtration, or G_(i,0) for degree-rank).
GradedTaylor graded_taylor(const PolySequence& g, const std::vector<int>& order);
ElementQ eval_graded(const AlgebraPtr& algebra, const GradedTaylor& t, long long n);

/// Real polynomial in the binomial basis: p(n) = sum_l alpha_l C(n, l).
struct RealPolynomial {
  int arity = 1;
  std::map<MultiIndex, double, IndexOrder> coeffs;
};

/// Rewrites monomial coefficients (p(n) = sum_l c_l n^l) in the binomial basis.
RealPolynomial from_monomial(int arity, const std::map<MultiIndex, double, IndexOrder>& monomial);
/// max over l != 0 of N^{|l|} dist(alpha_l, Z).
double smoothness_norm(const RealPolynomial& p, double N);

struct LinearDecomposition {
  VecQ w_small;
  VecQ w_rat;
  VecQ w_perp;
  std::vector<int> independent;  // indices of the vectors kept (greedy, input order)
  std::vector<VecQ> duals;       // w_j with w_j . v_k = [j == k] on the kept vectors
  Rational factor;               // sum_j ||w_j||_inf; ||w_small||_inf <= delta * factor
  Integer denominator;           // lcm of the denominators in w_rat
};

/// Splits w so that v_i . w_perp = 0 exactly for all i.  Throws DomainError naming the
/// worst index if dist(v_i . w, Z) > delta.
LinearDecomposition linear_decompose(const std::vector<VecQ>& vectors, const VecQ& w, const Rational& delta);

/// i-th horizontal character given by an integer vector on the horizontal coordinates of level i.
struct HorizontalFunctional {
  int level = 1;
  VecQ k;
};

struct FactorResult {
  PolySequence epsilon;
  PolySequence g_prime;
  PolySequence gamma;
  Integer gamma_denominator;  // lcm of denominators of gamma's first-kind coefficients
  double smoothness_constant = 0.0;  // C with d(eps(n), eps(n-1)) <= C / N on the samples
  int samples = 0;
  int verified_points = 0;
};

using MetricFn = std::function<double(const ElementD&, const ElementD&)>;

/// Right-invariant proxy ||log(x y^{-1})||_inf used when no manifold metric is supplied.
double log_distance(const ElementD& x, const ElementD& y);

/// g = eps * g' * gamma with the characters vanishing on Taylor_i(g').
FactorResult factor_by_characters(const PolySequence& g, const std::vector<HorizontalFunctional>& chars, long long N,
                                  const MetricFn& metric = log_distance);

template <typename Scalar>
GroupElement<Scalar> PolySequence::eval(const std::vector<long long>& n) const {
  if (static_cast<int>(n.size()) != arity_) throw DomainError("PolySequence::eval: wrong arity");
  for (long long x : n)
    if (x > (1LL << 31) || x < -(1LL << 31)) throw DomainError("PolySequence::eval: |n| exceeds 2^31");
  auto out = GroupElement<Scalar>::identity(algebra_);
  for (const auto& [i, v] : coeffs_) {
    const Integer c = binomial(n, i);
    if (c == 0) continue;
    Vec<Scalar> x(v.size());
    if constexpr (std::is_same_v<Scalar, double>) {
      const double cd = c.convert_to<double>();
      for (Eigen::Index a = 0; a < v.size(); ++a) x(a) = cd * to_double(v(a));
    } else {
      for (Eigen::Index a = 0; a < v.size(); ++a) x(a) = Scalar(Rational(c) * v(a));
    }
    out = out * GroupElement<Scalar>(algebra_, std::move(x));
  }
  return out;
}

}  // namespace nilkit
