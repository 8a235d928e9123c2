#pragma once

#include "nilkit/filtration.hpp"
#include "nilkit/group.hpp"
#include "nilkit/polyseq.hpp"

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace nilkit {

/// G/Γ with Γ = ψ⁻¹(Z^d), where ψ is the second-kind coordinate map for the
/// ordered basis X_i = e_{order[i]}.  The filtration is a degree filtration
/// G = G_1 ⊇ ... ⊇ G_s ⊋ G_{s+1} = 0 and the basis is adapted to it, so the
/// coordinates of each G_m form a tail of the order.
class Nilmanifold {
 public:
  Nilmanifold() = default;
  /// Throws DomainError when the order is not a permutation, the tails are
  /// not the filtration groups, some tail is not an ideal, or a sampled
  /// product of lattice points leaves Z^d.
  Nilmanifold(AlgebraPtr algebra, Filtration filtration, std::vector<int> order);

  /// Lower central filtration with an adapted order found automatically.
  static Nilmanifold standard(const AlgebraPtr& algebra);
  /// R^d / Z^d.
  static Nilmanifold torus(int d);

  const AlgebraPtr& algebra() const { return algebra_; }
  const Filtration& filtration() const { return filtration_; }
  const std::vector<int>& order() const { return order_; }
  int dim() const { return static_cast<int>(order_.size()); }
  /// Degree s of the filtration.
  int degree() const { return static_cast<int>(block_start_.size()) - 1; }
  /// Coordinate positions [begin, end) of G_m \ G_{m+1}, m = 1..s.
  std::pair<int, int> block(int m) const;
  /// Largest height among structure constants in the Mal'cev basis.
  Rational structure_height() const { return height_; }

  template <typename Scalar>
  Vec<Scalar> psi(const GroupElement<Scalar>& g) const {
    return coords_second_kind(g, order_);
  }
  template <typename Scalar>
  GroupElement<Scalar> from_psi(const Vec<Scalar>& u) const {
    return from_second_kind(algebra_, u, order_);
  }
  /// exp(c X_i).
  template <typename Scalar>
  GroupElement<Scalar> basis_power(int i, const Scalar& c) const {
    Vec<Scalar> v(dim());
    for (int k = 0; k < dim(); ++k) v(k) = Scalar(0);
    v(order_[i]) = c;
    return GroupElement<Scalar>(algebra_, v);
  }

  bool is_lattice_point(const ElementQ& g) const;

 private:
  AlgebraPtr algebra_;
  Filtration filtration_;
  std::vector<int> order_;
  std::vector<int> block_start_;  // block_start_[m-1] = first position of G_m; last entry = d
  Rational height_;
};

template <typename Scalar>
struct Reduction {
  GroupElement<Scalar> frac;     // {g}
  GroupElement<Scalar> integer;  // [g]
};

/// Right-multiplies g by integer powers exp(-n X_i) for i = from, ..., to-1
/// in that order so that ψ_i of the result lies in [lower_i, lower_i + 1).
/// A factor exp(n X_i) only disturbs coordinates after i, which is what makes
/// the first-to-last sweep terminate with every coordinate in range.
template <typename Scalar>
GroupElement<Scalar> reduce_to_box(const GroupElement<Scalar>& g, const Nilmanifold& M,
                                   const std::vector<Scalar>& lower, int from, int to) {
  GroupElement<Scalar> x = g;
  for (int i = from; i < to; ++i) {
    const Vec<Scalar> u = M.psi(x);
    const Scalar n = floor_scalar(Scalar(u(i) - lower[i]));
    if (is_zero(n)) continue;
    x = x * M.basis_power<Scalar>(i, Scalar(-n));
  }
  return x;
}

/// g = {g}·[g] with ψ({g}) ∈ [0,1)^d and [g] ∈ Γ.
template <typename Scalar>
Reduction<Scalar> reduce_to_fundamental(const GroupElement<Scalar>& g, const Nilmanifold& M) {
  const std::vector<Scalar> zero(M.dim(), Scalar(0));
  GroupElement<Scalar> frac = reduce_to_box(g, M, zero, 0, M.dim());
  GroupElement<Scalar> integer = frac.inverse() * g;
  if constexpr (std::is_same_v<Scalar, double>) {
    // Snap the lattice part to the nearest integer point.
    Vec<double> u = M.psi(integer);
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::round(u(i));
    integer = M.from_psi(u);
  }
  return {std::move(frac), std::move(integer)};
}

/// Refinement 0: min(‖ψ(xy⁻¹)‖∞, ‖ψ(yx⁻¹)‖∞), exact in the scalar type.
template <typename Scalar>
Scalar metric_basic(const GroupElement<Scalar>& x, const GroupElement<Scalar>& y, const Nilmanifold& M) {
  auto sup = [](const Vec<Scalar>& v) {
    Scalar m(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      Scalar a = v(i) < Scalar(0) ? Scalar(-v(i)) : v(i);
      if (a > m) m = a;
    }
    return m;
  };
  Scalar a = sup(M.psi(GroupElement<Scalar>(x * y.inverse())));
  Scalar b = sup(M.psi(GroupElement<Scalar>(y * x.inverse())));
  return a < b ? a : b;
}

/// Upper bound on the chain metric.  Level r uses the chain of r intermediate
/// points on the segment between ψ(x) and ψ(y); the result is the minimum
/// over levels 0..r, hence nonincreasing in r.
double metric_upper(const ElementD& x, const ElementD& y, const Nilmanifold& M, int refinement = 0);

struct HorizontalCheck {
  bool valid = false;
  Integer size;           // ‖k‖∞
  int pairs_checked = 0;
  VecQ witness_a, witness_b;  // second-kind coordinates of a failing pair
};

/// Homomorphism test of g ↦ k·ψ(g) on random exact pairs.
HorizontalCheck validate_horizontal(const VecQ& k, const Nilmanifold& M, int pairs = 200,
                                    std::uint64_t seed = 1);

template <typename Scalar>
Scalar horizontal_value(const VecQ& k, const Nilmanifold& M, const GroupElement<Scalar>& g) {
  const Vec<Scalar> u = M.psi(g);
  Scalar out(0);
  for (int i = 0; i < M.dim(); ++i) out += scalar_from_rational<Scalar>(k(i)) * u(i);
  return out;
}

struct VerticalCharacter {
  Subspace T;
  VecQ xi;  // coordinates along the basis of T made of the Mal'cev vectors inside T
};

/// Vertical character on the bottom group G_s with the given integer vector.
VerticalCharacter bottom_vertical_character(const Nilmanifold& M, const VecQ& xi);

/// Throws DomainError unless T = G_s, T is central and ξ is integral.
void validate_vertical(const VerticalCharacter& eta, const Nilmanifold& M);

/// η(g) for g in T.
double vertical_value(const VerticalCharacter& eta, const Nilmanifold& M, const ElementD& g);

/// ρ_t(x) = sin(πk·y) with y = (x − t/(2k)) mod 1 when y ≤ 1/k, else 0, for t = 0..2k−1.
/// Σ_t ρ_t(x)² = 1 for every x.
double torus_bump(int k, int t, double x);

/// The (at most two) bump indices t with ρ_t(x) ≠ 0.
std::vector<std::pair<int, double>> torus_bumps_at(int k, double x);

/// Functions τ_t indexed by t ∈ [2k]^c over the first c coordinates, built
/// level by level: the coordinates of block m are read (mod 1) from the
/// representative whose earlier coordinates lie in the box centred at
/// β_ℓ = (t_ℓ + 1)/(2k).  Σ_t τ_t² = 1 and τ_t is Γ-invariant.
class PartitionOfUnity {
 public:
  struct Term {
    std::vector<int> t;
    double value = 0;
    ElementD representative;  // ψ-coordinates of the covered part lie in the β-box
  };

  /// Covers blocks 1..levels (levels = s gives the full partition).
  PartitionOfUnity(const Nilmanifold& M, double epsilon, int levels);

  int k() const { return k_; }
  double epsilon() const { return epsilon_; }
  int covered() const { return covered_; }
  /// (2k)^covered; throws CapExceeded when it does not fit in 62 bits.
  long long size() const;
  long long index_of(const std::vector<int>& t) const;
  std::vector<double> beta(const std::vector<int>& t) const;

  /// Nonzero terms at g.
  std::vector<Term> terms(const ElementD& g) const;
  /// Value of τ_t at g.
  double value(const std::vector<int>& t, const ElementD& g) const;

 private:
  void visit(int m, std::vector<int>& t, double acc, const ElementD& x, std::vector<Term>& out) const;

  Nilmanifold M_;
  double epsilon_;
  int k_;
  int levels_;
  int covered_;
};

PartitionOfUnity partition_of_unity(const Nilmanifold& M, double epsilon);

class Nilcharacter {
 public:
  Nilcharacter(const Nilmanifold& M, VerticalCharacter eta, double epsilon);

  const Nilmanifold& manifold() const { return M_; }
  const VerticalCharacter& frequency() const { return eta_; }
  long long output_dim() const { return partition_.size(); }

  std::vector<std::pair<long long, std::complex<double>>> evaluate_sparse(const ElementD& g) const;
  /// Dense vector of length output_dim(); CapExceeded above 2^20 entries.
  std::vector<std::complex<double>> evaluate(const ElementD& g) const;

 private:
  Nilmanifold M_;
  VerticalCharacter eta_;
  PartitionOfUnity partition_;
  VecD xi_d_;
};

Nilcharacter make_nilcharacter(const Nilmanifold& M, const VerticalCharacter& eta, double epsilon = 0.25);

using NilFunction = std::function<std::complex<double>(const ElementD&)>;

/// F({g(n)}) with the reduction done exactly.
std::complex<double> eval_nilsequence(const NilFunction& F, const Nilmanifold& M, const PolySequence& g,
                                      long long n);

/// F(x) = e(ξ·ψ(x)_tail) on the fundamental domain, ξ over the G_s coordinates.
NilFunction vertical_phase_function(const Nilmanifold& M, const VecQ& xi);

/// Smallest Q' ≥ 1 with ψ(exp(Σ z_j X_j)) ∈ Z^d whenever all z_j ∈ Q'Z.
Integer divisibility_constant(const Nilmanifold& M);

struct LipschitzEstimate {
  double max_quotient = 0;
  double sup_norm = 0;
  int pairs = 0;
};

/// Max of |F(x) − F(y)| / metric_upper(x, y) over random nearby pairs in the
/// fundamental domain.  An estimate only.
LipschitzEstimate estimate_lipschitz(const NilFunction& F, const Nilmanifold& M, int pairs = 10000,
                                     std::uint64_t seed = 1, double scale = 1e-3);

/// G1 × G2 with G_m = (G1)_m × (G2)_m and the basis ordered block by block.
Nilmanifold direct_product(const Nilmanifold& A, const Nilmanifold& B);

}  // namespace nilkit
