#pragma once

#include "nilkit/filtration.hpp"
#include "nilkit/group.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nilkit {

inline constexpr int kUniversalMaxDegree = 5;
inline constexpr int kUniversalMaxGenerators = 8;

/// Generator counts per degree 1..s.  Vectors shorter than s are padded with zeros.
struct GeneratorSpec {
  int s = 1;
  int r_star = 1;
  std::vector<int> d_star;
  std::vector<int> d_lin;
  std::vector<int> d_pet;

  int star(int i) const;
  int lin(int i) const;
  int pet(int i) const;
  int total(int i) const { return star(i) + lin(i) + pet(i); }
  int total_generators() const;
  /// Throws DomainError on malformed counts, CapExceeded beyond desk scale.
  void check() const;
};

enum class GeneratorType { Star, Lin, Pet };

/// Generator e_{i,j}: degree i in 1..s, index j in 1..D_i (star first, then linear, then petal).
struct GeneratorLabel {
  int degree = 1;
  int index = 1;
  GeneratorType type = GeneratorType::Star;
  std::string name() const;
};

/// Free nilpotent algebra on graded generators, truncated by the degree-rank rule
/// (a bracket of r generators of total degree w survives iff w < s, or w = s and r <= r*).
/// The basis consists of standard bracketings of Lyndon words, ordered by
/// (weight, length, word).
struct UniversalAlgebra {
  GeneratorSpec spec;
  AlgebraPtr algebra;
  std::vector<GeneratorLabel> letters;          // letter k of the alphabet
  std::vector<std::vector<int>> words;          // basis element -> Lyndon word over letters
  std::map<std::pair<int, int>, int> generators;  // (i, j) -> basis index
  Filtration filtration;                         // degree-rank
  std::vector<ElementQ> lattice_gens;            // exp(e_{i,j}) in generator order

  int weight(int basis_index) const;
  std::string basis_name(int basis_index) const;
};

UniversalAlgebra build_universal(const GeneratorSpec& spec);

/// G_Quot = G_Univ / G_Rel together with G_Lin.  The quotient basis is the image of
/// the universal basis elements outside G_Rel, so each quotient basis vector is
/// again a bracket of generators and keeps its word.
struct UniversalQuotient {
  GeneratorSpec spec;
  Quotient quotient;                        // algebra + induced degree-rank filtration
  Subalgebra rel;                           // G_Rel inside G_Univ
  Subalgebra lin;                           // G_Lin inside G_Quot
  std::vector<std::vector<int>> words;      // quotient basis -> word over UniversalAlgebra::letters
  std::vector<GeneratorLabel> letters;
  /// For each quotient basis element: position in the linear index set R if it has
  /// exactly one linear letter, -1 otherwise.
  std::vector<int> linear_slot;
  /// Labels of the coordinates of R, i.e. linear generators in (degree, index) order.
  std::vector<GeneratorLabel> linear_generators;
  bool normal_check = false;   // G_Rel is an ideal of G_Univ
  bool abelian_check = false;  // G_Lin is abelian
  bool lin_normal_check = false;  // G_Lin is an ideal of G_Quot

  const AlgebraPtr& algebra() const { return quotient.algebra; }
  const Filtration& filtration() const { return quotient.filtration; }
  int linear_dim() const { return static_cast<int>(linear_generators.size()); }
};

UniversalQuotient build_quotient(const UniversalAlgebra& U);

/// g -> g^t: the Lie algebra endomorphism scaling each linear generator by its t-entry,
/// applied through exp/log.  On the quotient basis it is diagonal.
template <typename Scalar>
GroupElement<Scalar> rho_power(const UniversalQuotient& Q, const GroupElement<Scalar>& g, const Vec<Scalar>& t) {
  if (t.size() != Q.linear_dim()) throw DomainError("rho_power: t has the wrong length");
  if (g.dim() != Q.algebra()->dim()) throw DomainError("rho_power: element of a different algebra");
  Vec<Scalar> v = g.log();
  for (int k = 0; k < v.size(); ++k)
    if (Q.linear_slot[k] >= 0) v(k) *= t(Q.linear_slot[k]);
  return GroupElement<Scalar>(g.algebra(), v);
}

/// Element (t, (g, g1)) of R ⋉_ρ (G_Quot ⋉ G_Lin).
template <typename Scalar>
struct SemidirectElement {
  Vec<Scalar> t;
  GroupElement<Scalar> g;
  GroupElement<Scalar> g1;
};

/// One group (G_Multi)_(d1, d2) described by the subspaces its three components range over.
struct MultiSubgroup {
  bool t_free = false;  // t ranges over R (otherwise t = 0)
  Subspace g;           // log of the G_Quot component
  Subspace g1;          // log of the G_Lin component
  bool contains(const SemidirectElement<Rational>& x) const;
  bool contains(const MultiSubgroup& o) const;
  bool is_trivial() const { return !t_free && g.is_zero() && g1.is_zero(); }
};

/// Wraps a UniversalQuotient with the group law of G_Multi.
class SemidirectGroup {
 public:
  explicit SemidirectGroup(std::shared_ptr<const UniversalQuotient> Q);

  const UniversalQuotient& quotient() const { return *q_; }

  /// (G_Multi)_(d1, d2) for d1, d2 >= 0 (multidegree filtration of arity 2).
  MultiSubgroup filtration_at(int d1, int d2) const;
  /// Largest d2 with a nontrivial (G_Multi)_(0, d2).
  int filtration_depth() const;

  /// Checks g1 ∈ G_Lin exactly (double inputs are checked after rounding to rationals
  /// only when Scalar is Rational; double elements are accepted as given).
  template <typename Scalar>
  SemidirectElement<Scalar> make(Vec<Scalar> t, Vec<Scalar> g_log, Vec<Scalar> g1_log) const;

  template <typename Scalar>
  SemidirectElement<Scalar> identity() const;

  /// (g, g1)(g', g1') = (g g', g'^{-1} g1 g' g1').
  template <typename Scalar>
  std::pair<GroupElement<Scalar>, GroupElement<Scalar>> inner_multiply(
      const std::pair<GroupElement<Scalar>, GroupElement<Scalar>>& a,
      const std::pair<GroupElement<Scalar>, GroupElement<Scalar>>& b) const;

  /// ρ(t)(g, g1) = (g g1^t, g1).
  template <typename Scalar>
  std::pair<GroupElement<Scalar>, GroupElement<Scalar>> rho(
      const Vec<Scalar>& t, const std::pair<GroupElement<Scalar>, GroupElement<Scalar>>& a) const;

  template <typename Scalar>
  SemidirectElement<Scalar> multiply(const SemidirectElement<Scalar>& a, const SemidirectElement<Scalar>& b) const;

  template <typename Scalar>
  SemidirectElement<Scalar> inverse(const SemidirectElement<Scalar>& a) const;

  template <typename Scalar>
  bool equal(const SemidirectElement<Scalar>& a, const SemidirectElement<Scalar>& b) const {
    return a.t == b.t && a.g == b.g && a.g1 == b.g1;
  }

 private:
  std::shared_ptr<const UniversalQuotient> q_;
};

struct MultiFiltrationReport {
  std::vector<FiltrationViolation> violations;
  int samples = 0;
  bool passed() const { return violations.empty(); }
};

/// Checks nesting, the join property at (0,0), and [G_i, G_j] ⊆ G_{i+j} on
/// `samples` random exact pairs per index pair.
MultiFiltrationReport validate_semidirect_filtration(const SemidirectGroup& G, int samples, std::uint64_t seed);

template <typename Scalar>
SemidirectElement<Scalar> SemidirectGroup::make(Vec<Scalar> t, Vec<Scalar> g_log, Vec<Scalar> g1_log) const {
  const auto& Q = *q_;
  if (t.size() != Q.linear_dim()) throw DomainError("semidirect element: t has the wrong length");
  if (g_log.size() != Q.algebra()->dim() || g1_log.size() != Q.algebra()->dim())
    throw DomainError("semidirect element: coordinate length mismatch");
  if constexpr (std::is_same_v<Scalar, Rational>) {
    if (!Q.lin.contains(g1_log)) throw DomainError("semidirect element: g1 is not in G_Lin");
  }
  return {std::move(t), GroupElement<Scalar>(Q.algebra(), std::move(g_log)),
          GroupElement<Scalar>(Q.algebra(), std::move(g1_log))};
}

template <typename Scalar>
SemidirectElement<Scalar> SemidirectGroup::identity() const {
  Vec<Scalar> t(q_->linear_dim());
  for (int i = 0; i < t.size(); ++i) t(i) = Scalar(0);
  auto e = GroupElement<Scalar>::identity(q_->algebra());
  return {t, e, e};
}

template <typename Scalar>
std::pair<GroupElement<Scalar>, GroupElement<Scalar>> SemidirectGroup::inner_multiply(
    const std::pair<GroupElement<Scalar>, GroupElement<Scalar>>& a,
    const std::pair<GroupElement<Scalar>, GroupElement<Scalar>>& b) const {
  return {a.first * b.first, b.first.inverse() * a.second * b.first * b.second};
}

template <typename Scalar>
std::pair<GroupElement<Scalar>, GroupElement<Scalar>> SemidirectGroup::rho(
    const Vec<Scalar>& t, const std::pair<GroupElement<Scalar>, GroupElement<Scalar>>& a) const {
  return {a.first * rho_power(*q_, a.second, t), a.second};
}

template <typename Scalar>
SemidirectElement<Scalar> SemidirectGroup::multiply(const SemidirectElement<Scalar>& a,
                                                   const SemidirectElement<Scalar>& b) const {
  auto moved = rho(b.t, std::make_pair(a.g, a.g1));
  auto inner = inner_multiply(moved, std::make_pair(b.g, b.g1));
  return {Vec<Scalar>(a.t + b.t), inner.first, inner.second};
}

template <typename Scalar>
SemidirectElement<Scalar> SemidirectGroup::inverse(const SemidirectElement<Scalar>& a) const {
  Vec<Scalar> minus_t = -a.t;
  auto moved = rho(minus_t, std::make_pair(a.g, a.g1));
  // (h, h1)^{-1} = (h^{-1}, h h1^{-1} h^{-1}).
  const auto& h = moved.first;
  const auto& h1 = moved.second;
  return {minus_t, h.inverse(), h * h1.inverse() * h.inverse()};
}

}  // namespace nilkit
