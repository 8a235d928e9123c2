#pragma once

#include "nilkit/lie_algebra.hpp"
#include "nilkit/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace nilkit {

enum class IndexKind { Degree, MultiDegree, DegreeRank };

/// An element of one of the three orderings: Degree(d), MultiDegree(v), DegreeRank(d, r).
struct OrderingIndex {
  IndexKind kind = IndexKind::Degree;
  std::vector<int> v;

  static OrderingIndex degree(int d) { return {IndexKind::Degree, {d}}; }
  static OrderingIndex degree_rank(int d, int r);
  static OrderingIndex multi(std::vector<int> v) { return {IndexKind::MultiDegree, std::move(v)}; }

  /// Total degree (d for Degree and DegreeRank, the coordinate sum for MultiDegree).
  int total() const;
  bool is_zero() const;
  std::string str() const;

  bool operator==(const OrderingIndex& o) const { return kind == o.kind && v == o.v; }
  bool operator<(const OrderingIndex& o) const { return std::tie(kind, v) < std::tie(o.kind, o.v); }
};

enum class Comparison { LessOrEqual, Greater, Incomparable };

/// a ⪯ b per the ordering of a's kind.  DegreeRank: (d',r') ⪯ (d,r) iff d' < d,
/// or d' = d and r' ≤ r.  MultiDegree is componentwise.
Comparison compare(const OrderingIndex& a, const OrderingIndex& b);
bool precedes(const OrderingIndex& a, const OrderingIndex& b);
OrderingIndex add(const OrderingIndex& a, const OrderingIndex& b);

/// A bracket-closed subspace of a Lie algebra.
class Subalgebra {
 public:
  Subalgebra() = default;
  /// Throws DomainError if the span is not closed under the bracket.
  Subalgebra(AlgebraPtr ambient, Subspace space);
  Subalgebra(AlgebraPtr ambient, const std::vector<VecQ>& vectors);

  static Subalgebra full(const AlgebraPtr& L) { return Subalgebra(L, Subspace::full(L->dim())); }
  static Subalgebra zero(const AlgebraPtr& L) { return Subalgebra(L, Subspace(L->dim())); }

  const AlgebraPtr& ambient() const { return ambient_; }
  const Subspace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  bool contains(const VecQ& v) const { return space_.contains(v); }
  bool contains(const Subalgebra& h) const { return space_.contains(h.space_); }
  /// [L, H] ⊆ H, checked on basis vectors.
  bool is_ideal() const;

  bool operator==(const Subalgebra& o) const { return space_ == o.space_; }
  bool operator!=(const Subalgebra& o) const { return !(*this == o); }

 private:
  AlgebraPtr ambient_;
  Subspace space_;
};

/// Smallest bracket-closed subspace containing the given vectors.
Subspace bracket_closure(const LieAlgebra& L, const Subspace& start);

Subalgebra join(const Subalgebra& a, const Subalgebra& b);

enum class Flavor { Plain, Degree, DegreeRank, MultiDegree };

struct FiltrationViolation {
  std::string kind;  // "closure", "nesting", "commutator", "flavor"
  OrderingIndex a;
  OrderingIndex b;
  std::string detail;
};

struct FiltrationReport {
  std::vector<FiltrationViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Indexed family of subspaces of log G stored on its finite support.
class Filtration {
 public:
  Filtration() = default;
  Filtration(AlgebraPtr algebra, Flavor flavor, IndexKind kind, std::map<OrderingIndex, Subspace> groups);

  const AlgebraPtr& algebra() const { return algebra_; }
  Flavor flavor() const { return flavor_; }
  IndexKind kind() const { return kind_; }
  const std::map<OrderingIndex, Subspace>& groups() const { return groups_; }
  /// Largest total degree among stored indices carrying a nonzero group.
  int degree() const;
  /// Arity of MultiDegree indices (1 otherwise).
  int arity() const;

  /// Lookup: stored value if present; the whole algebra at the zero index;
  /// G_(d, r) = G_(d+1, 0) when r > d; the zero subspace otherwise.
  Subspace at(const OrderingIndex& i) const;
  Subspace at_degree(int d) const { return at(OrderingIndex::degree(d)); }
  Subspace at(int d, int r) const { return at(OrderingIndex::degree_rank(d, r)); }

 private:
  AlgebraPtr algebra_;
  Flavor flavor_ = Flavor::Plain;
  IndexKind kind_ = IndexKind::Degree;
  std::map<OrderingIndex, Subspace> groups_;
};

FiltrationReport validate_filtration(const Filtration& F);

/// Degree filtration from a list G_0, G_1, ..., G_s of subspaces.
Filtration degree_filtration(const AlgebraPtr& L, const std::vector<Subspace>& groups);

/// Lower central series G_(1) ⊇ G_(2) ⊇ ... ending with the zero subalgebra.
std::vector<Subalgebra> lower_central_series(const AlgebraPtr& L);

/// Degree filtration G_0 = G_1 = G, G_i = G_(i) of the lower central series.
Filtration lower_central_filtration(const AlgebraPtr& L);

Filtration degree_rank_from_degree(const Filtration& F);

/// Associated degree filtration of a degree-rank filtration: G_i := G_(i,0).
Filtration associated_degree(const Filtration& F);

struct Quotient {
  AlgebraPtr algebra;
  Filtration filtration;
  /// Columns of the ambient basis chosen as the complement (images form the quotient basis).
  std::vector<int> complement;
  /// Rows: quotient coordinates; columns: ambient coordinates.
  MatQ projection;

  VecQ project(const VecQ& v) const { return projection * v; }
  /// Section of the projection along the complement basis.
  VecQ lift(const VecQ& w) const;
};

Quotient quotient(const Filtration& F, const Subalgebra& H);

}  // namespace nilkit
