#pragma once

#include "nilkit/rational.hpp"

#include <optional>
#include <vector>

namespace nilkit {

/// Row-reduces `m` in place to reduced row echelon form and drops zero rows.
/// Pivot columns are returned in increasing order.
std::vector<int> rref_in_place(MatQ& m);

int rank(MatQ m);

/// Basis (as columns) of {x : A x = 0}.
MatQ nullspace(const MatQ& a);

/// One exact solution of A x = b, if any.
std::optional<VecQ> solve(const MatQ& a, const VecQ& b);

/// A linear subspace of Q^n stored by its reduced row echelon basis, so two
/// equal subspaces compare equal entry by entry.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(int ambient_dim);
  /// Span of the rows of `rows`.
  Subspace(int ambient_dim, const MatQ& rows);
  Subspace(int ambient_dim, const std::vector<VecQ>& vectors);

  static Subspace full(int ambient_dim);
  static Subspace coordinate(int ambient_dim, const std::vector<int>& indices);

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(basis_.rows()); }
  bool is_zero() const { return dim() == 0; }
  const MatQ& basis() const { return basis_; }
  const std::vector<int>& pivots() const { return pivots_; }
  VecQ basis_vector(int i) const { return basis_.row(i).transpose(); }
  std::vector<VecQ> basis_vectors() const;

  /// v minus its component along the pivot directions; zero iff v lies in the span.
  VecQ reduce(const VecQ& v) const;
  bool contains(const VecQ& v) const;
  bool contains(const Subspace& other) const;

  /// Coefficients of v in the stored basis (v must lie in the span).
  VecQ coordinates(const VecQ& v) const;

  Subspace sum(const Subspace& other) const;
  Subspace intersect(const Subspace& other) const;

  bool operator==(const Subspace& other) const;
  bool operator!=(const Subspace& other) const { return !(*this == other); }

 private:
  int n_ = 0;
  MatQ basis_;
  std::vector<int> pivots_;
};

/// Accumulates a span one vector at a time, keeping a reduced basis so that
/// redundant vectors are rejected cheaply.
class SpanBuilder {
 public:
  explicit SpanBuilder(int ambient_dim) : n_(ambient_dim) {}
  explicit SpanBuilder(const Subspace& start);
  /// Returns true when v enlarged the span.
  bool add(const VecQ& v);
  bool contains(const VecQ& v) const;
  int dim() const { return static_cast<int>(rows_.size()); }
  Subspace finish() const;

 private:
  VecQ reduce(const VecQ& v) const;
  int n_;
  std::vector<VecQ> rows_;
  std::vector<int> pivots_;
};

}  // namespace nilkit
