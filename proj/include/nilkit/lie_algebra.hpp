#pragma once

#include "nilkit/errors.hpp"
#include "nilkit/linalg.hpp"
#include "nilkit/rational.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace nilkit {

inline constexpr int kMaxStep = 6;
inline constexpr int kMaxDim = 64;

/// One structure constant: [e_i, e_j] has coefficient c along e_k.
struct StructureConstant {
  int i = 0;
  int j = 0;
  int k = 0;
  Rational c;
};

struct AlgebraReport {
  std::vector<std::array<int, 3>> antisymmetry;  // (i, j, k) with c_ijk != -c_jik
  std::vector<std::array<int, 3>> jacobi;        // (i, j, l) basis triples failing Jacobi
  int step = -1;                                 // -1 when the lower central series never vanishes
  int declared_step = 0;
  bool passed = false;
};

/// Finite-dimensional Lie algebra over Q given by structure constants on the
/// standard basis e_0..e_{d-1}. Entries are stored exactly as supplied, so a
/// malformed table is representable and shows up in report().
class LieAlgebra {
 public:
  LieAlgebra(int dim, int declared_step, std::vector<StructureConstant> constants);

  int dim() const { return dim_; }
  int declared_step() const { return declared_step_; }
  /// Nilpotency step computed from the lower central series (-1 if not nilpotent).
  int step() const { return report_.step; }
  bool validated() const { return report_.passed; }
  const AlgebraReport& report() const { return report_; }
  const std::vector<StructureConstant>& constants() const { return constants_; }
  Rational constant(int i, int j, int k) const;

  template <typename Scalar>
  Vec<Scalar> bracket(const Vec<Scalar>& x, const Vec<Scalar>& y) const;

  VecQ basis_vector(int i) const;

  bool operator==(const LieAlgebra& other) const;

 private:
  AlgebraReport compute_report() const;

  int dim_;
  int declared_step_;
  std::vector<StructureConstant> constants_;  // sorted by (i, j, k), no zeros
  std::vector<double> constants_d_;
  AlgebraReport report_;
};

using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

AlgebraPtr make_algebra(int dim, int declared_step, std::vector<StructureConstant> constants);

/// Builds the table from brackets given only for i < j, filling in [e_j, e_i] = -[e_i, e_j].
AlgebraPtr make_algebra_antisymmetric(int dim, int declared_step,
                                      const std::vector<StructureConstant>& upper);

AlgebraReport validate_algebra(const LieAlgebra& L);

/// Minimal j with G_(j+1) = 0.  Throws DomainError on non-nilpotent input.
int nilpotency_step(const LieAlgebra& L);

/// G_(1) = L, G_(i+1) = [L, G_(i)], listed until (and excluding) the zero term.
/// Stops after dim + 1 terms on non-nilpotent input.
std::vector<Subspace> lower_central_spaces(const LieAlgebra& L);

/// Span of all [a, b] with a, b ranging over bases of A and B.
Subspace bracket_span(const LieAlgebra& L, const Subspace& A, const Subspace& B);

namespace algebras {
AlgebraPtr abelian(int d);
/// Basis X, Y, Z with [X, Y] = Z.
AlgebraPtr heisenberg();
/// Basis X, Y, [X,Y], [X,[X,Y]], [Y,[X,Y]].
AlgebraPtr free_step3_rank2();
}  // namespace algebras

template <typename Scalar>
Vec<Scalar> LieAlgebra::bracket(const Vec<Scalar>& x, const Vec<Scalar>& y) const {
  if (x.size() != dim_ || y.size() != dim_) throw DomainError("bracket: dimension mismatch");
  Vec<Scalar> out(dim_);
  for (int k = 0; k < dim_; ++k) out(k) = Scalar(0);
  for (size_t e = 0; e < constants_.size(); ++e) {
    const auto& sc = constants_[e];
    if (is_zero(x(sc.i)) || is_zero(y(sc.j))) continue;
    if constexpr (std::is_same_v<Scalar, double>) {
      out(sc.k) += constants_d_[e] * x(sc.i) * y(sc.j);
    } else {
      out(sc.k) += scalar_from_rational<Scalar>(sc.c) * x(sc.i) * y(sc.j);
    }
  }
  return out;
}

}  // namespace nilkit
