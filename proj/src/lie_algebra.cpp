#include "nilkit/lie_algebra.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace nilkit {

LieAlgebra::LieAlgebra(int dim, int declared_step, std::vector<StructureConstant> constants)
    : dim_(dim), declared_step_(declared_step) {
  if (dim < 1) throw DomainError("LieAlgebra: dimension must be positive");
  if (dim > kMaxDim) throw CapExceeded("LieAlgebra: dimension " + std::to_string(dim) + " exceeds cap 64");
  if (declared_step < 1) throw DomainError("LieAlgebra: declared step must be positive");
  if (declared_step > kMaxStep)
    throw CapExceeded("LieAlgebra: step " + std::to_string(declared_step) + " exceeds cap 6");
  std::map<std::tuple<int, int, int>, Rational> merged;
  for (auto& sc : constants) {
    if (sc.i < 0 || sc.j < 0 || sc.k < 0 || sc.i >= dim || sc.j >= dim || sc.k >= dim)
      throw DomainError("LieAlgebra: structure constant index out of range");
    merged[{sc.i, sc.j, sc.k}] += sc.c;
  }
  for (auto& [key, c] : merged) {
    if (c.is_zero()) continue;
    constants_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
    constants_d_.push_back(c.convert_to<double>());
  }
  report_ = compute_report();
}

Rational LieAlgebra::constant(int i, int j, int k) const {
  auto it = std::lower_bound(constants_.begin(), constants_.end(), std::make_tuple(i, j, k),
                             [](const StructureConstant& sc, const std::tuple<int, int, int>& key) {
                               return std::make_tuple(sc.i, sc.j, sc.k) < key;
                             });
  if (it != constants_.end() && it->i == i && it->j == j && it->k == k) return it->c;
  return Rational(0);
}

VecQ LieAlgebra::basis_vector(int i) const {
  VecQ v = VecQ::Zero(dim_);
  v(i) = 1;
  return v;
}

bool LieAlgebra::operator==(const LieAlgebra& other) const {
  if (dim_ != other.dim_ || declared_step_ != other.declared_step_) return false;
  if (constants_.size() != other.constants_.size()) return false;
  for (size_t e = 0; e < constants_.size(); ++e) {
    const auto& a = constants_[e];
    const auto& b = other.constants_[e];
    if (a.i != b.i || a.j != b.j || a.k != b.k || a.c != b.c) return false;
  }
  return true;
}

AlgebraReport LieAlgebra::compute_report() const {
  AlgebraReport rep;
  rep.declared_step = declared_step_;
  for (const auto& sc : constants_) {
    if (sc.i > sc.j) continue;
    if (sc.i == sc.j || constant(sc.j, sc.i, sc.k) != -sc.c) rep.antisymmetry.push_back({sc.i, sc.j, sc.k});
  }
  for (const auto& sc : constants_) {
    if (sc.i <= sc.j) continue;
    if (constant(sc.j, sc.i, sc.k).is_zero()) rep.antisymmetry.push_back({sc.j, sc.i, sc.k});
  }
  std::sort(rep.antisymmetry.begin(), rep.antisymmetry.end());
  rep.antisymmetry.erase(std::unique(rep.antisymmetry.begin(), rep.antisymmetry.end()),
                         rep.antisymmetry.end());

  // Sparse table of [e_i, e_j]; the Jacobi sum is accumulated term by term.
  using Sparse = std::vector<std::pair<int, Rational>>;
  std::vector<std::vector<Sparse>> tab(dim_, std::vector<Sparse>(dim_));
  for (const auto& sc : constants_) tab[sc.i][sc.j].push_back({sc.k, sc.c});
  auto nested = [&](int a, int b, int c, std::map<int, Rational>& acc) {
    for (const auto& [k, c1] : tab[b][c])
      for (const auto& [m, c2] : tab[a][k]) acc[m] += c1 * c2;
  };
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      for (int l = j + 1; l < dim_; ++l) {
        if (tab[j][l].empty() && tab[l][i].empty() && tab[i][j].empty()) continue;
        std::map<int, Rational> acc;
        nested(i, j, l, acc);
        nested(j, l, i, acc);
        nested(l, i, j, acc);
        bool zero = true;
        for (const auto& kv : acc) zero = zero && kv.second.is_zero();
        if (!zero) rep.jacobi.push_back({i, j, l});
      }
    }
  }

  auto series = lower_central_spaces(*this);
  if (series.size() <= static_cast<size_t>(dim_)) rep.step = static_cast<int>(series.size());
  rep.passed = rep.antisymmetry.empty() && rep.jacobi.empty() && rep.step >= 1 &&
               rep.step <= declared_step_;
  return rep;
}

Subspace bracket_span(const LieAlgebra& L, const Subspace& A, const Subspace& B) {
  SpanBuilder span(L.dim());
  for (int a = 0; a < A.dim(); ++a) {
    VecQ va = A.basis_vector(a);
    for (int b = 0; b < B.dim(); ++b) span.add(L.bracket<Rational>(va, B.basis_vector(b)));
  }
  return span.finish();
}

std::vector<Subspace> lower_central_spaces(const LieAlgebra& L) {
  std::vector<Subspace> out;
  Subspace full = Subspace::full(L.dim());
  Subspace cur = full;
  while (!cur.is_zero() && out.size() <= static_cast<size_t>(L.dim())) {
    out.push_back(cur);
    cur = bracket_span(L, full, cur);
  }
  return out;
}

AlgebraReport validate_algebra(const LieAlgebra& L) { return L.report(); }

int nilpotency_step(const LieAlgebra& L) {
  if (L.step() < 0) throw DomainError("nilpotency_step: lower central series does not terminate");
  return L.step();
}

AlgebraPtr make_algebra(int dim, int declared_step, std::vector<StructureConstant> constants) {
  return std::make_shared<const LieAlgebra>(dim, declared_step, std::move(constants));
}

AlgebraPtr make_algebra_antisymmetric(int dim, int declared_step,
                                      const std::vector<StructureConstant>& upper) {
  std::vector<StructureConstant> all;
  for (const auto& sc : upper) {
    all.push_back(sc);
    all.push_back({sc.j, sc.i, sc.k, Rational(-sc.c)});
  }
  return make_algebra(dim, declared_step, std::move(all));
}

namespace algebras {

AlgebraPtr abelian(int d) { return make_algebra(d, 1, {}); }

AlgebraPtr heisenberg() { return make_algebra_antisymmetric(3, 2, {{0, 1, 2, Rational(1)}}); }

AlgebraPtr free_step3_rank2() {
  // 0 = X, 1 = Y, 2 = [X,Y], 3 = [X,[X,Y]], 4 = [Y,[X,Y]]
  return make_algebra_antisymmetric(5, 3, {{0, 1, 2, Rational(1)}, {0, 2, 3, Rational(1)}, {1, 2, 4, Rational(1)}});
}

}  // namespace algebras

}  // namespace nilkit
