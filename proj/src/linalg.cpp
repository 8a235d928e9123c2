#include "nilkit/linalg.hpp"

#include "nilkit/errors.hpp"

namespace nilkit {

std::vector<int> rref_in_place(MatQ& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  std::vector<int> pivots;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index p = r;
    while (p < rows && m(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != r) m.row(p).swap(m.row(r));
    Rational inv = Rational(1) / m(r, c);
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      Rational f = m(i, c);
      for (Eigen::Index j = c; j < cols; ++j) {
        if (!m(r, j).is_zero()) m(i, j) -= f * m(r, j);
      }
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  m.conservativeResize(r, cols);
  return pivots;
}

int rank(MatQ m) { return static_cast<int>(rref_in_place(m).size()); }

MatQ nullspace(const MatQ& a) {
  MatQ r = a;
  std::vector<int> piv = rref_in_place(r);
  const int n = static_cast<int>(a.cols());
  std::vector<bool> is_pivot(n, false);
  for (int p : piv) is_pivot[p] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  MatQ out = MatQ::Zero(n, static_cast<Eigen::Index>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int f = free_cols[k];
    out(f, static_cast<Eigen::Index>(k)) = 1;
    for (size_t i = 0; i < piv.size(); ++i) out(piv[i], static_cast<Eigen::Index>(k)) = -r(static_cast<Eigen::Index>(i), f);
  }
  return out;
}

std::optional<VecQ> solve(const MatQ& a, const VecQ& b) {
  if (a.rows() != b.size()) throw DomainError("solve: shape mismatch");
  MatQ aug(a.rows(), a.cols() + 1);
  aug << a, b;
  std::vector<int> piv = rref_in_place(aug);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  VecQ x = VecQ::Zero(a.cols());
  for (size_t i = 0; i < piv.size(); ++i) x(piv[i]) = aug(static_cast<Eigen::Index>(i), a.cols());
  return x;
}

Subspace::Subspace(int ambient_dim) : n_(ambient_dim), basis_(0, ambient_dim) {}

Subspace::Subspace(int ambient_dim, const MatQ& rows) : n_(ambient_dim), basis_(rows) {
  if (rows.cols() != ambient_dim) throw DomainError("Subspace: vector length mismatch");
  pivots_ = rref_in_place(basis_);
}

Subspace::Subspace(int ambient_dim, const std::vector<VecQ>& vectors) : n_(ambient_dim) {
  MatQ rows(static_cast<Eigen::Index>(vectors.size()), ambient_dim);
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != ambient_dim) throw DomainError("Subspace: vector length mismatch");
    rows.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }
  basis_ = rows;
  pivots_ = rref_in_place(basis_);
}

Subspace Subspace::full(int ambient_dim) {
  return Subspace(ambient_dim, MatQ(MatQ::Identity(ambient_dim, ambient_dim)));
}

Subspace Subspace::coordinate(int ambient_dim, const std::vector<int>& indices) {
  std::vector<VecQ> vs;
  for (int i : indices) {
    VecQ v = VecQ::Zero(ambient_dim);
    v(i) = 1;
    vs.push_back(v);
  }
  return Subspace(ambient_dim, vs);
}

std::vector<VecQ> Subspace::basis_vectors() const {
  std::vector<VecQ> out;
  for (int i = 0; i < dim(); ++i) out.push_back(basis_vector(i));
  return out;
}

VecQ Subspace::reduce(const VecQ& v) const {
  if (v.size() != n_) throw DomainError("Subspace: vector length mismatch");
  VecQ r = v;
  for (size_t i = 0; i < pivots_.size(); ++i) {
    const Rational f = r(pivots_[i]);
    if (f.is_zero()) continue;
    r -= f * basis_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return r;
}

bool Subspace::contains(const VecQ& v) const {
  VecQ r = reduce(v);
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (!r(i).is_zero()) return false;
  return true;
}

bool Subspace::contains(const Subspace& other) const {
  for (int i = 0; i < other.dim(); ++i)
    if (!contains(other.basis_vector(i))) return false;
  return true;
}

VecQ Subspace::coordinates(const VecQ& v) const {
  VecQ c(dim());
  for (size_t i = 0; i < pivots_.size(); ++i) c(static_cast<Eigen::Index>(i)) = v(pivots_[i]);
  return c;
}

Subspace Subspace::sum(const Subspace& other) const {
  if (other.n_ != n_) throw DomainError("Subspace: ambient mismatch");
  MatQ rows(basis_.rows() + other.basis_.rows(), n_);
  rows << basis_, other.basis_;
  return Subspace(n_, rows);
}

Subspace Subspace::intersect(const Subspace& other) const {
  if (other.n_ != n_) throw DomainError("Subspace: ambient mismatch");
  if (is_zero() || other.is_zero()) return Subspace(n_);
  // x = a^T A = b^T B  <=>  [A^T | -B^T] (a; b) = 0
  MatQ m(n_, basis_.rows() + other.basis_.rows());
  m << basis_.transpose(), -other.basis_.transpose();
  MatQ ns = nullspace(m);
  std::vector<VecQ> vs;
  for (Eigen::Index k = 0; k < ns.cols(); ++k) {
    VecQ a = ns.col(k).head(basis_.rows());
    vs.push_back(basis_.transpose() * a);
  }
  return Subspace(n_, vs);
}

bool Subspace::operator==(const Subspace& other) const {
  if (n_ != other.n_ || pivots_ != other.pivots_) return false;
  return basis_ == other.basis_;
}

SpanBuilder::SpanBuilder(const Subspace& start) : n_(start.ambient_dim()) {
  for (int i = 0; i < start.dim(); ++i) add(start.basis_vector(i));
}

VecQ SpanBuilder::reduce(const VecQ& v) const {
  VecQ r = v;
  for (size_t i = 0; i < rows_.size(); ++i) {
    const Rational f = r(pivots_[i]);
    if (f.is_zero()) continue;
    for (int c = 0; c < n_; ++c)
      if (!rows_[i](c).is_zero()) r(c) -= f * rows_[i](c);
  }
  return r;
}

bool SpanBuilder::contains(const VecQ& v) const {
  VecQ r = reduce(v);
  for (int c = 0; c < n_; ++c)
    if (!r(c).is_zero()) return false;
  return true;
}

bool SpanBuilder::add(const VecQ& v) {
  if (v.size() != n_) throw DomainError("SpanBuilder: vector length mismatch");
  VecQ r = reduce(v);
  int p = 0;
  while (p < n_ && r(p).is_zero()) ++p;
  if (p == n_) return false;
  r /= Rational(r(p));
  for (auto& row : rows_) {
    const Rational f = row(p);
    if (f.is_zero()) continue;
    for (int c = 0; c < n_; ++c)
      if (!r(c).is_zero()) row(c) -= f * r(c);
  }
  rows_.push_back(r);
  pivots_.push_back(p);
  return true;
}

Subspace SpanBuilder::finish() const { return Subspace(n_, rows_); }

}  // namespace nilkit
