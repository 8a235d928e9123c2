#include "nilkit/polyseq.hpp"

#include <algorithm>
#include <cmath>

namespace nilkit {

namespace {

Integer factorial(int k) {
  Integer f = 1;
  for (int t = 2; t <= k; ++t) f *= t;
  return f;
}

std::vector<long long> to_point(const MultiIndex& i) { return std::vector<long long>(i.begin(), i.end()); }

/// All multi-indices of the given arity with |i| <= D, in IndexOrder.
std::vector<MultiIndex> index_grid(int arity, int D) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<size_t>(arity), 0);
  std::function<void(int, int)> rec = [&](int pos, int budget) {
    if (pos == arity) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      cur[static_cast<size_t>(pos)] = v;
      rec(pos + 1, budget - v);
    }
  };
  rec(0, D);
  std::sort(out.begin(), out.end(), IndexOrder{});
  return out;
}

bool dominated(const MultiIndex& j, const MultiIndex& i) {
  for (size_t a = 0; a < i.size(); ++a)
    if (j[a] > i[a]) return false;
  return true;
}

int algebra_step(const LieAlgebra& L) { return std::max(1, nilpotency_step(L)); }

/// Signed Stirling numbers of the first kind s(k, m), 0 <= m <= k <= K.
std::vector<std::vector<Integer>> stirling1(int K) {
  std::vector<std::vector<Integer>> s(static_cast<size_t>(K + 1), std::vector<Integer>(static_cast<size_t>(K + 1), 0));
  s[0][0] = 1;
  for (int k = 1; k <= K; ++k)
    for (int m = 1; m <= k; ++m)
      s[static_cast<size_t>(k)][static_cast<size_t>(m)] =
          s[static_cast<size_t>(k - 1)][static_cast<size_t>(m - 1)] -
          Integer(k - 1) * s[static_cast<size_t>(k - 1)][static_cast<size_t>(m)];
  return s;
}

/// Stirling numbers of the second kind S(m, k).
std::vector<std::vector<double>> stirling2(int K) {
  std::vector<std::vector<double>> S(static_cast<size_t>(K + 1), std::vector<double>(static_cast<size_t>(K + 1), 0.0));
  S[0][0] = 1;
  for (int m = 1; m <= K; ++m)
    for (int k = 1; k <= m; ++k)
      S[static_cast<size_t>(m)][static_cast<size_t>(k)] =
          k * S[static_cast<size_t>(m - 1)][static_cast<size_t>(k)] + S[static_cast<size_t>(m - 1)][static_cast<size_t>(k - 1)];
  return S;
}

/// Forward differences: values at n = 0..E -> binomial-basis coefficients.
std::vector<VecQ> forward_differences(std::vector<VecQ> values) {
  std::vector<VecQ> out;
  while (!values.empty()) {
    out.push_back(values.front());
    for (size_t t = 0; t + 1 < values.size(); ++t) values[t] = values[t + 1] - values[t];
    values.pop_back();
  }
  return out;
}

/// Binomial-basis coefficients -> monomial coefficients.
std::vector<VecQ> binomial_to_monomial(const std::vector<VecQ>& b) {
  const int K = static_cast<int>(b.size()) - 1;
  if (K < 0) return {};
  auto s = stirling1(K);
  std::vector<VecQ> a(b.size(), VecQ::Zero(b[0].size()));
  for (int k = 0; k <= K; ++k) {
    const Rational inv = Rational(1) / Rational(factorial(k));
    for (int m = 0; m <= k; ++m) {
      const Integer& c = s[static_cast<size_t>(k)][static_cast<size_t>(m)];
      if (c != 0) a[static_cast<size_t>(m)] += (Rational(c) * inv) * b[static_cast<size_t>(k)];
    }
  }
  return a;
}

bool all_zero(const VecQ& v) {
  for (Eigen::Index a = 0; a < v.size(); ++a)
    if (!v(a).is_zero()) return false;
  return true;
}

Subspace degree_level(const Filtration& F, int i) {
  switch (F.kind()) {
    case IndexKind::Degree:
      return F.at_degree(i);
    case IndexKind::DegreeRank:
      return F.at(i, 0);
    default:
      throw DomainError("degree-type filtration required");
  }
}

ElementQ exp_first_kind(const AlgebraPtr& algebra, const std::vector<VecQ>& x, long long n) {
  VecQ v = VecQ::Zero(algebra->dim());
  for (size_t k = 0; k < x.size(); ++k) {
    const Integer c = binomial(Integer(n), static_cast<int>(k));
    if (c != 0) v += Rational(c) * x[k];
  }
  return ElementQ(algebra, v);
}

}  // namespace

bool IndexOrder::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int ta = total_degree(a), tb = total_degree(b);
  if (ta != tb) return ta < tb;
  return a < b;
}

int total_degree(const MultiIndex& i) {
  int t = 0;
  for (int x : i) t += x;
  return t;
}

Integer binomial(const Integer& n, int k) {
  if (k < 0) return 0;
  Integer num = 1;
  for (int t = 0; t < k; ++t) num *= (n - t);
  return num / factorial(k);
}

Integer binomial(const std::vector<long long>& n, const MultiIndex& i) {
  if (n.size() != i.size()) throw DomainError("binomial: arity mismatch");
  Integer out = 1;
  for (size_t a = 0; a < n.size() && out != 0; ++a) out *= binomial(Integer(n[a]), i[a]);
  return out;
}

Subspace coefficient_space(const Filtration& F, const MultiIndex& i) {
  switch (F.kind()) {
    case IndexKind::Degree:
      return F.at_degree(total_degree(i));
    case IndexKind::DegreeRank:
      return F.at(total_degree(i), 0);
    case IndexKind::MultiDegree:
      if (static_cast<int>(i.size()) != F.arity())
        throw DomainError("coefficient_space: multi-index arity differs from the filtration's");
      return F.at(OrderingIndex::multi(i));
  }
  throw DomainError("coefficient_space: unknown filtration kind");
}

PolynomialCheck is_polynomial(const std::map<MultiIndex, VecQ, IndexOrder>& coeffs, const Filtration& F) {
  for (const auto& [i, v] : coeffs)
    if (!coefficient_space(F, i).contains(v)) return {false, i};
  return {true, std::nullopt};
}

PolySequence::PolySequence(AlgebraPtr algebra, Filtration filtration, int arity,
                           std::map<MultiIndex, VecQ, IndexOrder> coeffs)
    : algebra_(std::move(algebra)), filtration_(std::move(filtration)), arity_(arity) {
  if (!algebra_) throw DomainError("PolySequence: null algebra");
  if (arity_ < 1) throw DomainError("PolySequence: arity must be positive");
  for (auto& [i, v] : coeffs) {
    if (static_cast<int>(i.size()) != arity_) throw DomainError("PolySequence: multi-index of the wrong arity");
    for (int x : i)
      if (x < 0) throw DomainError("PolySequence: negative multi-index");
    if (v.size() != algebra_->dim()) throw DomainError("PolySequence: coefficient length mismatch");
    if (!all_zero(v)) coeffs_.emplace(i, std::move(v));
  }
  auto check = is_polynomial(coeffs_, filtration_);
  if (!check.ok) {
    std::string w;
    for (int x : *check.witness) w += (w.empty() ? "" : ",") + std::to_string(x);
    throw DomainError("PolySequence: coefficient at index (" + w + ") lies outside its filtration group");
  }
}

PolySequence PolySequence::identity(AlgebraPtr algebra, Filtration filtration, int arity) {
  return PolySequence(std::move(algebra), std::move(filtration), arity, {});
}

VecQ PolySequence::coeff(const MultiIndex& i) const {
  auto it = coeffs_.find(i);
  return it == coeffs_.end() ? VecQ(VecQ::Zero(algebra_->dim())) : it->second;
}

int PolySequence::degree() const {
  int d = 0;
  for (const auto& [i, v] : coeffs_) d = std::max(d, total_degree(i));
  return d;
}

PolySequence interpolate(const AlgebraPtr& algebra, const Filtration& F, int arity, int max_degree,
                         const std::function<ElementQ(const std::vector<long long>&)>& fn) {
  std::map<MultiIndex, VecQ, IndexOrder> coeffs;
  for (const auto& i : index_grid(arity, max_degree)) {
    auto prefix = ElementQ::identity(algebra);
    for (const auto& [j, v] : coeffs) {
      if (!dominated(j, i)) continue;
      prefix = prefix * ElementQ(algebra, VecQ(Rational(binomial(to_point(i), j)) * v));
    }
    VecQ gi = (prefix.inverse() * fn(to_point(i))).log();
    if (!all_zero(gi)) coeffs.emplace(i, gi);
  }
  PolySequence out(algebra, F, arity, std::move(coeffs));
  std::vector<std::vector<long long>> probes;
  for (long long extra : {1LL, 2LL, 3LL}) {
    probes.emplace_back(static_cast<size_t>(arity), max_degree + extra);
    probes.emplace_back(static_cast<size_t>(arity), -extra);
    std::vector<long long> mixed(static_cast<size_t>(arity));
    for (int a = 0; a < arity; ++a) mixed[static_cast<size_t>(a)] = (a % 2 == 0) ? -extra : max_degree + extra;
    probes.push_back(mixed);
  }
  for (const auto& p : probes)
    if (out.eval<Rational>(p) != fn(p))
      throw InvariantFailure("polyseq", "interpolated Taylor form disagrees with the sequence at a probe point");
  return out;
}

PolySequence derivative(const PolySequence& g, const std::vector<long long>& h) {
  if (static_cast<int>(h.size()) != g.arity()) throw DomainError("derivative: shift has the wrong arity");
  const int D = std::max(1, g.degree()) * algebra_step(*g.algebra());
  return interpolate(g.algebra(), g.filtration(), g.arity(), D, [&](const std::vector<long long>& n) {
    std::vector<long long> m = n;
    for (size_t a = 0; a < m.size(); ++a) m[a] += h[a];
    return g.eval<Rational>(m) * g.eval<Rational>(n).inverse();
  });
}

PolySequence shift(const PolySequence& g, const std::vector<long long>& h) {
  if (static_cast<int>(h.size()) != g.arity()) throw DomainError("shift: wrong arity");
  const int D = std::max(1, g.degree()) * algebra_step(*g.algebra());
  return interpolate(g.algebra(), g.filtration(), g.arity(), D, [&](const std::vector<long long>& n) {
    std::vector<long long> m = n;
    for (size_t a = 0; a < m.size(); ++a) m[a] += h[a];
    return g.eval<Rational>(m);
  });
}

PolySequence pointwise_product(const PolySequence& g, const PolySequence& h) {
  if (g.arity() != h.arity() || !(*g.algebra() == *h.algebra()))
    throw DomainError("pointwise_product: sequences live on different groups");
  const int D = std::max({1, g.degree(), h.degree()}) * algebra_step(*g.algebra());
  return interpolate(g.algebra(), g.filtration(), g.arity(), D,
                     [&](const std::vector<long long>& n) { return g.eval<Rational>(n) * h.eval<Rational>(n); });
}

PolySequence from_first_kind(const AlgebraPtr& algebra, const Filtration& F, const std::vector<VecQ>& x) {
  const int D = std::max(1, static_cast<int>(x.size()) - 1) * algebra_step(*algebra);
  return interpolate(algebra, F, 1, D, [&](const std::vector<long long>& n) { return exp_first_kind(algebra, x, n[0]); });
}

std::vector<VecQ> first_kind_coefficients(const PolySequence& g) {
  if (g.arity() != 1) throw DomainError("first_kind_coefficients: arity one required");
  const int E = std::max(1, g.degree()) * algebra_step(*g.algebra());
  std::vector<VecQ> values;
  for (int n = 0; n <= E; ++n) values.push_back(g(n).log());
  auto x = forward_differences(values);
  while (x.size() > 1 && all_zero(x.back())) x.pop_back();
  return x;
}

VecQ horizontal_coords(const Subspace& A, const Subspace& B, const VecQ& x) {
  if (!A.contains(x)) throw DomainError("horizontal_coords: vector outside G_(i,1)");
  const VecQ r = B.reduce(x);
  const auto& pb = B.pivots();
  std::vector<Rational> out;
  for (int p : A.pivots())
    if (std::find(pb.begin(), pb.end(), p) == pb.end()) out.push_back(r(p));
  VecQ v(static_cast<Eigen::Index>(out.size()));
  for (size_t k = 0; k < out.size(); ++k) v(static_cast<Eigen::Index>(k)) = out[k];
  return v;
}

VecQ horizontal_lift(const Subspace& A, const Subspace& B, const VecQ& coords) {
  VecQ v = VecQ::Zero(A.ambient_dim());
  const auto& pa = A.pivots();
  const auto& pb = B.pivots();
  Eigen::Index c = 0;
  for (size_t row = 0; row < pa.size(); ++row) {
    if (std::find(pb.begin(), pb.end(), pa[row]) != pb.end()) continue;
    if (c >= coords.size()) throw DomainError("horizontal_lift: too few coordinates");
    v += coords(c++) * A.basis_vector(static_cast<int>(row));
  }
  if (c != coords.size()) throw DomainError("horizontal_lift: too many coordinates");
  return v;
}

int horizontal_dim(const Filtration& F, int level) { return F.at(level, 1).dim() - F.at(level, 2).dim(); }

HorizontalElement taylor_coefficient(const PolySequence& g, int i) {
  if (g.arity() != 1) throw DomainError("taylor_coefficient: arity one required");
  const Filtration& F = g.filtration();
  if (F.kind() != IndexKind::DegreeRank) throw DomainError("taylor_coefficient: degree-rank filtration required");
  if (i < 1 || i > F.degree()) throw DomainError("taylor_coefficient: index beyond the filtration degree");
  return {i, horizontal_coords(F.at(i, 1), F.at(i, 2), g.coeff({i}))};
}

GradedTaylor graded_taylor(const PolySequence& g, const std::vector<int>& order) {
  if (g.arity() != 1) throw DomainError("graded_taylor: arity one required");
  const AlgebraPtr& L = g.algebra();
  const int d = L->dim();
  if (static_cast<int>(order.size()) != d) throw DomainError("graded_taylor: basis order has the wrong length");
  {
    std::vector<bool> seen(static_cast<size_t>(d), false);
    for (int p : order) {
      if (p < 0 || p >= d || seen[static_cast<size_t>(p)]) throw DomainError("graded_taylor: order is not a permutation");
      seen[static_cast<size_t>(p)] = true;
    }
  }
  const int top = std::max(g.filtration().degree(), 0) + 1;
  for (int i = 0; i <= top; ++i) {
    const Subspace Gi = degree_level(g.filtration(), i);
    std::vector<int> tail(order.end() - Gi.dim(), order.end());
    if (Subspace::coordinate(d, tail) != Gi) throw DomainError("graded_taylor: basis not adapted to the filtration");
  }

  const int E = std::max(1, g.degree()) * algebra_step(*L);
  std::vector<ElementQ> h;
  for (int n = 0; n <= E; ++n) h.push_back(g(n));
  GradedTaylor out{order, {}};
  for (int ell = 0; ell <= E; ++ell) {
    std::vector<VecQ> logs;
    for (const auto& x : h) logs.push_back(x.log());
    auto mono = binomial_to_monomial(forward_differences(logs));
    for (int m = 0; m < ell; ++m)
      if (!all_zero(mono[static_cast<size_t>(m)]))
        throw InvariantFailure("polyseq", "stripping left a low-degree term behind");
    const VecQ top_coeff = Rational(factorial(ell)) * mono[static_cast<size_t>(ell)];
    if (!degree_level(g.filtration(), ell).contains(top_coeff))
      throw InvariantFailure("polyseq", "graded coefficient outside G_" + std::to_string(ell));
    VecQ alpha(d);
    if (ell == 0) {
      // A product of exponentials of the basis elements differs from the exponential of
      // the sum by brackets of the same (zero) degree, so the constant term is read in
      // coordinates of the second kind instead.
      alpha = coords_second_kind(h[0], order);
    } else {
      for (int j = 0; j < d; ++j) alpha(j) = top_coeff(order[static_cast<size_t>(j)]);
    }
    out.alpha.push_back(alpha);
    const Rational inv_fact = Rational(1) / Rational(factorial(ell));
    for (int n = 0; n <= E; ++n) {
      Rational scale = inv_fact;
      for (int e = 0; e < ell; ++e) scale *= n;
      auto P = ElementQ::identity(L);
      for (int j = 0; j < d; ++j) {
        if (alpha(j).is_zero()) continue;
        VecQ v = VecQ::Zero(d);
        v(order[static_cast<size_t>(j)]) = alpha(j) * scale;
        P = P * ElementQ(L, v);
      }
      h[static_cast<size_t>(n)] = P.inverse() * h[static_cast<size_t>(n)];
    }
  }
  for (const auto& x : h)
    if (!x.is_identity()) throw InvariantFailure("polyseq", "stripping did not terminate at the identity");
  while (out.alpha.size() > 1 && all_zero(out.alpha.back())) out.alpha.pop_back();
  return out;
}

ElementQ eval_graded(const AlgebraPtr& algebra, const GradedTaylor& t, long long n) {
  auto out = ElementQ::identity(algebra);
  const int d = algebra->dim();
  for (size_t i = 0; i < t.alpha.size(); ++i) {
    Rational scale = Rational(1) / Rational(factorial(static_cast<int>(i)));
    for (size_t e = 0; e < i; ++e) scale *= Rational(n);
    for (int j = 0; j < d; ++j) {
      if (t.alpha[i](j).is_zero()) continue;
      VecQ v = VecQ::Zero(d);
      v(t.order[static_cast<size_t>(j)]) = t.alpha[i](j) * scale;
      out = out * ElementQ(algebra, v);
    }
  }
  return out;
}

RealPolynomial from_monomial(int arity, const std::map<MultiIndex, double, IndexOrder>& monomial) {
  int K = 0;
  for (const auto& [m, c] : monomial)
    for (int x : m) K = std::max(K, x);
  auto S = stirling2(K);
  RealPolynomial out{arity, {}};
  for (const auto& [m, c] : monomial) {
    if (static_cast<int>(m.size()) != arity) throw DomainError("from_monomial: wrong arity");
    // n^m = sum_l prod_a S(m_a, l_a) l_a! C(n_a, l_a).
    std::vector<MultiIndex> ls{MultiIndex{}};
    std::vector<double> ws{1.0};
    for (int a = 0; a < arity; ++a) {
      std::vector<MultiIndex> nl;
      std::vector<double> nw;
      for (size_t t = 0; t < ls.size(); ++t)
        for (int l = 0; l <= m[static_cast<size_t>(a)]; ++l) {
          const double s = S[static_cast<size_t>(m[static_cast<size_t>(a)])][static_cast<size_t>(l)];
          if (s == 0.0) continue;
          MultiIndex idx = ls[t];
          idx.push_back(l);
          nl.push_back(idx);
          nw.push_back(ws[t] * s * factorial(l).convert_to<double>());
        }
      ls = std::move(nl);
      ws = std::move(nw);
    }
    for (size_t t = 0; t < ls.size(); ++t) out.coeffs[ls[t]] += c * ws[t];
  }
  return out;
}

double smoothness_norm(const RealPolynomial& p, double N) {
  double best = 0.0;
  for (const auto& [l, a] : p.coeffs) {
    const int deg = total_degree(l);
    if (deg == 0) continue;
    best = std::max(best, std::pow(N, deg) * std::abs(a - std::nearbyint(a)));
  }
  return best;
}

namespace {

/// int part of x for the fractional part {x} in (-1/2, 1/2].
Integer int_part(const Rational& x) { return ceil_int(x - Rational(1, 2)); }

Rational dist_to_Z(const Rational& x) {
  Rational f = x - Rational(int_part(x));
  return f < 0 ? Rational(-f) : f;
}

}  // namespace

LinearDecomposition linear_decompose(const std::vector<VecQ>& vectors, const VecQ& w, const Rational& delta) {
  const int d = static_cast<int>(w.size());
  LinearDecomposition out{VecQ::Zero(d), VecQ::Zero(d), w, {}, {}, Rational(0), Integer(1)};
  Rational worst = -1;
  int worst_i = -1;
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) throw DomainError("linear_decompose: vector length mismatch");
    for (int a = 0; a < d; ++a)
      if (!is_integer(vectors[i](a))) throw DomainError("linear_decompose: vectors must be integral");
    const Rational dist = dist_to_Z(vectors[i].dot(w));
    if (dist > worst) {
      worst = dist;
      worst_i = static_cast<int>(i);
    }
  }
  if (worst > delta)
    throw DomainError("linear_decompose: dist(v_" + std::to_string(worst_i) + " . w, Z) = " + format_rational(worst) +
                      " exceeds delta");
  SpanBuilder span(d);
  for (size_t i = 0; i < vectors.size(); ++i)
    if (span.add(vectors[i])) out.independent.push_back(static_cast<int>(i));
  const int l = static_cast<int>(out.independent.size());
  if (l == 0) return out;
  MatQ V(l, d);
  for (int r = 0; r < l; ++r) V.row(r) = vectors[static_cast<size_t>(out.independent[static_cast<size_t>(r)])].transpose();
  MatQ echelon = V;
  const std::vector<int> pivots = rref_in_place(echelon);
  MatQ VP(l, l);
  for (int c = 0; c < l; ++c) VP.col(c) = V.col(pivots[static_cast<size_t>(c)]);
  for (int j = 0; j < l; ++j) {
    VecQ e = VecQ::Zero(l);
    e(j) = 1;
    auto x = solve(VP, e);
    if (!x) throw InvariantFailure("polyseq", "pivot minor is singular");
    VecQ wj = VecQ::Zero(d);
    Rational norm = 0;
    for (int c = 0; c < l; ++c) {
      wj(pivots[static_cast<size_t>(c)]) = (*x)(c);
      Rational a = (*x)(c) < 0 ? Rational(-(*x)(c)) : (*x)(c);
      if (a > norm) norm = a;
    }
    out.duals.push_back(wj);
    out.factor += norm;
    const Rational dot = V.row(j).dot(w.transpose());
    const Integer n = int_part(dot);
    out.w_rat += Rational(n) * wj;
    out.w_small += (dot - Rational(n)) * wj;
  }
  out.w_perp = w - out.w_small - out.w_rat;
  out.denominator = lcm_denominators(out.w_rat);
  for (const auto& v : vectors)
    if (!v.dot(out.w_perp).is_zero()) throw InvariantFailure("polyseq", "w_perp is not annihilated");
  return out;
}

double log_distance(const ElementD& x, const ElementD& y) { return (x * y.inverse()).log().cwiseAbs().maxCoeff(); }

FactorResult factor_by_characters(const PolySequence& g, const std::vector<HorizontalFunctional>& chars, long long N,
                                  const MetricFn& metric) {
  if (g.arity() != 1) throw DomainError("factor: arity one required");
  if (N < 1) throw DomainError("factor: N must be positive");
  const Filtration& F = g.filtration();
  if (F.kind() != IndexKind::DegreeRank) throw DomainError("factor: degree-rank filtration required");
  if (!g.coeff({0}).isZero()) throw DomainError("factor: g(0) is not the identity");
  const AlgebraPtr& L = g.algebra();
  const int d = L->dim();

  Rational H = 1;
  for (size_t c = 0; c < chars.size(); ++c) {
    const auto& ch = chars[c];
    if (ch.level < 1 || ch.level > F.degree())
      throw DomainError("factor: character " + std::to_string(c) + " has a level outside the filtration");
    if (ch.k.size() != horizontal_dim(F, ch.level))
      throw DomainError("factor: character " + std::to_string(c) + " does not match the horizontal torus");
    for (Eigen::Index a = 0; a < ch.k.size(); ++a)
      if (!is_integer(ch.k(a)))
        throw DomainError("factor: character " + std::to_string(c) + " is not integral on the lattice");
    const Rational h = Rational(height(ch.k));
    if (h > H) H = h;
  }

  std::vector<VecQ> x = first_kind_coefficients(g);
  std::vector<VecQ> xs(x.size(), VecQ::Zero(d)), xr(x.size(), VecQ::Zero(d));
  std::map<int, std::vector<VecQ>> by_level;
  for (const auto& ch : chars) by_level[ch.level].push_back(ch.k);
  for (const auto& [i, ks] : by_level) {
    const Subspace A = F.at(i, 1), B = F.at(i, 2);
    const VecQ xi = static_cast<size_t>(i) < x.size() ? x[static_cast<size_t>(i)] : VecQ(VecQ::Zero(d));
    if (!A.contains(xi)) throw InvariantFailure("polyseq", "first-kind coefficient outside G_(i,1)");
    const VecQ w = horizontal_coords(A, B, xi);
    Rational bound = H;
    for (int e = 0; e < i; ++e) bound /= Rational(N);
    Rational delta = 0;
    for (size_t c = 0; c < ks.size(); ++c) {
      const Rational dist = dist_to_Z(ks[c].dot(w));
      if (dist > bound)
        throw DomainError("factor: character " + std::to_string(c) + " at level " + std::to_string(i) +
                          " has dist(psi(Taylor), Z) above H N^-i");
      if (dist > delta) delta = dist;
    }
    auto dec = linear_decompose(ks, w, delta);
    if (static_cast<size_t>(i) >= x.size()) {
      xs.resize(static_cast<size_t>(i) + 1, VecQ::Zero(d));
      xr.resize(static_cast<size_t>(i) + 1, VecQ::Zero(d));
    }
    xs[static_cast<size_t>(i)] = horizontal_lift(A, B, dec.w_small);
    xr[static_cast<size_t>(i)] = horizontal_lift(A, B, dec.w_rat);
  }

  FactorResult out;
  out.epsilon = from_first_kind(L, F, xs);
  out.gamma = from_first_kind(L, F, xr);
  const int D = std::max({1, g.degree(), static_cast<int>(x.size()) - 1}) * algebra_step(*L);
  out.g_prime = interpolate(L, F, 1, D, [&](const std::vector<long long>& n) {
    return out.epsilon.eval<Rational>(n).inverse() * g.eval<Rational>(n) * out.gamma.eval<Rational>(n).inverse();
  });

  const long long upto = std::min<long long>(N, 64);
  for (long long n = 0; n <= upto; ++n) {
    if (out.epsilon(n) * out.g_prime(n) * out.gamma(n) != g(n))
      throw InvariantFailure("polyseq", "factorization identity fails at n = " + std::to_string(n));
    ++out.verified_points;
  }
  if (!out.epsilon(0).is_identity() || !out.g_prime(0).is_identity() || !out.gamma(0).is_identity())
    throw InvariantFailure("polyseq", "a factor is not the identity at 0");
  for (const auto& ch : chars)
    if (!ch.k.dot(taylor_coefficient(out.g_prime, ch.level).coords).is_zero())
      throw InvariantFailure("polyseq", "character does not vanish on Taylor coefficient of g'");

  out.gamma_denominator = 1;
  for (const auto& v : xr) {
    const Integer den = lcm_denominators(v);
    out.gamma_denominator = out.gamma_denominator / boost::multiprecision::gcd(out.gamma_denominator, den) * den;
  }

  std::vector<VecD> xsd;
  for (const auto& v : xs) xsd.push_back(to_double(v));
  auto eps_d = [&](long long n) {
    VecD v = VecD::Zero(d);
    for (size_t k = 0; k < xsd.size(); ++k) v += binomial(Integer(n), static_cast<int>(k)).convert_to<double>() * xsd[k];
    return ElementD(L, v);
  };
  const long long count = std::min<long long>(N, 4096);
  double worst = 0.0;
  for (long long t = 0; t < count; ++t) {
    const long long n = count == 1 ? 1 : 1 + (t * (N - 1)) / (count - 1);
    worst = std::max(worst, metric(eps_d(n), eps_d(n - 1)));
    ++out.samples;
  }
  out.smoothness_constant = worst * static_cast<double>(N);
  return out;
}

}  // namespace nilkit
