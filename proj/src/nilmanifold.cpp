#include "nilkit/nilmanifold.hpp"

#include "nilkit/errors.hpp"
#include "nilkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace nilkit {

namespace {

std::complex<double> e_of(double theta) {
  const double a = 2.0 * std::numbers::pi * theta;
  return {std::cos(a), std::sin(a)};
}

Rational random_small_rational(SplitMix64& rng) {
  return Rational(rng.uniform_int(-6, 6)) / Rational(rng.uniform_int(1, 4));
}

Filtration as_degree(const Filtration& F) {
  if (F.kind() == IndexKind::Degree) return F;
  if (F.kind() == IndexKind::DegreeRank) return associated_degree(F);
  throw DomainError("Nilmanifold: multidegree filtrations are not supported here");
}

}  // namespace

Nilmanifold::Nilmanifold(AlgebraPtr algebra, Filtration filtration, std::vector<int> order)
    : algebra_(std::move(algebra)), filtration_(as_degree(filtration)), order_(std::move(order)) {
  if (!algebra_) throw DomainError("Nilmanifold: null algebra");
  const int d = algebra_->dim();
  if (static_cast<int>(order_.size()) != d) throw DomainError("Nilmanifold: basis order has the wrong length");
  std::vector<bool> seen(d, false);
  for (int p : order_) {
    if (p < 0 || p >= d || seen[p]) throw DomainError("Nilmanifold: basis order is not a permutation");
    seen[p] = true;
  }
  if (!validate_filtration(filtration_).passed()) throw DomainError("Nilmanifold: filtration fails validation");
  if (filtration_.at_degree(1) != Subspace::full(d))
    throw DomainError("Nilmanifold: filtration must start with G_1 = G");

  const int s = std::max(1, filtration_.degree());
  block_start_.clear();
  for (int m = 1; m <= s + 1; ++m) {
    const Subspace Gm = filtration_.at_degree(m);
    const int start = d - Gm.dim();
    std::vector<int> tail(order_.begin() + start, order_.end());
    if (Subspace::coordinate(d, tail) != Gm) {
      std::ostringstream os;
      os << "Nilmanifold: basis is not adapted to G_" << m;
      throw DomainError(os.str());
    }
    block_start_.push_back(start);
  }
  if (!tails_are_ideals(*algebra_, order_)) throw DomainError("Nilmanifold: a tail of the basis is not an ideal");

  height_ = 0;
  for (const auto& sc : algebra_->constants()) height_ = std::max(height_, Rational(height(sc.c)));

  // Lattice closure on sampled integer points, plus all pairs of basis generators.
  SplitMix64 rng(0x6c617474696365ULL);
  auto check = [&](const ElementQ& g, const ElementQ& h) {
    if (!is_lattice_point(g * h) || !is_lattice_point(g.inverse()))
      throw DomainError("Nilmanifold: psi^{-1}(Z^d) is not closed under multiplication");
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) check(basis_power<Rational>(i, Rational(1)), basis_power<Rational>(j, Rational(-1)));
  for (int trial = 0; trial < 48; ++trial) {
    VecQ a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a(i) = Rational(rng.uniform_int(-3, 3));
      b(i) = Rational(rng.uniform_int(-3, 3));
    }
    check(from_psi(a), from_psi(b));
  }
}

bool Nilmanifold::is_lattice_point(const ElementQ& g) const {
  const VecQ u = psi(g);
  for (int i = 0; i < u.size(); ++i)
    if (!is_integer(u(i))) return false;
  return true;
}

std::pair<int, int> Nilmanifold::block(int m) const {
  const int s = degree();
  if (m < 1 || m > s) return {dim(), dim()};
  return {block_start_[m - 1], block_start_[m]};
}

Nilmanifold Nilmanifold::standard(const AlgebraPtr& algebra) {
  Filtration F = lower_central_filtration(algebra);
  const int d = algebra->dim();
  const int s = std::max(1, F.degree());
  std::vector<int> level(d, 1);
  for (int m = 2; m <= s; ++m) {
    const Subspace Gm = F.at_degree(m);
    for (int i = 0; i < d; ++i)
      if (Gm.contains(algebra->basis_vector(i))) level[i] = m;
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return level[a] < level[b]; });
  return Nilmanifold(algebra, F, order);
}

Nilmanifold Nilmanifold::torus(int d) {
  AlgebraPtr L = algebras::abelian(d);
  Filtration F = degree_filtration(L, {Subspace::full(d), Subspace::full(d)});
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  return Nilmanifold(L, F, order);
}

double metric_upper(const ElementD& x, const ElementD& y, const Nilmanifold& M, int refinement) {
  double best = metric_basic(x, y, M);
  const VecD ux = M.psi(x);
  const VecD uy = M.psi(y);
  for (int r = 1; r <= refinement; ++r) {
    double cost = 0;
    ElementD prev = x;
    for (int step = 1; step <= r + 1; ++step) {
      const double lambda = static_cast<double>(step) / (r + 1);
      ElementD next = (step == r + 1) ? y : M.from_psi(VecD((1 - lambda) * ux + lambda * uy));
      cost += metric_basic(prev, next, M);
      prev = next;
    }
    best = std::min(best, cost);
  }
  return best;
}

HorizontalCheck validate_horizontal(const VecQ& k, const Nilmanifold& M, int pairs, std::uint64_t seed) {
  const int d = M.dim();
  if (k.size() != d) throw DomainError("validate_horizontal: character length does not match the manifold");
  HorizontalCheck out;
  out.size = 0;
  for (int i = 0; i < d; ++i) {
    if (!is_integer(k(i))) throw DomainError("validate_horizontal: character must be an integer vector");
    Integer a = abs(numerator(k(i)));
    if (a > out.size) out.size = a;
  }
  SplitMix64 rng(seed);
  auto test = [&](const VecQ& ua, const VecQ& ub) {
    ++out.pairs_checked;
    const ElementQ a = M.from_psi(ua);
    const ElementQ b = M.from_psi(ub);
    const Rational lhs = horizontal_value(k, M, ElementQ(a * b));
    const Rational rhs = horizontal_value(k, M, a) + horizontal_value(k, M, b);
    if (lhs != rhs) {
      out.witness_a = ua;
      out.witness_b = ub;
      return false;
    }
    return true;
  };
  // Pairs of basis directions first: they expose every commutator cross term.
  for (int i = 0; i < d && out.pairs_checked < pairs; ++i)
    for (int j = 0; j < d && out.pairs_checked < pairs; ++j) {
      VecQ a = VecQ::Zero(d), b = VecQ::Zero(d);
      a(j) = 1;
      b(i) = 1;
      if (!test(a, b)) return out;
    }
  while (out.pairs_checked < pairs) {
    VecQ a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a(i) = random_small_rational(rng);
      b(i) = random_small_rational(rng);
    }
    if (!test(a, b)) return out;
  }
  out.valid = true;
  return out;
}

VerticalCharacter bottom_vertical_character(const Nilmanifold& M, const VecQ& xi) {
  const auto [b, e] = M.block(M.degree());
  std::vector<int> tail(M.order().begin() + b, M.order().begin() + e);
  VerticalCharacter eta{Subspace::coordinate(M.dim(), tail), xi};
  validate_vertical(eta, M);
  return eta;
}

void validate_vertical(const VerticalCharacter& eta, const Nilmanifold& M) {
  const auto [b, e] = M.block(M.degree());
  const LieAlgebra& L = *M.algebra();
  if (eta.T != M.filtration().at_degree(M.degree()))
    throw DomainError("vertical character: T must be the bottom filtration group");
  for (const VecQ& v : eta.T.basis_vectors())
    for (int i = 0; i < L.dim(); ++i)
      if (!L.bracket<Rational>(v, L.basis_vector(i)).isZero())
        throw DomainError("vertical character: T is not central");
  if (eta.xi.size() != e - b) throw DomainError("vertical character: xi has the wrong length");
  for (int i = 0; i < eta.xi.size(); ++i)
    if (!is_integer(eta.xi(i))) throw DomainError("vertical character: xi must be integral");
}

double vertical_value(const VerticalCharacter& eta, const Nilmanifold& M, const ElementD& g) {
  const auto [b, e] = M.block(M.degree());
  const VecD u = M.psi(g);
  double out = 0;
  for (int i = b; i < e; ++i) out += to_double(eta.xi(i - b)) * u(i);
  return out;
}

double torus_bump(int k, int t, double x) {
  double y = x - static_cast<double>(t) / (2.0 * k);
  y -= std::floor(y);
  if (y > 1.0 / k) return 0.0;
  return std::sin(std::numbers::pi * k * y);
}

std::vector<std::pair<int, double>> torus_bumps_at(int k, double x) {
  const double f = x - std::floor(x);
  const int c = std::min(2 * k - 1, static_cast<int>(std::floor(2.0 * k * f)));
  std::vector<std::pair<int, double>> out;
  for (int t : {c, (c + 2 * k - 1) % (2 * k)}) {
    if (!out.empty() && out.front().first == t) continue;
    const double v = torus_bump(k, t, f);
    if (v != 0.0) out.emplace_back(t, v);
  }
  return out;
}

PartitionOfUnity::PartitionOfUnity(const Nilmanifold& M, double epsilon, int levels)
    : M_(M), epsilon_(epsilon), levels_(levels) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("partition_of_unity: epsilon must lie in (0, 1/2)");
  if (levels < 0 || levels > M.degree()) throw DomainError("partition_of_unity: level count out of range");
  k_ = static_cast<int>(std::ceil(1.0 / (2.0 * epsilon) - 1e-12));
  covered_ = levels == 0 ? 0 : M.block(levels).second;
}

long long PartitionOfUnity::size() const {
  long long out = 1;
  for (int i = 0; i < covered_; ++i) {
    if (out > (1LL << 62) / (2 * k_)) throw CapExceeded("partition of unity index count exceeds 2^62");
    out *= 2 * k_;
  }
  return out;
}

long long PartitionOfUnity::index_of(const std::vector<int>& t) const {
  long long idx = 0;
  for (int i = covered_ - 1; i >= 0; --i) idx = idx * (2 * k_) + t[i];
  return idx;
}

std::vector<double> PartitionOfUnity::beta(const std::vector<int>& t) const {
  std::vector<double> out(t.size());
  for (size_t i = 0; i < t.size(); ++i) out[i] = (t[i] + 1.0) / (2.0 * k_);
  return out;
}

void PartitionOfUnity::visit(int m, std::vector<int>& t, double acc, const ElementD& x,
                             std::vector<Term>& out) const {
  if (m > levels_) {
    out.push_back(Term{t, acc, x});
    return;
  }
  const auto [b, e] = M_.block(m);
  const VecD u = M_.psi(x);
  std::vector<std::vector<std::pair<int, double>>> choices;
  for (int i = b; i < e; ++i) choices.push_back(torus_bumps_at(k_, u(i)));
  // Walk the cartesian product of the per-coordinate choices.
  std::vector<size_t> pick(e - b, 0);
  for (;;) {
    double value = acc;
    std::vector<double> lower(M_.dim(), 0.0);
    for (int i = b; i < e; ++i) {
      const auto& [ti, vi] = choices[i - b][pick[i - b]];
      t[i] = ti;
      value *= vi;
      lower[i] = (ti + 1.0) / (2.0 * k_) - 0.5;
    }
    visit(m + 1, t, value, reduce_to_box(x, M_, lower, b, e), out);
    int pos = 0;
    while (pos < e - b && ++pick[pos] == choices[pos].size()) pick[pos++] = 0;
    if (pos == e - b) break;
  }
}

std::vector<PartitionOfUnity::Term> PartitionOfUnity::terms(const ElementD& g) const {
  std::vector<Term> out;
  std::vector<int> t(covered_, 0);
  visit(1, t, 1.0, g, out);
  return out;
}

double PartitionOfUnity::value(const std::vector<int>& t, const ElementD& g) const {
  for (const Term& term : terms(g))
    if (term.t == t) return term.value;
  return 0.0;
}

PartitionOfUnity partition_of_unity(const Nilmanifold& M, double epsilon) {
  return PartitionOfUnity(M, epsilon, M.degree());
}

Nilcharacter::Nilcharacter(const Nilmanifold& M, VerticalCharacter eta, double epsilon)
    : M_(M), eta_(std::move(eta)), partition_(M, epsilon, M.degree() - 1) {
  validate_vertical(eta_, M_);
  xi_d_ = to_double(eta_.xi);
}

std::vector<std::pair<long long, std::complex<double>>> Nilcharacter::evaluate_sparse(const ElementD& g) const {
  const auto [b, e] = M_.block(M_.degree());
  std::vector<std::pair<long long, std::complex<double>>> out;
  for (const auto& term : partition_.terms(g)) {
    const VecD u = M_.psi(term.representative);
    double phase = 0;
    for (int i = b; i < e; ++i) phase += xi_d_(i - b) * u(i);
    out.emplace_back(partition_.index_of(term.t), term.value * e_of(phase));
  }
  return out;
}

std::vector<std::complex<double>> Nilcharacter::evaluate(const ElementD& g) const {
  const long long D = output_dim();
  if (D > (1LL << 20)) throw CapExceeded("nilcharacter output dimension exceeds 2^20 for dense evaluation");
  std::vector<std::complex<double>> out(static_cast<size_t>(D), {0.0, 0.0});
  for (const auto& [idx, v] : evaluate_sparse(g)) out[static_cast<size_t>(idx)] += v;
  return out;
}

Nilcharacter make_nilcharacter(const Nilmanifold& M, const VerticalCharacter& eta, double epsilon) {
  return Nilcharacter(M, eta, epsilon);
}

std::complex<double> eval_nilsequence(const NilFunction& F, const Nilmanifold& M, const PolySequence& g,
                                      long long n) {
  const ElementQ x = g.eval<Rational>({n});
  const auto red = reduce_to_fundamental(x, M);
  return F(ElementD(M.algebra(), to_double(red.frac.log())));
}

NilFunction vertical_phase_function(const Nilmanifold& M, const VecQ& xi) {
  const auto [b, e] = M.block(M.degree());
  if (xi.size() != e - b) throw DomainError("vertical_phase_function: xi has the wrong length");
  const VecD xd = to_double(xi);
  return [M, xd, b = b, e = e](const ElementD& x) {
    const VecD u = M.psi(x);
    double phase = 0;
    for (int i = b; i < e; ++i) phase += xd(i - b) * u(i);
    return e_of(phase);
  };
}

namespace {

// Multi-indices i ∈ N^d with |i| ≤ D, in graded order.
void enumerate_indices(int d, int D, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(d, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
    cur[pos] = 0;
  };
  rec(0, D);
}

// Coefficients of p in the basis Π_a C(z_a, i_a), from the values p(Q i).
std::vector<VecQ> binomial_coefficients(const Nilmanifold& M, const std::vector<std::vector<int>>& grid,
                                        const Integer& Q) {
  const int d = M.dim();
  std::map<std::vector<int>, VecQ> values;
  for (const auto& i : grid) {
    VecQ z(d);
    for (int a = 0; a < d; ++a) z(M.order()[a]) = Rational(Q * i[a]);
    values[i] = M.psi(ElementQ(M.algebra(), z));
  }
  std::vector<VecQ> out;
  for (const auto& i : grid) {
    VecQ acc = VecQ::Zero(d);
    for (const auto& j : grid) {
      bool below = true;
      for (int a = 0; a < d && below; ++a) below = j[a] <= i[a];
      if (!below) continue;
      Rational c = 1;
      int sign = 0;
      for (int a = 0; a < d; ++a) {
        c *= Rational(binomial(Integer(i[a]), j[a]));
        sign += i[a] - j[a];
      }
      if (sign % 2) c = -c;
      acc += c * values.at(j);
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace

Integer divisibility_constant(const Nilmanifold& M) {
  const int d = M.dim();
  const int D = std::max(1, M.algebra()->step());
  std::vector<std::vector<int>> grid;
  enumerate_indices(d, D + 1, grid);
  auto coeffs = binomial_coefficients(M, grid, Integer(1));
  Integer bound = 1;
  for (size_t n = 0; n < grid.size(); ++n) {
    int total = 0;
    Integer fact = 1;
    for (int a = 0; a < d; ++a) {
      total += grid[n][a];
      for (int v = 2; v <= grid[n][a]; ++v) fact *= v;
    }
    if (total == D + 1) {
      if (!coeffs[n].isZero())
        throw InvariantFailure("nilmanifold", "second-kind coordinates exceed the expected polynomial degree");
      continue;
    }
    bound = boost::multiprecision::lcm(bound, lcm_denominators(coeffs[n]) * fact);
  }
  grid.clear();
  enumerate_indices(d, D, grid);
  if (bound > 1000000) throw CapExceeded("divisibility_constant: search bound exceeds 10^6");
  for (Integer Q = 1; Q <= bound; ++Q) {
    bool ok = true;
    for (const VecQ& c : binomial_coefficients(M, grid, Q)) {
      for (int a = 0; a < d && ok; ++a) ok = is_integer(c(a));
      if (!ok) break;
    }
    if (ok) return Q;
  }
  throw InvariantFailure("nilmanifold", "no divisibility constant found below the monomial bound");
}

LipschitzEstimate estimate_lipschitz(const NilFunction& F, const Nilmanifold& M, int pairs, std::uint64_t seed,
                                     double scale) {
  SplitMix64 rng(seed);
  const int d = M.dim();
  LipschitzEstimate out;
  for (int p = 0; p < pairs; ++p) {
    VecD u(d), h(d);
    for (int i = 0; i < d; ++i) {
      u(i) = rng.uniform();
      h(i) = scale * (2.0 * rng.uniform() - 1.0);
    }
    const ElementD x = M.from_psi(u);
    const ElementD y = x * ElementD(M.algebra(), h);
    const double dist = metric_upper(x, y, M);
    const std::complex<double> fx = F(x);
    const std::complex<double> fy = F(reduce_to_fundamental(y, M).frac);
    out.sup_norm = std::max(out.sup_norm, std::abs(fx));
    if (dist > 0) out.max_quotient = std::max(out.max_quotient, std::abs(fx - fy) / dist);
    ++out.pairs;
  }
  return out;
}

Nilmanifold direct_product(const Nilmanifold& A, const Nilmanifold& B) {
  const int da = A.dim(), db = B.dim();
  std::vector<StructureConstant> constants = A.algebra()->constants();
  for (auto sc : B.algebra()->constants()) {
    sc.i += da;
    sc.j += da;
    sc.k += da;
    constants.push_back(sc);
  }
  const int step = std::max(A.algebra()->declared_step(), B.algebra()->declared_step());
  AlgebraPtr L = make_algebra(da + db, step, std::move(constants));
  const int s = std::max(A.degree(), B.degree());
  std::vector<int> order;
  std::vector<Subspace> groups{Subspace::full(da + db)};
  for (int m = 1; m <= s; ++m) {
    auto [ab, ae] = A.block(m);
    auto [bb, be] = B.block(m);
    for (int p = ab; p < ae; ++p) order.push_back(A.order()[p]);
    for (int p = bb; p < be; ++p) order.push_back(da + B.order()[p]);
  }
  for (int m = 1; m <= s + 1; ++m) {
    std::vector<int> idx;
    auto [ab, ae] = A.block(m);
    auto [bb, be] = B.block(m);
    for (int p = ab; p < A.dim(); ++p) idx.push_back(A.order()[p]);
    for (int p = bb; p < B.dim(); ++p) idx.push_back(da + B.order()[p]);
    (void)ae;
    (void)be;
    groups.push_back(Subspace::coordinate(da + db, idx));
  }
  return Nilmanifold(L, degree_filtration(L, groups), order);
}

}  // namespace nilkit
