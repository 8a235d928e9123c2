#include "nilkit/bracket.hpp"

#include "nilkit/errors.hpp"
#include "nilkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace nilkit {

namespace {

long long mod_floor(long long x, long long m) {
  const long long r = x % m;
  return r < 0 ? r + m : r;
}

long long mulmod(long long a, long long b, long long m) {
  const __int128 p = static_cast<__int128>(a) * static_cast<__int128>(b);
  long long r = static_cast<long long>(p % m);
  return r < 0 ? r + m : r;
}

// Residue r/m taken into (−½, ½] as the integer numerator.
long long centered(long long r, long long m) { return 2 * r > m ? r - m : r; }

}  // namespace

namespace {

// x = r + d with r integral and d ∈ (−½, ½]; both parts exact.
std::pair<double, double> split_nearest(double x) {
  double r = std::round(x);
  double d = x - r;
  if (d == -0.5) {
    d = 0.5;
    r -= 1.0;
  }
  return {r, d};
}

}  // namespace

double frac(double x, BracketConvention c) {
  const auto [r, d] = split_nearest(x);
  if (c == BracketConvention::Nearest || d >= 0) return d;
  // d + 1 can round up to 1 for tiny negative d.
  const double up = d + 1.0;
  return up < 1.0 ? up : std::nextafter(1.0, 0.0);
}

double int_part(double x, BracketConvention c) {
  const auto [r, d] = split_nearest(x);
  if (c == BracketConvention::Nearest || d >= 0) return r;
  return r - 1.0;
}

Rational frac(const Rational& x) { return x - Rational(int_part(x)); }

Integer int_part(const Rational& x) { return ceil_int(x - Rational(1, 2)); }

BracketExpr BracketExpr::linear(double coef, double offset) {
  BracketExpr e;
  e.op = Op::Linear;
  e.coef = coef;
  e.offset = offset;
  return e;
}

BracketExpr BracketExpr::sum(std::vector<BracketExpr> terms) {
  BracketExpr e;
  e.op = Op::Sum;
  e.args = std::move(terms);
  return e;
}

BracketExpr BracketExpr::mul(std::vector<BracketExpr> factors) {
  BracketExpr e;
  e.op = Op::Mul;
  e.args = std::move(factors);
  return e;
}

BracketExpr BracketExpr::frac_of(BracketExpr inner) {
  BracketExpr e;
  e.op = Op::Frac;
  e.args.push_back(std::move(inner));
  return e;
}

BracketExpr BracketExpr::int_of(BracketExpr inner) {
  BracketExpr e;
  e.op = Op::Int;
  e.args.push_back(std::move(inner));
  return e;
}

namespace {

int height(const BracketExpr& e) {
  int h = 0;
  for (const auto& a : e.args) h = std::max(h, height(a));
  return 1 + h;
}

}  // namespace

int BracketExpr::monomial_depth() const {
  if (op != Op::Sum) return height(*this);
  int d = 0;
  for (const auto& a : args) d = std::max(d, a.monomial_depth());
  return d;
}

double BracketExpr::argument(long long n, BracketConvention c) const {
  switch (op) {
    case Op::Linear:
      return coef * static_cast<double>(n) + offset;
    case Op::Sum: {
      double s = 0;
      for (const auto& a : args) s += a.argument(n, c);
      return s;
    }
    case Op::Mul: {
      double p = 1;
      for (const auto& a : args) p *= a.argument(n, c);
      return p;
    }
    case Op::Frac:
      return frac(args.at(0).argument(n, c), c);
    case Op::Int:
      return int_part(args.at(0).argument(n, c), c);
  }
  return 0;
}

std::complex<double> eval_bracket_phase(const BracketExpr& m, long long n, BracketConvention c) {
  if (m.monomial_depth() > kMaxBracketDepth)
    throw DomainError("bracket expression deeper than " + std::to_string(kMaxBracketDepth));
  const double t = m.argument(n, c);
  return e(t - std::floor(t));
}

Signal bracket_signal(const BracketExpr& m, long long N, BracketConvention c) {
  if (N < 1) throw DomainError("bracket signal needs N >= 1");
  std::vector<cd> v(static_cast<std::size_t>(N));
  for (long long n = 1; n <= N; ++n) v[static_cast<std::size_t>(n - 1)] = eval_bracket_phase(m, n, c);
  return Signal::interval(std::move(v));
}

// ---------------------------------------------------------------------------
// Bohr sets

void validate_bohr(const BohrSetSpec& B) {
  if (B.N < 1) throw DomainError("Bohr set modulus must be positive");
  if (B.S.empty()) throw DomainError("Bohr set needs at least one frequency");
  if (!(B.rho > 0.0 && B.rho <= 0.5)) throw DomainError("Bohr radius must lie in (0, 1/2]");
}

namespace {

long long bohr_threshold(const BohrSetSpec& B) {
  // Largest integer t with t / N ≤ ρ.
  const Rational r = from_double(B.rho) * Rational(B.N);
  return floor_int(r).convert_to<long long>();
}

bool contains_with(const BohrSetSpec& B, long long T, long long x) {
  for (long long s : B.S) {
    const long long r = mulmod(mod_floor(s, B.N), mod_floor(x, B.N), B.N);
    if (std::min(r, B.N - r) > T) return false;
  }
  return true;
}

}  // namespace

bool bohr_contains(const BohrSetSpec& B, long long x) {
  validate_bohr(B);
  return contains_with(B, bohr_threshold(B), x);
}

std::vector<long long> bohr_members(const BohrSetSpec& B) {
  validate_bohr(B);
  if (B.N > kMaxBohrModulus) throw CapExceeded("Bohr enumeration limited to N <= " + std::to_string(kMaxBohrModulus));
  const long long T = bohr_threshold(B);
  std::vector<long long> out;
  for (long long x = 0; x < B.N; ++x)
    if (contains_with(B, T, x)) out.push_back(x);
  return out;
}

VecQ bohr_phi(const std::vector<long long>& S, long long N, long long x) {
  if (N < 1) throw DomainError("modulus must be positive");
  VecQ phi(static_cast<Eigen::Index>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i) {
    const long long r = mulmod(mod_floor(S[i], N), mod_floor(x, N), N);
    phi(static_cast<Eigen::Index>(i)) = Rational(centered(r, N), N);
  }
  return phi;
}

// ---------------------------------------------------------------------------
// Freiman homomorphisms

namespace {

template <typename T>
FreimanCheck freiman_scan(const std::vector<long long>& A, const std::vector<T>& fv, int k,
                          const std::function<Rational(const T&)>& to_rational) {
  const std::size_t m = A.size();
  FreimanCheck out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  struct First {
    std::size_t slot;
    T fsum;
  };
  std::unordered_map<long long, First> first;
  std::vector<std::uint32_t> pool;
  while (true) {
    long long s = 0;
    T fs{};
    for (std::size_t i : idx) {
      s += A[i];
      fs += fv[i];
    }
    ++out.tuples_checked;
    auto it = first.find(s);
    if (it == first.end()) {
      first.emplace(s, First{pool.size(), fs});
      for (std::size_t i : idx) pool.push_back(static_cast<std::uint32_t>(i));
    } else if (!(it->second.fsum == fs)) {
      out.is_hom = false;
      for (int j = 0; j < k; ++j) {
        out.witness_a.push_back(A[pool[it->second.slot + static_cast<std::size_t>(j)]]);
        out.witness_b.push_back(A[idx[static_cast<std::size_t>(j)]]);
      }
      out.f_sum_a = to_rational(it->second.fsum);
      out.f_sum_b = to_rational(fs);
      return out;
    }
    // Next nondecreasing index tuple.
    int j = k - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == m - 1) --j;
    if (j < 0) break;
    const std::size_t v = idx[static_cast<std::size_t>(j)] + 1;
    for (int t = j; t < k; ++t) idx[static_cast<std::size_t>(t)] = v;
  }
  return out;
}

}  // namespace

FreimanCheck is_freiman_hom(const std::vector<long long>& A, const std::vector<Rational>& f_values, int k) {
  if (k < 2) throw DomainError("Freiman order k must be at least 2");
  if (A.size() != f_values.size()) throw DomainError("A and f must have the same length");
  if (A.empty()) throw DomainError("A must be nonempty");

  std::vector<std::size_t> perm(A.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return A[a] < A[b]; });
  std::vector<long long> As;
  std::vector<Rational> fs;
  for (std::size_t i : perm) {
    if (!As.empty() && As.back() == A[i]) throw DomainError("A contains a repeated element");
    As.push_back(A[i]);
    fs.push_back(f_values[i]);
  }
  const long long limit = std::numeric_limits<long long>::max() / (4 * static_cast<long long>(k));
  if (std::abs(As.front()) > limit || std::abs(As.back()) > limit) throw CapExceeded("elements of A too large");

  // Number of k-multisets, C(m + k − 1, k), with an early cap.
  {
    long double count = 1;
    const long double m = static_cast<long double>(As.size());
    for (int i = 1; i <= k; ++i) {
      count = count * (m + static_cast<long double>(i) - 1) / static_cast<long double>(i);
      if (count > static_cast<long double>(kMaxFreimanTuples))
        throw CapExceeded("more than " + std::to_string(kMaxFreimanTuples) + " k-multisets");
    }
  }

  // Integer fast path when f scales to machine integers.
  Integer D = 1;
  for (const auto& q : fs) {
    const Integer d = denominator(q);
    D = D / boost::multiprecision::gcd(D, d) * d;
  }
  const Integer bound = Integer(std::numeric_limits<long long>::max() / (4 * static_cast<long long>(k)));
  bool fits = true;
  std::vector<long long> scaled;
  for (const auto& q : fs) {
    const Integer v = numerator(q) * (D / denominator(q));
    if (abs(v) > bound) {
      fits = false;
      break;
    }
    scaled.push_back(v.convert_to<long long>());
  }
  if (fits) {
    const Rational Dq(D);
    return freiman_scan<long long>(As, scaled, k, [&](const long long& v) { return Rational(v) / Dq; });
  }
  return freiman_scan<Rational>(As, fs, k, [](const Rational& v) { return v; });
}

// ---------------------------------------------------------------------------
// Rounding

std::vector<VecD> round_to_lattice(const std::vector<VecD>& f, const VecD& eps) {
  for (Eigen::Index j = 0; j < eps.size(); ++j)
    if (!(eps(j) > 0.0) || !std::isfinite(eps(j))) throw DomainError("rounding steps must be positive and finite");
  std::vector<Rational> eq(static_cast<std::size_t>(eps.size()));
  for (Eigen::Index j = 0; j < eps.size(); ++j) eq[static_cast<std::size_t>(j)] = from_double(eps(j));
  const Rational half(1, 2);
  std::vector<VecD> out;
  out.reserve(f.size());
  for (const auto& v : f) {
    if (v.size() != eps.size()) throw DomainError("value dimension differs from the rounding vector");
    VecD r(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const Integer k = floor_int(from_double(v(j)) / eq[static_cast<std::size_t>(j)] + half);
      // k·ε_j as a correctly rounded product.
      r(j) = k.convert_to<double>() * eps(j);
    }
    out.push_back(std::move(r));
  }
  return out;
}

VecD quadruple_defect(const std::vector<VecD>& f, const std::array<std::size_t, 4>& q) {
  return (((f.at(q[0]) + f.at(q[1])) - f.at(q[2])) - f.at(q[3])).cwiseAbs();
}

// ---------------------------------------------------------------------------
// Bracket-linear models

void BracketLinearModel::validate() const {
  if (dim < 1) throw DomainError("model dimension must be positive");
  if (gamma.size() != dim) throw DomainError("gamma has the wrong dimension");
  if (!is_prime(N_prime)) throw DomainError("model modulus " + std::to_string(N_prime) + " is not prime");
  if (N > 0 && (N_prime < 100 * N || N_prime > 200 * N))
    throw DomainError("model modulus must lie in [100N, 200N]");
  for (const auto& t : terms) {
    if (t.a.size() != dim) throw DomainError("term coefficient has the wrong dimension");
    if (!is_integer(t.beta * Rational(N_prime))) throw DomainError("term frequency not in (1/N')Z");
  }
}

VecD BracketLinearModel::evaluate(long long h) const {
  VecD acc = VecD::Zero(dim);
  for (const auto& t : terms) {
    const long long p = mod_floor((t.beta * Rational(N_prime)).convert_to<long long>(), N_prime);
    const long long r = centered(mulmod(p, mod_floor(h, N_prime), N_prime), N_prime);
    const double phi = static_cast<double>(r) / static_cast<double>(N_prime);
    acc += t.a * phi;
  }
  return acc + gamma;
}

BracketLinearReport verify_bracket_linear(const BracketLinearModel& model, const std::vector<long long>& H,
                                          const std::vector<VecD>& f, const VecD& eps) {
  model.validate();
  if (H.size() != f.size()) throw DomainError("H and f must have the same length");
  if (eps.size() != model.dim) throw DomainError("tolerance has the wrong dimension");
  BracketLinearReport rep;
  rep.max_violation = VecD::Zero(model.dim);
  for (std::size_t i = 0; i < H.size(); ++i) {
    if (f[i].size() != model.dim) throw DomainError("value has the wrong dimension");
    const VecD res = f[i] - model.evaluate(H[i]);
    bool ok = true;
    for (int j = 0; j < model.dim; ++j) {
      const double dist = std::abs(frac(res(j)));
      rep.max_violation(j) = std::max(rep.max_violation(j), dist);
      if (dist > eps(j)) ok = false;
    }
    (ok ? rep.pass : rep.fail).push_back(H[i]);
  }
  return rep;
}

namespace {

struct Minimax {
  double center;
  double radius;
};

// Smallest arc of R/Z containing every t (each given in (−½, ½]).
Minimax minimax_arc(std::vector<double> t) {
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size();
  double best_gap = t.front() + 1.0 - t.back();
  Minimax m{(t.front() + t.back()) / 2, (t.back() - t.front()) / 2};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double gap = t[i + 1] - t[i];
    if (gap > best_gap) {
      best_gap = gap;
      m = {(t[i + 1] + t[i] + 1.0) / 2, (t[i] + 1.0 - t[i + 1]) / 2};
    }
  }
  return m;
}

}  // namespace

SingleFrequencyFit fit_single_frequency(const std::vector<double>& f, double a_step, double a_max) {
  const long long N = static_cast<long long>(f.size());
  if (N < 1) throw DomainError("fitter needs at least one value");
  if (N > kMaxFitterN) throw CapExceeded("single-frequency fitter limited to N <= " + std::to_string(kMaxFitterN));
  if (!(a_step > 0) || !(a_max >= 0)) throw DomainError("coefficient grid must have a positive step");
  const long long Np = next_prime(100 * N);
  const long long J = static_cast<long long>(std::floor(a_max / a_step + 1e-9));
  constexpr double kTie = 1e-12;

  SingleFrequencyFit best;
  best.N_prime = Np;
  best.violation = std::numeric_limits<double>::infinity();
  std::vector<double> phi(static_cast<std::size_t>(N)), res(static_cast<std::size_t>(N)), t(static_cast<std::size_t>(N));

  auto try_p = [&](long long p) {
    for (long long h = 1; h <= N; ++h)
      phi[static_cast<std::size_t>(h - 1)] =
          static_cast<double>(centered(mulmod(mod_floor(p, Np), h, Np), Np)) / static_cast<double>(Np);
    for (long long j = -J; j <= J; ++j) {
      const double a = static_cast<double>(j) * a_step;
      ++best.candidates;
      for (std::size_t i = 0; i < res.size(); ++i) res[i] = f[i] - a * phi[i];
      // Anchored spread bounds the minimax radius from below by half of it.
      const double cut = 2 * (best.violation + kTie);
      double spread = 0;
      bool pruned = false;
      for (std::size_t i = 0; i < res.size(); ++i) {
        t[i] = frac(res[i] - res[0]);
        spread = std::max(spread, std::abs(t[i]));
        if (spread > cut) {
          pruned = true;
          break;
        }
      }
      if (pruned) continue;
      const Minimax m = minimax_arc(t);
      const double gamma = frac(res[0] + m.center);
      double v = 0;
      for (double r : res) v = std::max(v, std::abs(frac(r - gamma)));
      if (v < best.violation - kTie) {
        best.violation = v;
        best.a = a;
        best.beta = Rational(p, Np);
        best.gamma = gamma;
        best.optima.clear();
      }
      if (v <= best.violation + kTie && best.optima.size() < kMaxFitOptima)
        best.optima.push_back({a, Rational(p, Np), gamma, v});
    }
  };
  try_p(0);
  for (long long q = 1; 2 * q <= Np; ++q) {
    try_p(q);
    if (2 * q != Np) try_p(-q);
  }
  const double floor_v = best.violation;
  std::erase_if(best.optima, [&](const FitCandidate& c) { return c.violation > floor_v + kTie; });
  return best;
}

// ---------------------------------------------------------------------------
// Generalized arithmetic progressions

GapCoordinates::GapCoordinates(ProperGAP P) : P_(std::move(P)) {
  const int dd = d();
  if (P_.N_prime < 2) throw DomainError("GAP modulus must be at least 2");
  if (dd < 1) throw DomainError("GAP needs at least one generator");
  if (static_cast<int>(P_.sides.size()) != dd) throw DomainError("GAP needs one side length per generator");
  if (P_.S.empty()) throw DomainError("GAP certificate needs a frequency set");
  long double box = 1;
  for (long long n : P_.sides) {
    if (n < 0) throw DomainError("GAP side lengths must be nonnegative");
    box *= static_cast<long double>(2 * n + 1);
  }
  if (box > static_cast<long double>(kMaxGapBox)) throw CapExceeded("GAP box too large to enumerate");

  const Eigen::Index s = static_cast<Eigen::Index>(P_.S.size());
  MatQ M(s, dd);
  for (int j = 0; j < dd; ++j) M.col(j) = bohr_phi(P_.S, P_.N_prime, P_.generators[static_cast<std::size_t>(j)]);
  if (rank(M) != dd) throw DomainError("GAP certificate is rank deficient: the vectors Phi(l_i) are dependent");
  const MatQ Mt = M.transpose();
  U_ = MatQ::Zero(dd, s);
  for (int i = 0; i < dd; ++i) {
    VecQ ei = VecQ::Zero(dd);
    ei(i) = 1;
    auto u = solve(Mt, ei);
    if (!u) throw DomainError("GAP certificate admits no dual vectors");
    U_.row(i) = u->transpose();
  }

  std::unordered_map<long long, std::size_t> seen;
  std::size_t count = 0;
  for (const auto& [x, n] : enumerate()) {
    if (!seen.emplace(x, count++).second) throw DomainError("GAP is not proper: element " + std::to_string(x) + " repeats");
    VecQ nq(dd);
    for (int i = 0; i < dd; ++i) nq(i) = Rational(n[static_cast<std::size_t>(i)]);
    if (bohr_phi(P_.S, P_.N_prime, x) != M * nq)
      throw DomainError("Phi is not additive on the GAP at element " + std::to_string(x) +
                        " (outside the Bohr containment)");
  }
}

long long GapCoordinates::element(const std::vector<long long>& n) const {
  long long x = 0;
  for (std::size_t i = 0; i < n.size(); ++i)
    x = mod_floor(x + mulmod(mod_floor(P_.generators[i], P_.N_prime), mod_floor(n[i], P_.N_prime), P_.N_prime),
                  P_.N_prime);
  return x;
}

std::optional<std::vector<long long>> GapCoordinates::coordinates(long long x) const {
  const long long xm = mod_floor(x, P_.N_prime);
  const VecQ c = U_ * bohr_phi(P_.S, P_.N_prime, xm);
  std::vector<long long> n;
  for (int i = 0; i < d(); ++i) {
    if (!is_integer(c(i))) return std::nullopt;
    const Integer v = numerator(c(i));
    if (abs(v) > Integer(P_.sides[static_cast<std::size_t>(i)])) return std::nullopt;
    n.push_back(v.convert_to<long long>());
  }
  if (element(n) != xm) return std::nullopt;
  return n;
}

std::vector<std::pair<long long, std::vector<long long>>> GapCoordinates::enumerate() const {
  std::vector<std::pair<long long, std::vector<long long>>> out;
  std::vector<long long> n(P_.sides.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = -P_.sides[i];
  while (true) {
    out.emplace_back(element(n), n);
    int i = d() - 1;
    while (i >= 0 && n[static_cast<std::size_t>(i)] == P_.sides[static_cast<std::size_t>(i)]) {
      n[static_cast<std::size_t>(i)] = -P_.sides[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
    ++n[static_cast<std::size_t>(i)];
  }
  return out;
}

BracketLinearModel GapCoordinates::freiman_model(const VecD& f0, const std::vector<VecD>& f_generators) const {
  if (static_cast<int>(f_generators.size()) != d()) throw DomainError("need one value per generator");
  BracketLinearModel m;
  m.dim = static_cast<int>(f0.size());
  m.gamma = f0;
  m.N_prime = P_.N_prime;
  for (std::size_t a = 0; a < P_.S.size(); ++a) {
    VecD coef = VecD::Zero(m.dim);
    for (int i = 0; i < d(); ++i)
      coef += (f_generators[static_cast<std::size_t>(i)] - f0) * to_double(U_(i, static_cast<Eigen::Index>(a)));
    m.terms.push_back({coef, Rational(P_.S[a], P_.N_prime)});
  }
  return m;
}

std::optional<std::vector<long long>> gap_dual_coordinates(const GapCoordinates& P, long long n) {
  return P.coordinates(n);
}

}  // namespace nilkit
