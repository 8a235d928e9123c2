#include "nilkit/gowers.hpp"

#include "nilkit/errors.hpp"
#include "nilkit/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace nilkit {

namespace {

constexpr int kMaxS = 6;
constexpr long long kNaiveMaxN = 128;
constexpr double kNaiveMaxWork = 2147483648.0;      // 2^31 leaf terms
constexpr long long kRecursiveMaxN = 1LL << 20;
constexpr double kRecursiveMaxWork = 17179869184.0;  // 2^34

double ipow(double base, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// g(x) conj g(x + h) on Z/NZ.
std::vector<cd> derivative(const std::vector<cd>& g, size_t h) {
  const size_t N = g.size();
  std::vector<cd> out(N);
  for (size_t x = 0; x < N; ++x) {
    size_t y = x + h;
    if (y >= N) y -= N;
    out[x] = g[x] * std::conj(g[y]);
  }
  return out;
}

double mean_abs2(const std::vector<cd>& g) {
  const cd m = tree_sum(g) / static_cast<double>(g.size());
  return std::norm(m);
}

// Evaluates fn(h) for h = 0..N-1, optionally on several threads, and returns
// the values in index order.
std::vector<double> fan_out(size_t N, int jobs, const std::function<double(size_t)>& fn) {
  std::vector<double> vals(N);
  const size_t workers = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(std::max(jobs, 1)), N));
  if (workers == 1) {
    for (size_t h = 0; h < N; ++h) vals[h] = fn(h);
    return vals;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t h = w; h < N; h += workers) vals[h] = fn(h);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& ep : errors)
    if (ep) std::rethrow_exception(ep);
  return vals;
}

double naive_level(const std::vector<cd>& D, int depth) {
  if (depth == 0) return mean_abs2(D);
  const size_t N = D.size();
  std::vector<double> vals(N);
  for (size_t h = 0; h < N; ++h) vals[h] = naive_level(derivative(D, h), depth - 1);
  return tree_sum(std::move(vals)) / static_cast<double>(N);
}

double u2_power(const std::vector<cd>& f) {
  const size_t N = f.size();
  Eigen::FFT<double> fft;
  std::vector<cd> F;
  fft.fwd(F, f);
  std::vector<double> q(N);
  const double inv = 1.0 / static_cast<double>(N);
  for (size_t k = 0; k < N; ++k) {
    const double a = std::norm(F[k] * inv);
    q[k] = a * a;
  }
  return tree_sum(std::move(q));
}

double recursive_power(const std::vector<cd>& f, int s) {
  if (s == 1) return mean_abs2(f);
  if (s == 2) return u2_power(f);
  const size_t N = f.size();
  std::vector<double> vals(N);
  for (size_t h = 0; h < N; ++h) vals[h] = recursive_power(derivative(f, h), s - 1);
  return tree_sum(std::move(vals)) / static_cast<double>(N);
}

void check_s(int s) {
  if (s < 1) throw DomainError("gowers: s must be at least 1");
  if (s > kMaxS) throw CapExceeded("gowers: s exceeds the cap 6");
}

void check_work(long long N, int s, GowersMethod method) {
  if (method == GowersMethod::Naive) {
    if (ipow(static_cast<double>(N), s) > kNaiveMaxWork)
      throw CapExceeded("gowers: naive enumeration exceeds 2^31 terms");
  } else {
    if (N > kRecursiveMaxN) throw CapExceeded("gowers: N exceeds 2^20");
    if (ipow(static_cast<double>(N), s - 1) > kRecursiveMaxWork)
      throw CapExceeded("gowers: recursive work exceeds 2^34");
  }
}

double root(double power, int s) { return std::pow(std::max(power, 0.0), 1.0 / ipow(2.0, s)); }

}  // namespace

double Signal::bound() const {
  double b = 0;
  for (const cd& v : values) b = std::max(b, std::abs(v));
  return b;
}

cd e(double theta) {
  const double a = 2.0 * std::numbers::pi * theta;
  return {std::cos(a), std::sin(a)};
}

Signal random_signal(Domain domain, long long N, std::uint64_t seed, SignalKind kind) {
  std::vector<cd> v(static_cast<size_t>(N));
  for (long long i = 0; i < N; ++i) {
    const double u = SplitMix64::uniform_at(seed, static_cast<std::uint64_t>(2 * i));
    switch (kind) {
      case SignalKind::Unimodular:
        v[i] = e(u);
        break;
      case SignalKind::Sign:
        v[i] = u < 0.5 ? 1.0 : -1.0;
        break;
      case SignalKind::Disk:
        v[i] = std::sqrt(SplitMix64::uniform_at(seed, static_cast<std::uint64_t>(2 * i + 1))) * e(u);
        break;
    }
  }
  return {domain, std::move(v)};
}

template <typename T>
static T tree_sum_impl(std::vector<T> v) {
  if (v.empty()) return T(0);
  while (v.size() > 1) {
    std::vector<T> next((v.size() + 7) / 8, T(0));
    for (size_t i = 0; i < v.size(); ++i) next[i / 8] += v[i];
    v.swap(next);
  }
  return v[0];
}

double tree_sum(std::vector<double> v) { return tree_sum_impl(std::move(v)); }
cd tree_sum(std::vector<cd> v) { return tree_sum_impl(std::move(v)); }

std::string method_name(GowersMethod m) { return m == GowersMethod::Naive ? "naive" : "fft"; }

double gowers_power(const std::vector<cd>& f, int s, GowersMethod method, int jobs) {
  check_s(s);
  if (f.empty()) throw DomainError("gowers: empty signal");
  check_work(static_cast<long long>(f.size()), s, method);
  const size_t N = f.size();
  if (s == 1) return mean_abs2(f);
  if (method == GowersMethod::Naive) {
    auto vals = fan_out(N, jobs, [&](size_t h) { return naive_level(derivative(f, h), s - 2); });
    return tree_sum(std::move(vals)) / static_cast<double>(N);
  }
  if (s == 2) return u2_power(f);
  auto vals = fan_out(N, jobs, [&](size_t h) { return recursive_power(derivative(f, h), s - 1); });
  return tree_sum(std::move(vals)) / static_cast<double>(N);
}

GowersResult gowers_norm_cyclic(const Signal& f, int s, GowersMethod method, int jobs) {
  if (method == GowersMethod::Naive && f.N() > kNaiveMaxN)
    throw CapExceeded("gowers: naive method is capped at N = 128");
  GowersResult r;
  r.s = s;
  r.method = method;
  r.N_tilde = f.N();
  r.power = gowers_power(f.values, s, method, jobs);
  r.value = root(r.power, s);
  return r;
}

long long default_N_tilde(long long N, int s) {
  const long long need = N << s;
  long long p = 1;
  while (p < need) p <<= 1;
  return p;
}

GowersResult gowers_norm_interval(const Signal& f, int s, GowersMethod method, std::optional<long long> N_tilde,
                                  int jobs) {
  check_s(s);
  const long long N = f.N();
  if (N == 0) throw DomainError("gowers: empty signal");
  if (method == GowersMethod::Naive && N > kNaiveMaxN) throw CapExceeded("gowers: naive method is capped at N = 128");
  const long long Nt = N_tilde.value_or(default_N_tilde(N, s));
  if (Nt < (N << s)) {
    std::ostringstream os;
    os << "gowers: N_tilde = " << Nt << " is below 2^s N = " << (N << s);
    throw DomainError(os.str());
  }
  std::vector<cd> ft(static_cast<size_t>(Nt), 0.0), ind(static_cast<size_t>(Nt), 0.0);
  for (long long i = 0; i < N; ++i) {
    ft[i] = f.values[i];
    ind[i] = 1.0;
  }
  GowersResult r;
  r.s = s;
  r.method = method;
  r.N_tilde = Nt;
  r.power = gowers_power(ft, s, method, jobs) / gowers_power(ind, s, method, jobs);
  r.value = root(r.power, s);
  return r;
}

double box_norm4(const Eigen::MatrixXcd& Phi) {
  const Eigen::Index n = Phi.rows(), m = Phi.cols();
  if (n == 0 || m == 0) throw DomainError("box_norm: empty matrix");
  // Gram matrix G(m, m') = E_n Φ(n,m) conj Φ(n,m').
  const Eigen::MatrixXcd G = (Phi.transpose() * Phi.conjugate()) / static_cast<double>(n);
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(m * m));
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) terms.push_back(std::norm(G(a, b)));
  return tree_sum(std::move(terms)) / static_cast<double>(m * m);
}

double box_norm(const Eigen::MatrixXcd& Phi) { return std::pow(std::max(box_norm4(Phi), 0.0), 0.25); }

double box_norm4_bruteforce(const Eigen::MatrixXcd& Phi) {
  const Eigen::Index n = Phi.rows(), m = Phi.cols();
  cd acc = 0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index a2 = 0; a2 < n; ++a2)
      for (Eigen::Index b = 0; b < m; ++b)
        for (Eigen::Index b2 = 0; b2 < m; ++b2)
          acc += Phi(a, b) * std::conj(Phi(a, b2)) * std::conj(Phi(a2, b)) * Phi(a2, b2);
  return acc.real() / static_cast<double>(n * n * m * m);
}

bool BoxChain::holds(double tol) const {
  double prev = lhs;
  for (double s : steps) {
    if (prev > s + tol * (1 + std::abs(s))) return false;
    prev = s;
  }
  return prev <= rhs + tol * (1 + std::abs(rhs));
}

BoxChain box_inequality_check(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& Phi) {
  const Eigen::Index n = Phi.rows(), m = Phi.cols();
  if (a.size() != n || b.size() != m) throw DomainError("box_inequality_check: shape mismatch");
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  BoxChain out;
  const cd total = (a.transpose() * Phi * b)(0, 0) / (dn * dm);
  out.lhs = std::pow(std::abs(total), 4);
  // inner(n) = E_m b(m) Φ(n, m)
  const Eigen::VectorXcd inner = Phi * b / dm;
  double s1 = 0, s2 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s1 += std::abs(inner(i));
    s2 += std::norm(inner(i));
  }
  out.steps.push_back(std::pow(s1 / dn, 4));
  out.steps.push_back(std::pow(s2 / dn, 2));
  const Eigen::MatrixXcd G = (Phi.transpose() * Phi.conjugate()) / dn;
  double s3 = 0;
  for (Eigen::Index x = 0; x < m; ++x)
    for (Eigen::Index y = 0; y < m; ++y) s3 += std::abs(G(x, y));
  out.steps.push_back(std::pow(s3 / (dm * dm), 2));
  out.rhs = box_norm4(Phi);
  return out;
}

double correlation(const Signal& f, const std::vector<Signal>& chi) {
  double best = 0;
  for (const Signal& c : chi) {
    if (c.N() != f.N()) throw DomainError("correlation: length mismatch");
    std::vector<cd> terms(f.values.size());
    for (size_t i = 0; i < terms.size(); ++i) terms[i] = f.values[i] * std::conj(c.values[i]);
    best = std::max(best, std::abs(tree_sum(std::move(terms)) / static_cast<double>(f.N())));
  }
  return best;
}

double correlation(const Signal& f, const Signal& chi) { return correlation(f, std::vector<Signal>{chi}); }

MajorArc major_arc_search(const Signal& g, long long q, double T) {
  const long long N = g.N();
  if (N == 0) throw DomainError("major_arc_search: empty signal");
  if (q < 1 || T < 0) throw DomainError("major_arc_search: empty grid");
  if (static_cast<double>(q) * T > static_cast<double>(N)) throw DomainError("major_arc_search: requires T q <= N");
  const long long K = 4 * N;
  const long long offset = g.domain == Domain::Interval ? 1 : 0;
  MajorArc best;
  best.score = -1;
  for (long long j = 0; j < K; ++j) {
    const long long r = static_cast<long long>((static_cast<__int128>(q) * j) % K);
    if (static_cast<double>(std::min(r, K - r)) > 4.0 * T) continue;
    ++best.grid_size;
    const double theta = static_cast<double>(j) / static_cast<double>(K);
    std::vector<cd> terms(static_cast<size_t>(N));
    for (long long i = 0; i < N; ++i) {
      const long long n = i + offset;
      // Reduce jn mod K before scaling so the phase stays exact for large n.
      const long long jn = static_cast<long long>((static_cast<__int128>(j) * n) % K);
      terms[i] = e(static_cast<double>(jn) / static_cast<double>(K)) * g.values[i];
    }
    const double score = std::abs(tree_sum(std::move(terms)) / static_cast<double>(N));
    if (score > best.score) {
      best.score = score;
      best.theta = theta > 0.5 ? theta - 1.0 : theta;
    }
  }
  if (best.grid_size == 0) throw DomainError("major_arc_search: empty grid");
  return best;
}

namespace {

std::unordered_map<long long, std::uint64_t> sum_histogram(const std::vector<long long>& A,
                                                           const std::vector<long long>& B) {
  std::unordered_map<long long, std::uint64_t> h;
  h.reserve(A.size() * B.size() / 2 + 1);
  for (long long a : A)
    for (long long b : B) ++h[a + b];
  return h;
}

std::vector<long long> as_set(std::vector<long long> A) {
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  if (A.size() > 10000) throw CapExceeded("additive_energy: sets are capped at 10^4 elements");
  return A;
}

}  // namespace

std::uint64_t additive_energy(const std::vector<long long>& A1, const std::vector<long long>& A2,
                              const std::vector<long long>& A3, const std::vector<long long>& A4) {
  const auto h12 = sum_histogram(as_set(A1), as_set(A2));
  const auto h34 = sum_histogram(as_set(A3), as_set(A4));
  // Accumulate in key order so the result does not depend on hash iteration.
  std::vector<std::pair<long long, std::uint64_t>> keys(h12.begin(), h12.end());
  std::sort(keys.begin(), keys.end());
  std::uint64_t total = 0;
  for (const auto& [s, c] : keys) {
    auto it = h34.find(s);
    if (it != h34.end()) total += c * it->second;
  }
  return total;
}

std::uint64_t additive_energy(const std::vector<long long>& A) { return additive_energy(A, A, A, A); }

bool is_prime(long long p) {
  if (p < 2) return false;
  for (long long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

long long next_prime(long long n) {
  while (!is_prime(n)) ++n;
  return n;
}

bool ChainStep::holds(double rel_tol) const {
  const double scale = 1.0 + std::max(std::abs(left), std::abs(right));
  if (equality) return std::abs(left - right) <= rel_tol * scale;
  return left <= right + rel_tol * scale;
}

bool CSReport::chain_holds(double rel_tol) const {
  for (const auto& s : steps)
    if (!s.holds(rel_tol)) return false;
  return true;
}

CSReport cs_quadruple_statistic(const SeqFn& f1, const SeqFn& f2, const FamilyFn& chi, long long N, double theta) {
  if (N < 1) throw DomainError("cs_quadruple_statistic: N must be positive");
  if (N > 64) throw CapExceeded("cs_quadruple_statistic: N is capped at 64");
  const long long M = next_prime(4 * N);
  const double dN = static_cast<double>(N), dM = static_cast<double>(M);
  auto in_range = [N](long long n) { return n >= 1 && n <= N; };
  auto mod = [M](long long x) { return ((x % M) + M) % M; };

  CSReport rep;
  rep.N = N;
  rep.N_tilde = M;
  rep.theta = theta;

  // Sample everything once; bound checks on the as-given functions.
  std::vector<cd> F1(M, 0.0), F2(M, 0.0);
  for (long long n = 1; n <= N; ++n) {
    F1[n] = f1(n);
    F2[n] = f2(n);
  }
  std::vector<std::vector<cd>> X(M, std::vector<cd>(M, 0.0));  // X[h][n] = χ_h(n) 1_[N](h) 1_[N](n)
  for (long long h = 1; h <= N; ++h)
    for (long long n = 1; n <= N; ++n) X[h][n] = chi(h, n);

  // Statement quantity with the functions as given on Z, and its truncated twin.
  double lhs = 0, lhs_trunc = 0;
  for (long long h = 1; h <= N; ++h) {
    cd a = 0, b = 0;
    for (long long n = 1; n <= N; ++n) {
      const cd common = f2(n) * f1(n) * std::conj(chi(h, n));
      a += common * std::conj(f1(n + h));
      if (in_range(n + h)) b += common * std::conj(F1[n + h]);
    }
    lhs += std::abs(a / dN);
    lhs_trunc += std::abs(b / dN);
  }
  rep.lhs = lhs / dN;
  lhs_trunc /= dN;

  // Q1 = E_h |E_n F2 F1 conj F1(n+h) conj X_h(n)|² on Z/ÑZ.
  double q1 = 0;
  for (long long h = 0; h < M; ++h) {
    cd a = 0;
    for (long long n = 0; n < M; ++n) a += F2[n] * F1[n] * std::conj(F1[mod(n + h)]) * std::conj(X[h][n]);
    q1 += std::norm(a / dM);
  }
  q1 /= dM;

  // Q2 (expanded form), Q3 (fourth moment over k), Q4 (box norms per k).
  std::vector<cd> A(M);
  for (long long n = 0; n < M; ++n) A[n] = F2[n] * F1[n];
  cd q2 = 0;
  double q3 = 0, q4 = 0;
  for (long long k = 0; k < M; ++k) {
    Eigen::MatrixXcd Phi(M, M);
    for (long long n = 0; n < M; ++n)
      for (long long m = 0; m < M; ++m) {
        const auto& row = X[mod(m - n)];
        Phi(n, m) = std::conj(row[n]) * row[mod(n + k)];
      }
    Eigen::VectorXcd a(M), b(M);
    for (long long n = 0; n < M; ++n) {
      a(n) = A[n] * std::conj(A[mod(n + k)]);
      b(n) = std::conj(F1[n]) * F1[mod(n + k)];
    }
    const cd inner = (a.transpose() * Phi * b)(0, 0) / (dM * dM);
    q2 += inner;
    q3 += std::pow(std::abs(inner), 4);
    q4 += box_norm4(Phi);
  }
  q2 /= dM;
  q3 /= dM;
  q4 /= dM;

  // Quadruple sums over h_i ∈ [N] with h2 = h3 + h4 − h1.
  double q5_sum = 0, q7_sum = 0, q8_sum = 0, rhs_sum = 0;
  long long count = 0;
  const long long K = 4 * N;
  std::vector<cd> P(N + 1);
  std::vector<cd> table(K);
  for (long long r = 0; r < K; ++r) table[r] = e(static_cast<double>(r) / static_cast<double>(K));
  for (long long h1 = 1; h1 <= N; ++h1)
    for (long long h3 = 1; h3 <= N; ++h3)
      for (long long h4 = 1; h4 <= N; ++h4) {
        const long long h2 = h3 + h4 - h1;
        if (!in_range(h2)) continue;
        ++count;
        const long long shift = h1 - h4;
        cd full = 0, trunc = 0, given = 0;
        for (long long n = 0; n < M; ++n) {
          const long long n2 = mod(n + shift);
          full += X[h1][n] * X[h2][n2] * std::conj(X[h3][n] * X[h4][n2]);
        }
        for (long long n = 1; n <= N; ++n) {
          const long long n2 = n + shift;
          const cd g = chi(h1, n) * chi(h2, n2) * std::conj(chi(h3, n) * chi(h4, n2));
          given += g * e(theta * static_cast<double>(n));
          P[n] = in_range(n2) ? g : cd(0.0);
          trunc += P[n];
        }
        q5_sum += std::norm(full / dM);
        q7_sum += std::norm(trunc / dN);
        rhs_sum += std::abs(given / dN);
        double best = 0;
        for (long long j = 0; j < K; ++j) {
          cd acc = 0;
          for (long long n = 1; n <= N; ++n) acc += P[n] * table[(j * n) % K];
          best = std::max(best, std::norm(acc / dN));
        }
        q8_sum += best;
      }
  const double q5 = q5_sum / (dM * dM * dM);
  const double q6 = q5_sum / static_cast<double>(count);
  const double q7 = q7_sum / static_cast<double>(count);
  const double q8 = q8_sum / static_cast<double>(count);
  rep.rhs = rhs_sum / static_cast<double>(count);

  const double ratio = dN / dM;
  rep.steps = {
      {"cauchy-schwarz", ratio * ratio * ratio * lhs_trunc * lhs_trunc, q1, false},
      {"expansion", q2.real(), q1, true},
      {"expansion-imaginary", q2.imag(), 0.0, true},
      {"hoelder", std::pow(std::abs(q2), 4), q3, false},
      {"box-norm", q3, q4, false},
      {"change-of-variables", q4, q5, true},
      {"restriction", q6 * static_cast<double>(count), q5 * dM * dM * dM, true},
      {"truncation", q7 * dN * dN, q6 * dM * dM, true},
      {"major-arc", q7, q8, false},
  };
  return rep;
}

ConverseResult converse_harness(const Signal& f, const std::vector<Signal>& chi, int s,
                                const std::optional<std::vector<double>>& poly_phase_coefficients, int jobs) {
  ConverseResult out;
  out.corr = correlation(f, chi);
  const GowersMethod method = GowersMethod::RecursiveFFT;
  out.norm = f.domain == Domain::Cyclic ? gowers_norm_cyclic(f, s + 1, method, jobs).value
                                        : gowers_norm_interval(f, s + 1, method, std::nullopt, jobs).value;
  if (poly_phase_coefficients && f.domain == Domain::Cyclic) {
    const auto& c = *poly_phase_coefficients;
    bool ok = static_cast<int>(c.size()) <= s + 1;
    for (double cj : c) {
      const double scaled = cj * static_cast<double>(f.N());
      ok = ok && std::abs(scaled - std::round(scaled)) <= 1e-9;
    }
    out.exact_phase_check_applies = ok && std::abs(out.corr - 1.0) <= 1e-9;
    if (out.exact_phase_check_applies && std::abs(out.norm - 1.0) > 1e-9) {
      std::ostringstream os;
      os.precision(17);
      os << "converse: corr = 1 with an exact phase but U^" << s + 1 << " norm = " << out.norm;
      throw InvariantFailure("gowers", os.str());
    }
  }
  return out;
}

}  // namespace nilkit
