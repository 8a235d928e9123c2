#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nilkit {

using cd = std::complex<double>;

enum class Domain { Cyclic, Interval };

/// Values of f on Z/NZ (index = residue) or on [N] (index i holds f(i + 1)).
struct Signal {
  Domain domain = Domain::Cyclic;
  std::vector<cd> values;

  static Signal cyclic(std::vector<cd> v) { return {Domain::Cyclic, std::move(v)}; }
  static Signal interval(std::vector<cd> v) { return {Domain::Interval, std::move(v)}; }

  long long N() const { return static_cast<long long>(values.size()); }
  double bound() const;
  bool one_bounded() const { return bound() <= 1.0 + 1e-12; }
};

enum class SignalKind { Unimodular, Sign, Disk };

/// Deterministic 1-bounded signal: value i depends only on (seed, i).
Signal random_signal(Domain domain, long long N, std::uint64_t seed, SignalKind kind = SignalKind::Unimodular);

/// e(θ) = exp(2πiθ).
cd e(double theta);

/// Sum in a fixed order: consecutive groups of 8, repeated until one value is left.
double tree_sum(std::vector<double> v);
cd tree_sum(std::vector<cd> v);

enum class GowersMethod { Naive, RecursiveFFT };
std::string method_name(GowersMethod m);

struct GowersResult {
  int s = 0;
  double value = 0;
  double power = 0;  // value^(2^s)
  GowersMethod method = GowersMethod::RecursiveFFT;
  long long N_tilde = 0;
};

/// ‖f‖_{U^s(Z/NZ)}^(2^s).  Naive: direct enumeration of (h_1..h_{s-1}) with the
/// last average collapsed to |E_x Δf(x)|².  Recursive: E_h ‖Δ_h f‖^(2^(s-1)) down to
/// the Fourier formula for U².  jobs > 1 fans out the outermost h without
/// changing the summation order.
double gowers_power(const std::vector<cd>& f, int s, GowersMethod method, int jobs = 1);

GowersResult gowers_norm_cyclic(const Signal& f, int s, GowersMethod method, int jobs = 1);

/// Smallest power of two ≥ 2^s N.
long long default_N_tilde(long long N, int s);

GowersResult gowers_norm_interval(const Signal& f, int s, GowersMethod method,
                                  std::optional<long long> N_tilde = std::nullopt, int jobs = 1);

/// ‖Φ‖_□⁴ = E_{m,m'} |E_n Φ(n,m) conj Φ(n,m')|².
double box_norm4(const Eigen::MatrixXcd& Phi);
double box_norm(const Eigen::MatrixXcd& Phi);
/// Direct quadruple sum (n·m)² terms; test oracle.
double box_norm4_bruteforce(const Eigen::MatrixXcd& Phi);

struct BoxChain {
  double lhs = 0;             // |E a(n) b(m) Φ(n,m)|⁴
  std::vector<double> steps;  // successive upper bounds of the chain, the last one is ‖Φ‖_□⁴
  double rhs = 0;
  bool holds(double tol = 1e-12) const;
};

BoxChain box_inequality_check(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& Phi);

/// max_i |E_n f(n) conj χ_i(n)|.
double correlation(const Signal& f, const std::vector<Signal>& chi);
double correlation(const Signal& f, const Signal& chi);

struct MajorArc {
  double theta = 0;  // representative in (−½, ½]
  double score = 0;
  long long grid_size = 0;
};

/// Maximizes |E_{n∈[N]} e(Θn) g(n)| over Θ = j/(4N) with ‖qΘ‖ ≤ T/N; the
/// smallest j wins ties.
MajorArc major_arc_search(const Signal& g, long long q, double T);

/// #{(x1,x2,x3,x4) ∈ A1×A2×A3×A4 : x1 + x2 = x3 + x4}.
std::uint64_t additive_energy(const std::vector<long long>& A1, const std::vector<long long>& A2,
                              const std::vector<long long>& A3, const std::vector<long long>& A4);
std::uint64_t additive_energy(const std::vector<long long>& A);

using SeqFn = std::function<cd(long long n)>;
using FamilyFn = std::function<cd(long long h, long long n)>;

struct ChainStep {
  std::string name;
  double left = 0;
  double right = 0;
  bool equality = false;  // identity rather than inequality
  bool holds(double rel_tol = 1e-9) const;
};

struct CSReport {
  long long N = 0;
  long long N_tilde = 0;
  double theta = 0;
  double lhs = 0;  // E_h |E_n f2 Δ_h f1 conj χ_h| with the functions as given on Z
  double rhs = 0;  // quadruple average at the given Θ, functions as given on Z
  std::vector<ChainStep> steps;
  bool chain_holds(double rel_tol = 1e-9) const;
};

/// Evaluates every quantity of the Cauchy–Schwarz argument for additive
/// quadruples on [N] = {1..N} embedded in Z/ÑZ, Ñ the smallest prime ≥ 4N.
CSReport cs_quadruple_statistic(const SeqFn& f1, const SeqFn& f2, const FamilyFn& chi, long long N, double theta);

bool is_prime(long long n);
/// Smallest prime ≥ n.
long long next_prime(long long n);

struct ConverseResult {
  double corr = 0;
  double norm = 0;
  bool exact_phase_check_applies = false;
};

/// corr = correlation(f, χ), norm = ‖f‖_{U^{s+1}} on f's domain.  When
/// poly_phase_coefficients is set (χ = e(Σ c_j n^j) with c_j ∈ (1/N)Z, degree ≤ s)
/// and corr = 1, throws InvariantFailure unless norm = 1 within 1e-9.
ConverseResult converse_harness(const Signal& f, const std::vector<Signal>& chi, int s,
                                const std::optional<std::vector<double>>& poly_phase_coefficients = std::nullopt,
                                int jobs = 1);

}  // namespace nilkit
