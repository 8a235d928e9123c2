#pragma once

#include "nilkit/gowers.hpp"
#include "nilkit/rational.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nilkit {

/// Which rounding the bracket operations use.  Nearest: {x} ∈ (−½, ½] and
/// [x] = x − {x}.  Floor: [x] = ⌊x⌋ and {x} ∈ [0, 1).
enum class BracketConvention { Nearest, Floor };

double frac(double x, BracketConvention c = BracketConvention::Nearest);
double int_part(double x, BracketConvention c = BracketConvention::Nearest);
Rational frac(const Rational& x);
Integer int_part(const Rational& x);

/// Expression tree over the integer variable n.  A linear leaf is coef·n + offset.
struct BracketExpr {
  enum class Op { Linear, Sum, Mul, Frac, Int };
  Op op = Op::Linear;
  double coef = 0;
  double offset = 0;
  std::vector<BracketExpr> args;

  static BracketExpr linear(double coef, double offset = 0);
  static BracketExpr sum(std::vector<BracketExpr> terms);
  static BracketExpr mul(std::vector<BracketExpr> factors);
  static BracketExpr frac_of(BracketExpr e);
  static BracketExpr int_of(BracketExpr e);

  /// Height of the tree with a linear leaf at depth 1.  A chain of top-level
  /// sums is not counted, so a sum of monomials has the depth of its deepest monomial.
  int monomial_depth() const;
  double argument(long long n, BracketConvention c = BracketConvention::Nearest) const;
};

inline constexpr int kMaxBracketDepth = 3;

/// e(argument(n)).  Throws DomainError when a monomial is deeper than kMaxBracketDepth.
std::complex<double> eval_bracket_phase(const BracketExpr& m, long long n,
                                        BracketConvention c = BracketConvention::Nearest);

/// Interval signal n ↦ e(argument(n)), n = 1..N.
Signal bracket_signal(const BracketExpr& m, long long N, BracketConvention c = BracketConvention::Nearest);

struct BohrSetSpec {
  long long N = 0;
  std::vector<long long> S;
  double rho = 0;
};

inline constexpr long long kMaxBohrModulus = 1000000;

/// Validates N ≥ 1, S nonempty, ρ ∈ (0, ½].
void validate_bohr(const BohrSetSpec& B);
/// ‖s x / N‖_{R/Z} ≤ ρ for all s ∈ S, with ρ taken as the exact value of its binary64 representation.
bool bohr_contains(const BohrSetSpec& B, long long x);
/// Sorted members in [0, N).  CapExceeded above kMaxBohrModulus.
std::vector<long long> bohr_members(const BohrSetSpec& B);

/// Φ(x) = ({s x / N})_{s ∈ S}, exact.
VecQ bohr_phi(const std::vector<long long>& S, long long N, long long x);

struct FreimanCheck {
  bool is_hom = true;
  std::uint64_t tuples_checked = 0;
  // First violating pair: two nondecreasing k-tuples of A with equal sums and different f-sums.
  std::vector<long long> witness_a;
  std::vector<long long> witness_b;
  Rational f_sum_a;
  Rational f_sum_b;
};

inline constexpr std::uint64_t kMaxFreimanTuples = 10000000;

/// f(A[i]) = f_values[i].  Enumerates k-multisets of A in lexicographic order of
/// the sorted elements; each is compared with the first multiset of equal sum.
FreimanCheck is_freiman_hom(const std::vector<long long>& A, const std::vector<Rational>& f_values, int k);

/// Rounds every coordinate j to the nearest point of eps_j·Z, ties toward +∞.
/// The rounding is computed on the exact rational values of the inputs.
std::vector<VecD> round_to_lattice(const std::vector<VecD>& f, const VecD& eps);

/// |f(h1) + f(h2) − f(h3) − f(h4)| in each coordinate.
VecD quadruple_defect(const std::vector<VecD>& f, const std::array<std::size_t, 4>& quad);

struct BracketTerm {
  VecD a;
  Rational beta;  // denominator divides N'
};

/// h ↦ Σ_k a_k {β_k h} + γ.  `N` is the length of the range [N] the model is meant for;
/// when N > 0 the modulus must satisfy 100N ≤ N' ≤ 200N.
struct BracketLinearModel {
  int dim = 1;
  VecD gamma;
  std::vector<BracketTerm> terms;
  long long N_prime = 0;
  long long N = 0;

  void validate() const;
  VecD evaluate(long long h) const;
};

struct BracketLinearReport {
  VecD max_violation;           // per coordinate, over all h
  std::vector<long long> pass;  // h with every coordinate within ε
  std::vector<long long> fail;
};

/// Residual f(h) − model(h) measured by its distance to Z in each coordinate.
BracketLinearReport verify_bracket_linear(const BracketLinearModel& model, const std::vector<long long>& H,
                                          const std::vector<VecD>& f, const VecD& eps);

struct FitCandidate {
  double a = 0;
  Rational beta;
  double gamma = 0;
  double violation = 0;
};

struct SingleFrequencyFit {
  double a = 0;
  Rational beta;
  double gamma = 0;
  double violation = 0;  // max_h ‖f(h) − a{βh} − γ‖_{R/Z}
  long long N_prime = 0;
  std::uint64_t candidates = 0;
  // Every scanned candidate within 1e-12 of the optimum, in scan order (at most kMaxFitOptima).
  std::vector<FitCandidate> optima;
};

inline constexpr std::size_t kMaxFitOptima = 1000;

inline constexpr long long kMaxFitterN = 1000;

/// Scans β = p/N' (N' the smallest prime ≥ 100N, p ∈ (−N'/2, N'/2] by increasing |p|,
/// positive first) and a = step·j ∈ [−a_max, a_max] (increasing), with the minimax γ
/// for each pair.  The reported fit is the earliest candidate within 1e-12 of the
/// optimum; on short ranges several (a, β) pairs can fit equally well, and all are listed.  H = [N] = {1..N}, f[h − 1] = f(h).
SingleFrequencyFit fit_single_frequency(const std::vector<double>& f, double a_step = 0.05, double a_max = 1.0);

/// Generalized progression {Σ ℓ_i n_i mod N' : |n_i| ≤ N_i} with the frequency set
/// S whose vectors Φ(ℓ_i) certify independence.
struct ProperGAP {
  long long N_prime = 0;
  std::vector<long long> generators;
  std::vector<long long> sides;
  std::vector<long long> S;
};

inline constexpr long long kMaxGapBox = 1000000;

class GapCoordinates {
 public:
  /// Checks the certificate rank, properness and additivity of Φ on the box by
  /// enumeration.  Throws DomainError naming the failed condition.
  explicit GapCoordinates(ProperGAP P);

  const ProperGAP& gap() const { return P_; }
  int d() const { return static_cast<int>(P_.generators.size()); }
  /// Row i is u_i, with u_i · Φ(ℓ_j) = δ_ij.
  const MatQ& dual() const { return U_; }
  /// Σ ℓ_i n_i mod N' in [0, N').
  long long element(const std::vector<long long>& n) const;
  /// Box coordinates of x, or nullopt when x ∉ P.
  std::optional<std::vector<long long>> coordinates(long long x) const;
  /// All members with their coordinates, in lexicographic order of the box.
  std::vector<std::pair<long long, std::vector<long long>>> enumerate() const;

  /// For a Freiman homomorphism given by f(0) and f(ℓ_i): the model
  /// h ↦ Σ_{α∈S} (Σ_i (f(ℓ_i) − f(0)) (u_i)_α) {α h / N'} + f(0).
  BracketLinearModel freiman_model(const VecD& f0, const std::vector<VecD>& f_generators) const;

 private:
  ProperGAP P_;
  MatQ U_;
};

std::optional<std::vector<long long>> gap_dual_coordinates(const GapCoordinates& P, long long n);

}  // namespace nilkit
