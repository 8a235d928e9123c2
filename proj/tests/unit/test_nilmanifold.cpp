#include "nilkit/nilmanifold.hpp"
#include "unit/helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nilkit;
using namespace testing_helpers;

namespace {

std::complex<double> e_of(double t) { return std::polar(1.0, 2.0 * std::numbers::pi * t); }

bool in_unit_box(const VecQ& u) {
  for (int i = 0; i < u.size(); ++i)
    if (u(i) < 0 || u(i) >= 1) return false;
  return true;
}

VecQ random_integer_vec(SplitMix64& rng, int d, int bound) {
  VecQ v(d);
  for (int i = 0; i < d; ++i) v(i) = Rational(rng.uniform_int(-bound, bound));
  return v;
}

VecD random_unit_vec(SplitMix64& rng, int d, double scale = 1.0) {
  VecD v(d);
  for (int i = 0; i < d; ++i) v(i) = scale * rng.uniform();
  return v;
}

// g(n) = exp(X)^{αn} exp(Y)^{βn} = exp(n(αX + βY + αβ/2 Z)) exp(C(n,2) αβ Z).
PolySequence heisenberg_linear(const Nilmanifold& M, const Rational& a, const Rational& b) {
  std::map<MultiIndex, VecQ, IndexOrder> c;
  c[{1}] = vq({a, b, a * b / 2});
  c[{2}] = vq({0, 0, a * b});
  return PolySequence(M.algebra(), M.filtration(), 1, c);
}

// Free step-3 rank-2 algebra with [X,[X,Y]] and [Y,[X,Y]] halved, so that
// integer second-kind points form a lattice.
Nilmanifold step3_manifold() {
  return Nilmanifold::standard(
      make_algebra_antisymmetric(5, 3, {{0, 1, 2, Rational(1)}, {0, 2, 3, Rational(2)}, {1, 2, 4, Rational(2)}}));
}

}  // namespace

TEST(Nilmanifold, ConstructionAndErrors) {
  auto M = Nilmanifold::standard(algebras::heisenberg());
  EXPECT_EQ(M.dim(), 3);
  EXPECT_EQ(M.degree(), 2);
  EXPECT_EQ(M.block(1), std::make_pair(0, 2));
  EXPECT_EQ(M.block(2), std::make_pair(2, 3));
  EXPECT_EQ(M.structure_height(), 1);

  auto L = algebras::heisenberg();
  auto F = lower_central_filtration(L);
  EXPECT_THROW(Nilmanifold(L, F, {2, 0, 1}), DomainError);  // Z first: not adapted
  EXPECT_THROW(Nilmanifold(L, F, {0, 0, 1}), DomainError);
  EXPECT_NO_THROW(Nilmanifold(L, F, {1, 0, 2}));

  // [X, Y] = Z/2: integer points are not closed under multiplication.
  auto half = make_algebra_antisymmetric(3, 2, {{0, 1, 2, q(1, 2)}});
  EXPECT_THROW(Nilmanifold::standard(half), DomainError);
  // [X, Y] = 2Z is fine.
  auto two = make_algebra_antisymmetric(3, 2, {{0, 1, 2, Rational(2)}});
  EXPECT_EQ(Nilmanifold::standard(two).structure_height(), 2);

  EXPECT_THROW(Nilmanifold::standard(algebras::free_step3_rank2()), DomainError);
  auto M5 = step3_manifold();
  EXPECT_EQ(M5.degree(), 3);
  EXPECT_EQ(M5.block(3), std::make_pair(3, 5));
}

TEST(Reduce, Examples) {
  auto T = Nilmanifold::torus(1);
  auto r = reduce_to_fundamental(T.from_psi(vq({q(5, 4)})), T);
  EXPECT_EQ(T.psi(r.frac), vq({q(1, 4)}));
  EXPECT_EQ(T.psi(r.integer), vq({1}));

  auto r2 = reduce_to_fundamental(T.from_psi(vq({1})), T);
  EXPECT_EQ(T.psi(r2.frac), vq({0}));  // ties at 1 go to 0

  auto H = Nilmanifold::standard(algebras::heisenberg());
  const ElementQ gamma = H.from_psi(vq({2, -3, 5}));
  auto r3 = reduce_to_fundamental(gamma, H);
  EXPECT_TRUE(r3.frac.is_identity());
  EXPECT_EQ(r3.integer, gamma);

  // exp(bY)exp(-X) = exp(-X)exp(bY)exp(bZ), so removing one X shifts Z by 1/4.
  const ElementQ g = H.from_psi(vq({q(3, 2), q(1, 4), q(-3, 10)}));
  auto r4 = reduce_to_fundamental(g, H);
  EXPECT_EQ(H.psi(r4.frac), vq({q(1, 2), q(1, 4), q(19, 20)}));
  EXPECT_EQ(r4.frac * r4.integer, g);
  EXPECT_TRUE(H.is_lattice_point(r4.integer));
}

TEST(Reduce, ExactIdentityOnRandomElements) {
  SplitMix64 rng(11);
  for (const auto& M : {Nilmanifold::standard(algebras::heisenberg()),
                        step3_manifold(), Nilmanifold::torus(3)}) {
    for (int trial = 0; trial < 500; ++trial) {
      const ElementQ g = M.from_psi(random_vec(rng, M.dim(), 20, 7));
      auto r = reduce_to_fundamental(g, M);
      ASSERT_EQ(r.frac * r.integer, g);
      ASSERT_TRUE(in_unit_box(M.psi(r.frac)));
      ASSERT_TRUE(M.is_lattice_point(r.integer));
    }
  }
}

TEST(Reduce, LatticeTranslatesShareTheRepresentative) {
  SplitMix64 rng(12);
  auto M = step3_manifold();
  for (int trial = 0; trial < 200; ++trial) {
    const ElementQ g = M.from_psi(random_vec(rng, M.dim(), 9, 5));
    const ElementQ gamma = M.from_psi(random_integer_vec(rng, M.dim(), 4));
    ASSERT_EQ(reduce_to_fundamental(g, M).frac, reduce_to_fundamental(ElementQ(g * gamma), M).frac);
  }
}

TEST(Metric, Examples) {
  auto T = Nilmanifold::torus(2);
  const ElementD x = T.from_psi(VecD(Eigen::Vector2d(0.2, 0.7)));
  const ElementD y = T.from_psi(VecD(Eigen::Vector2d(0.5, 0.6)));
  EXPECT_NEAR(metric_upper(x, y, T), 0.3, 1e-15);
  EXPECT_EQ(metric_upper(x, x, T, 4), 0.0);

  auto H = Nilmanifold::standard(algebras::heisenberg());
  SplitMix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const ElementQ a = random_element(rng, H.algebra());
    const ElementQ b = random_element(rng, H.algebra());
    const ElementQ g = random_element(rng, H.algebra());
    ASSERT_EQ(metric_basic(ElementQ(a * g), ElementQ(b * g), H), metric_basic(a, b, H));
    ASSERT_EQ(metric_basic(a, b, H), metric_basic(b, a, H));
  }
}

TEST(Metric, RefinementIsMonotoneAndSymmetric) {
  auto H = Nilmanifold::standard(algebras::heisenberg());
  SplitMix64 rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const ElementD x = H.from_psi(random_unit_vec(rng, 3, 4.0));
    const ElementD y = H.from_psi(random_unit_vec(rng, 3, 4.0));
    double prev = metric_upper(x, y, H, 0);
    for (int r = 1; r <= 6; ++r) {
      const double cur = metric_upper(x, y, H, r);
      ASSERT_LE(cur, prev);
      ASSERT_NEAR(cur, metric_upper(y, x, H, r), 1e-9 * (1 + cur));
      prev = cur;
    }
  }
}

TEST(Horizontal, Examples) {
  auto H = Nilmanifold::standard(algebras::heisenberg());
  auto a = validate_horizontal(vq({1, 0, 0}), H);
  EXPECT_TRUE(a.valid);
  EXPECT_EQ(a.size, 1);
  EXPECT_EQ(a.pairs_checked, 200);
  auto b = validate_horizontal(vq({0, 0, 1}), H);
  EXPECT_FALSE(b.valid);
  EXPECT_EQ(validate_horizontal(vq({0, 0, 0}), H).size, 0);
  EXPECT_TRUE(validate_horizontal(vq({0, 0, 0}), H).valid);
  EXPECT_TRUE(validate_horizontal(vq({-3, 7, 0}), H).valid);
  EXPECT_EQ(validate_horizontal(vq({-3, 7, 0}), H).size, 7);
  EXPECT_THROW(validate_horizontal(vq({q(1, 2), 0, 0}), H), DomainError);
}

TEST(Horizontal, ClosedUnderAddition) {
  SplitMix64 rng(15);
  auto M = step3_manifold();
  std::vector<VecQ> valid;
  for (int trial = 0; trial < 40; ++trial) {
    VecQ k = random_integer_vec(rng, M.dim(), 3);
    if (trial % 2) k.tail(3).setZero();
    if (validate_horizontal(k, M, 60).valid) valid.push_back(k);
  }
  ASSERT_GE(valid.size(), 10u);
  for (size_t i = 0; i + 1 < valid.size(); ++i) {
    ASSERT_TRUE(validate_horizontal(VecQ(valid[i] + valid[i + 1]), M, 60).valid);
    ASSERT_TRUE(validate_horizontal(VecQ(-valid[i]), M, 60).valid);
  }
}

TEST(Nilsequence, Examples) {
  auto T = Nilmanifold::torus(1);
  const Rational alpha = q(3, 7);
  std::map<MultiIndex, VecQ, IndexOrder> c;
  c[{1}] = vq({alpha});
  PolySequence g(T.algebra(), T.filtration(), 1, c);
  NilFunction one = [](const ElementD&) { return std::complex<double>(1.0, 0.0); };
  NilFunction ex = [](const ElementD& x) { return e_of(x.log()(0)); };
  for (long long n = -5; n <= 20; ++n) {
    EXPECT_EQ(eval_nilsequence(one, T, g, n), std::complex<double>(1.0, 0.0));
    EXPECT_LT(std::abs(eval_nilsequence(ex, T, g, n) - e_of(to_double(alpha) * n)), 1e-12);
  }
}

TEST(Nilsequence, HeisenbergGammaInvariance) {
  auto H = Nilmanifold::standard(algebras::heisenberg());
  const Rational a = q(1414, 1000), b = q(-577, 1000);
  PolySequence g = heisenberg_linear(H, a, b);
  for (long long n : {0LL, 1LL, 5LL, -3LL}) {
    const ElementQ expect = ElementQ(H.algebra(), vq({a * n, 0, 0})) * ElementQ(H.algebra(), vq({0, b * n, 0}));
    ASSERT_EQ(g(n), expect);
  }
  NilFunction F = vertical_phase_function(H, vq({1}));
  SplitMix64 rng(16);
  for (int trial = 0; trial < 1000; ++trial) {
    const long long n = rng.uniform_int(-60, 60);
    const ElementQ x = g(n);
    const ElementQ gamma = H.from_psi(random_integer_vec(rng, 3, 5));
    const auto r1 = reduce_to_fundamental(x, H);
    const auto r2 = reduce_to_fundamental(ElementQ(x * gamma), H);
    ASSERT_EQ(r1.frac, r2.frac);
    const auto v1 = eval_nilsequence(F, H, g, n);
    const auto v2 = F(ElementD(H.algebra(), to_double(r2.frac.log())));
    ASSERT_LT(std::abs(v1 - v2), 1e-12);
    ASSERT_NEAR(std::abs(v1), 1.0, 1e-12);
  }
}

TEST(Partition, TorusBumps) {
  double sum = 0;
  int nonzero = 0;
  for (int t = 0; t < 4; ++t) {
    const double v = torus_bump(2, t, 0.1);
    sum += v * v;
    nonzero += v != 0;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(nonzero, 2);
  auto at = torus_bumps_at(2, 0.1);
  ASSERT_EQ(at.size(), 2u);
  for (const auto& [t, v] : at) EXPECT_DOUBLE_EQ(v, torus_bump(2, t, 0.1));

  auto T = Nilmanifold::torus(1);
  auto P = partition_of_unity(T, 0.25);
  EXPECT_EQ(P.k(), 2);
  EXPECT_EQ(P.size(), 4);
  double s2 = 0;
  for (const auto& term : P.terms(T.from_psi(VecD(VecD::Constant(1, 0.1))))) s2 += term.value * term.value;
  EXPECT_NEAR(s2, 1.0, 1e-12);
  EXPECT_THROW(partition_of_unity(T, 0.5), DomainError);
  EXPECT_THROW(partition_of_unity(T, 0.0), DomainError);
}

TEST(Partition, HeisenbergSumSupportAndInvariance) {
  auto H = Nilmanifold::standard(algebras::heisenberg());
  const double eps = 0.125;
  auto P = partition_of_unity(H, eps);
  EXPECT_EQ(P.k(), 4);
  EXPECT_EQ(P.size(), 512);
  SplitMix64 rng(17);
  size_t max_overlap = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ElementD g = H.from_psi(random_unit_vec(rng, 3, 6.0));
    const auto terms = P.terms(g);
    max_overlap = std::max(max_overlap, terms.size());
    double sum = 0;
    for (const auto& term : terms) {
      sum += term.value * term.value;
      const auto beta = P.beta(term.t);
      const VecD u = H.psi(term.representative);
      for (int i = 0; i < 3; ++i) {
        ASSERT_GE(u(i), beta[i] - eps - 1e-12);
        ASSERT_LE(u(i), beta[i] + eps + 1e-12);
      }
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);

    VecD gi(3);
    for (int i = 0; i < 3; ++i) gi(i) = static_cast<double>(rng.uniform_int(-3, 3));
    const auto shifted = P.terms(g * H.from_psi(gi));
    for (const auto& term : terms) ASSERT_NEAR(P.value(term.t, g * H.from_psi(gi)), term.value, 1e-9);
    double s2 = 0;
    for (const auto& term : shifted) s2 += term.value * term.value;
    ASSERT_NEAR(s2, 1.0, 1e-9);
  }
  EXPECT_LE(max_overlap, 8u);
}

TEST(Nilcharacter, TorusExamples) {
  auto T = Nilmanifold::torus(1);
  auto zero = make_nilcharacter(T, bottom_vertical_character(T, vq({0})));
  EXPECT_EQ(zero.output_dim(), 1);
  auto one = make_nilcharacter(T, bottom_vertical_character(T, vq({1})));
  SplitMix64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = 4.0 * rng.uniform() - 2.0;
    const double gshift = rng.uniform();
    EXPECT_LT(std::abs(zero.evaluate(T.from_psi(VecD(VecD::Constant(1, x))))[0] - 1.0), 1e-15);
    const auto fx = one.evaluate(T.from_psi(VecD(VecD::Constant(1, x))))[0];
    EXPECT_LT(std::abs(fx - e_of(x)), 1e-12);
    const auto fgx = one.evaluate(T.from_psi(VecD(VecD::Constant(1, x + gshift))))[0];
    EXPECT_LT(std::abs(fgx - e_of(gshift) * fx), 1e-12);
  }
}

TEST(Nilcharacter, HeisenbergAndStepThree) {
  SplitMix64 rng(19);
  auto H = Nilmanifold::standard(algebras::heisenberg());
  auto M5 = step3_manifold();
  struct Case {
    Nilmanifold M;
    VecQ xi;
  };
  for (const auto& [M, xi] : {Case{H, vq({1})}, Case{H, vq({-2})}, Case{M5, vq({1, -2})}}) {
    const auto eta = bottom_vertical_character(M, xi);
    auto chi = make_nilcharacter(M, eta);
    const auto [b, e] = M.block(M.degree());
    EXPECT_LE(chi.output_dim(), partition_of_unity(M, 0.25).size());
    for (int trial = 0; trial < 200; ++trial) {
      const ElementD x = M.from_psi(random_unit_vec(rng, M.dim(), 3.0));
      VecD c = VecD::Zero(M.dim());
      for (int i = b; i < e; ++i) c(M.order()[i]) = 4.0 * rng.uniform() - 2.0;
      const ElementD gd(M.algebra(), c);
      const auto fx = chi.evaluate(x);
      const auto fgx = chi.evaluate(gd * x);
      const auto phase = e_of(vertical_value(eta, M, gd));
      double norm2 = 0, trace = 0;
      for (size_t j = 0; j < fx.size(); ++j) {
        norm2 += std::norm(fx[j]);
        trace += (fx[j] * std::conj(fx[j])).real();
        ASSERT_LT(std::abs(fgx[j] - phase * fx[j]), 1e-9);
      }
      ASSERT_NEAR(std::sqrt(norm2), 1.0, 1e-9);
      ASSERT_NEAR(trace, 1.0, 1e-9);
      // Γ-invariance.
      VecD gi(M.dim());
      for (int i = 0; i < M.dim(); ++i) gi(i) = static_cast<double>(rng.uniform_int(-2, 2));
      const auto fxg = chi.evaluate(x * M.from_psi(gi));
      for (size_t j = 0; j < fx.size(); ++j) ASSERT_LT(std::abs(fxg[j] - fx[j]), 1e-9);
    }
  }
  EXPECT_THROW(bottom_vertical_character(H, vq({q(1, 2)})), DomainError);
  EXPECT_THROW(bottom_vertical_character(H, vq({1, 1})), DomainError);
  VerticalCharacter wrong{Subspace::full(3), vq({1, 0, 0})};
  EXPECT_THROW(make_nilcharacter(H, wrong), DomainError);
}

TEST(Divisibility, HeisenbergAndOthers) {
  auto H = Nilmanifold::standard(algebras::heisenberg());
  const Integer Qp = divisibility_constant(H);
  EXPECT_EQ(Qp, 2);
  auto lattice_at = [](const Nilmanifold& M, const VecQ& z) {
    VecQ log(M.dim());
    for (int a = 0; a < M.dim(); ++a) log(M.order()[a]) = z(a);
    return M.is_lattice_point(ElementQ(M.algebra(), log));
  };
  EXPECT_FALSE(lattice_at(H, vq({1, 1, 0})));
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c) ASSERT_TRUE(lattice_at(H, vq({2 * a, 2 * b, 2 * c})));

  EXPECT_EQ(divisibility_constant(Nilmanifold::torus(2)), 1);

  auto M5 = step3_manifold();
  const Integer Q5 = divisibility_constant(M5);
  EXPECT_EQ(Q5, 6);
  // Brute force: every smaller multiplier has a grid point off the lattice.
  for (int Q = 1; Q < 6; ++Q) {
    bool found = false;
    for (int code = 0; code < 243 && !found; ++code) {
      VecQ z(5);
      for (int a = 0, c = code; a < 5; ++a, c /= 3) z(a) = Rational(Q * (c % 3 - 1));
      found = !lattice_at(M5, z);
    }
    EXPECT_TRUE(found) << Q;
  }
  SplitMix64 rng(20);
  for (int trial = 0; trial < 200; ++trial) {
    VecQ z = random_integer_vec(rng, 5, 3) * Rational(Q5);
    ASSERT_TRUE(lattice_at(M5, z));
  }
}

TEST(Lipschitz, TorusCharacterEstimate) {
  auto T = Nilmanifold::torus(1);
  NilFunction F = [](const ElementD& x) { return e_of(x.log()(0)); };
  auto est = estimate_lipschitz(F, T, 2000, 3);
  EXPECT_EQ(est.pairs, 2000);
  EXPECT_NEAR(est.sup_norm, 1.0, 1e-12);
  EXPECT_GT(est.max_quotient, 6.0);
  EXPECT_LE(est.max_quotient, 2 * std::numbers::pi + 1e-6);
}

TEST(Product, TorusTimesHeisenberg) {
  auto P = direct_product(Nilmanifold::torus(1), Nilmanifold::standard(algebras::heisenberg()));
  EXPECT_EQ(P.dim(), 4);
  EXPECT_EQ(P.degree(), 2);
  EXPECT_EQ(P.block(1), std::make_pair(0, 3));
  SplitMix64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const ElementQ g = P.from_psi(random_vec(rng, 4, 9, 4));
    auto r = reduce_to_fundamental(g, P);
    ASSERT_EQ(r.frac * r.integer, g);
  }
}
