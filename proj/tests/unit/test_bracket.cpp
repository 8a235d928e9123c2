#include "nilkit/bracket.hpp"
#include "nilkit/errors.hpp"
#include "nilkit/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

using namespace nilkit;

TEST(Frac, ConventionAndExamples) {
  EXPECT_EQ(frac(0.75), -0.25);
  EXPECT_EQ(frac(0.5), 0.5);
  EXPECT_EQ(frac(-0.5), 0.5);
  EXPECT_EQ(frac(3.0), 0.0);
  EXPECT_EQ(int_part(3.0), 3.0);
  EXPECT_EQ(int_part(2.5), 2.0);
  EXPECT_EQ(frac(0.75, BracketConvention::Floor), 0.75);
  EXPECT_EQ(int_part(-0.25, BracketConvention::Floor), -1.0);
  EXPECT_EQ(frac(Rational(3, 4)), Rational(-1, 4));
  EXPECT_EQ(frac(Rational(-1, 2)), Rational(1, 2));
  EXPECT_EQ(int_part(Rational(7, 2)), Integer(3));

  SplitMix64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = (rng.uniform() - 0.5) * std::ldexp(1.0, static_cast<int>(rng.uniform_int(-4, 40)));
    const double f = frac(x), n = int_part(x);
    ASSERT_GT(f, -0.5);
    ASSERT_LE(f, 0.5);
    ASSERT_EQ(n, std::floor(n));
    ASSERT_EQ(n + f, x);
    ASSERT_EQ(frac(f), f);
    const double g = frac(x, BracketConvention::Floor);
    ASSERT_GE(g, 0.0);
    ASSERT_LT(g, 1.0);
    ASSERT_EQ(int_part(x, BracketConvention::Floor), std::floor(x));
    const double m = static_cast<double>(rng.uniform_int(-1000, 1000));
    if (std::abs(x) < 1e6) ASSERT_NEAR(frac(x + m), f, 1e-9);
  }
}

TEST(BracketPhase, Examples) {
  auto m = BracketExpr::mul({BracketExpr::linear(0.3), BracketExpr::int_of(BracketExpr::linear(0.7))});
  EXPECT_NEAR(m.argument(3), 1.8, 1e-15);
  EXPECT_NEAR(std::abs(eval_bracket_phase(m, 3) - e(-0.2)), 0.0, 1e-14);

  auto zero = BracketExpr::mul({BracketExpr::linear(0.0), BracketExpr::int_of(BracketExpr::linear(0.7))});
  for (long long n = -5; n <= 5; ++n) EXPECT_EQ(eval_bracket_phase(zero, n), std::complex<double>(1.0, 0.0));

  // β ∈ Z collapses the bracket.
  auto collapse = BracketExpr::mul({BracketExpr::linear(0.37), BracketExpr::int_of(BracketExpr::linear(3.0))});
  auto quad = BracketExpr::mul({BracketExpr::linear(0.37 * 3.0), BracketExpr::linear(1.0)});
  for (long long n = -20; n <= 20; ++n)
    EXPECT_NEAR(std::abs(eval_bracket_phase(collapse, n) - eval_bracket_phase(quad, n)), 0.0, 1e-12);

  // a n [b n][c n] has depth 3 and is accepted, one more level is not.
  auto deep3 = BracketExpr::mul({BracketExpr::linear(0.1), BracketExpr::int_of(BracketExpr::linear(0.2)),
                                 BracketExpr::int_of(BracketExpr::linear(0.3))});
  EXPECT_EQ(deep3.monomial_depth(), 3);
  EXPECT_EQ(BracketExpr::sum({deep3, BracketExpr::linear(0.5)}).monomial_depth(), 3);
  EXPECT_NO_THROW(eval_bracket_phase(deep3, 4));
  EXPECT_THROW(eval_bracket_phase(BracketExpr::frac_of(deep3), 4), DomainError);

  // Floor convention differs from the nearest one when {βn} > ½.
  EXPECT_EQ(m.argument(1, BracketConvention::Floor), 0.0);
  EXPECT_NEAR(m.argument(1), 0.3, 1e-15);
}

TEST(Bohr, Examples) {
  BohrSetSpec B{20, {1}, 0.1};
  EXPECT_EQ(bohr_members(B), (std::vector<long long>{0, 1, 2, 18, 19}));
  BohrSetSpec full{12, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, 0.5};
  EXPECT_EQ(bohr_members(full).size(), 12u);
  EXPECT_THROW(bohr_members({10, {}, 0.1}), DomainError);
  EXPECT_THROW(bohr_members({10, {1}, 0.0}), DomainError);
  EXPECT_THROW(bohr_members({10, {1}, 0.6}), DomainError);
  EXPECT_THROW(bohr_members({kMaxBohrModulus + 1, {1}, 0.1}), CapExceeded);
  EXPECT_TRUE(bohr_contains({kMaxBohrModulus * 10, {3}, 0.1}, 0));
}

TEST(Bohr, MatchesBruteForceAndProperties) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const long long N = rng.uniform_int(1, 1000);
    std::vector<long long> S;
    for (int i = 0, k = static_cast<int>(rng.uniform_int(1, 3)); i < k; ++i) S.push_back(rng.uniform_int(-N, 2 * N));
    const double rho = 0.01 + 0.48 * rng.uniform();
    const auto members = bohr_members({N, S, rho});
    std::vector<long long> brute;
    for (long long x = 0; x < N; ++x) {
      bool in = true;
      for (long long s : S) {
        const Rational q = frac(Rational(s * x, N));
        if (abs(q) > from_double(rho)) in = false;
      }
      if (in) brute.push_back(x);
    }
    ASSERT_EQ(members, brute);
    ASSERT_TRUE(std::binary_search(members.begin(), members.end(), 0));
    for (long long x : members) ASSERT_TRUE(std::binary_search(members.begin(), members.end(), (N - x) % N));

    const auto smaller = bohr_members({N, S, rho / 2});
    ASSERT_TRUE(std::includes(members.begin(), members.end(), smaller.begin(), smaller.end()));

    std::vector<long long> S2{rng.uniform_int(0, N - 1)};
    std::vector<long long> SU = S;
    SU.push_back(S2[0]);
    const auto other = bohr_members({N, S2, rho});
    std::vector<long long> inter;
    std::set_intersection(members.begin(), members.end(), other.begin(), other.end(), std::back_inserter(inter));
    ASSERT_EQ(bohr_members({N, SU, rho}), inter);
  }
}

TEST(Bohr, PhiAdditiveBelowQuarter) {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const long long N = rng.uniform_int(50, 600);
    std::vector<long long> S{rng.uniform_int(1, N - 1), rng.uniform_int(1, N - 1)};
    const double rho = 0.05 + 0.19 * rng.uniform();
    const auto B = bohr_members({N, S, rho});
    std::set<long long> in(B.begin(), B.end());
    for (long long x : B)
      for (long long y : B)
        if (in.count((x + y) % N)) ASSERT_EQ(bohr_phi(S, N, x) + bohr_phi(S, N, y), bohr_phi(S, N, x + y));
  }
}

TEST(Freiman, Examples) {
  auto affine = [](const std::vector<long long>& A) {
    std::vector<Rational> f;
    for (auto a : A) f.push_back(Rational(3 * a + 2));
    return f;
  };
  std::vector<long long> A{4, -3, 7, 0, 11, 2};
  EXPECT_TRUE(is_freiman_hom(A, affine(A), 2).is_hom);
  EXPECT_TRUE(is_freiman_hom(A, affine(A), 3).is_hom);

  auto sq = is_freiman_hom({0, 1, 2}, {Rational(0), Rational(1), Rational(4)}, 2);
  EXPECT_FALSE(sq.is_hom);
  EXPECT_EQ(sq.witness_a, (std::vector<long long>{0, 2}));
  EXPECT_EQ(sq.witness_b, (std::vector<long long>{1, 1}));
  EXPECT_EQ(sq.f_sum_a, Rational(4));
  EXPECT_EQ(sq.f_sum_b, Rational(2));

  EXPECT_TRUE(is_freiman_hom({5}, {Rational(9)}, 2).is_hom);
  EXPECT_THROW(is_freiman_hom({1, 1}, {Rational(0), Rational(0)}, 2), DomainError);
  EXPECT_THROW(is_freiman_hom({1}, {Rational(0)}, 1), DomainError);
  std::vector<long long> big(4000);
  std::iota(big.begin(), big.end(), 0);
  EXPECT_THROW(is_freiman_hom(big, std::vector<Rational>(4000), 3), CapExceeded);
}

TEST(Freiman, MatchesEnumerationAndRestriction) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = static_cast<int>(rng.uniform_int(2, 3));
    std::set<long long> As;
    while (As.size() < 7) As.insert(rng.uniform_int(-15, 15));
    std::vector<long long> A(As.begin(), As.end());
    // Values: a Freiman-friendly map on a random residue class with occasional noise.
    std::vector<Rational> f;
    const long long slope = rng.uniform_int(-3, 3);
    for (auto a : A) f.push_back(Rational(slope * a, 2) + (rng.uniform() < 0.15 ? Rational(1, 3) : Rational(0)));

    bool brute = true;
    std::vector<std::size_t> i(static_cast<std::size_t>(k)), j(static_cast<std::size_t>(k));
    const std::size_t m = A.size();
    const std::size_t total = k == 2 ? m * m : m * m * m;
    for (std::size_t u = 0; u < total && brute; ++u)
      for (std::size_t v = 0; v < total && brute; ++v) {
        long long su = 0, sv = 0;
        Rational fu, fv;
        for (std::size_t t = 0, uu = u, vv = v; t < static_cast<std::size_t>(k); ++t, uu /= m, vv /= m) {
          su += A[uu % m];
          sv += A[vv % m];
          fu += f[uu % m];
          fv += f[vv % m];
        }
        if (su == sv && fu != fv) brute = false;
      }
    const auto r = is_freiman_hom(A, f, k);
    ASSERT_EQ(r.is_hom, brute);
    if (!r.is_hom) {
      long long sa = 0, sb = 0;
      for (int t = 0; t < k; ++t) {
        sa += r.witness_a[static_cast<std::size_t>(t)];
        sb += r.witness_b[static_cast<std::size_t>(t)];
      }
      ASSERT_EQ(sa, sb);
      ASSERT_NE(r.f_sum_a, r.f_sum_b);
    } else {
      // Restriction to any subset stays a homomorphism.
      std::vector<long long> B;
      std::vector<Rational> fb;
      for (std::size_t t = 0; t < m; ++t)
        if (rng.uniform() < 0.6) {
          B.push_back(A[t]);
          fb.push_back(f[t]);
        }
      if (!B.empty()) ASSERT_TRUE(is_freiman_hom(B, fb, k).is_hom);
    }
  }
}

TEST(Freiman, RationalFallback) {
  std::vector<long long> A{0, 1, 2, 3};
  const Rational huge = Rational(Integer(1) << 100, 3);
  std::vector<Rational> f;
  for (auto a : A) f.push_back(huge * a);
  EXPECT_TRUE(is_freiman_hom(A, f, 2).is_hom);
  f[3] += Rational(1, 7);
  EXPECT_FALSE(is_freiman_hom(A, f, 2).is_hom);
}

TEST(Rounding, ExamplesAndDefects) {
  VecD eps(1);
  eps << 0.1;
  VecD v(1);
  v << 0.26;
  EXPECT_NEAR(round_to_lattice({v}, eps)[0](0), 0.3, 1e-15);

  std::vector<VecD> lattice;
  for (int k = -30; k <= 30; ++k) {
    VecD w(1);
    w << static_cast<double>(k) * 0.1;
    lattice.push_back(w);
  }
  const auto r = round_to_lattice(lattice, eps);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i](0), lattice[i](0));

  VecD tie(2), e2(2);
  tie << 0.25, -0.25;
  e2 << 0.5, 0.5;
  const auto t = round_to_lattice({tie}, e2)[0];
  EXPECT_EQ(t(0), 0.5);
  EXPECT_EQ(t(1), 0.0);
  EXPECT_THROW(round_to_lattice({tie}, VecD::Zero(2)), DomainError);

  SplitMix64 rng(9);
  for (int family = 0; family < 100; ++family) {
    const int H = 24, dim = 3;
    VecD ep(dim);
    for (int j = 0; j < dim; ++j) ep(j) = 0.01 + 0.2 * rng.uniform();
    std::vector<VecD> f;
    VecD slope = VecD::Random(dim);
    for (int h = 0; h < H; ++h) {
      VecD x(dim);
      for (int j = 0; j < dim; ++j) x(j) = (0.1 + slope(j)) * h + 0.05 * (rng.uniform() - 0.5);
      f.push_back(x);
    }
    const auto g = round_to_lattice(f, ep);
    for (int h = 0; h < H; ++h)
      for (int j = 0; j < dim; ++j) {
        ASSERT_LE(std::abs(g[static_cast<std::size_t>(h)](j) - f[static_cast<std::size_t>(h)](j)),
                  ep(j) / 2 * (1 + 1e-12));
        const double k = g[static_cast<std::size_t>(h)](j) / ep(j);
        ASSERT_NEAR(k, std::round(k), 1e-9);
      }
    for (int q = 0; q < 50; ++q) {
      const std::size_t a = static_cast<std::size_t>(rng.uniform_int(0, H - 1));
      const std::size_t b = static_cast<std::size_t>(rng.uniform_int(0, H - 1));
      const std::size_t c = static_cast<std::size_t>(rng.uniform_int(0, H - 1));
      const long long dd = static_cast<long long>(a + b) - static_cast<long long>(c);
      if (dd < 0 || dd >= H) continue;
      const std::array<std::size_t, 4> quad{a, b, c, static_cast<std::size_t>(dd)};
      const VecD before = quadruple_defect(f, quad), after = quadruple_defect(g, quad);
      for (int j = 0; j < dim; ++j) ASSERT_LE(after(j), before(j) + 2 * ep(j) + 1e-12);
    }
  }
}

TEST(BracketLinear, VerifyExactAndPerturbed) {
  BracketLinearModel m;
  m.dim = 2;
  m.N = 50;
  m.N_prime = next_prime(5000);
  m.gamma = VecD(2);
  m.gamma << 0.1, -0.3;
  VecD a1(2), a2(2);
  a1 << 0.4, 1.5;
  a2 << -0.7, 0.25;
  m.terms = {{a1, Rational(7, m.N_prime)}, {a2, Rational(-123, m.N_prime)}};
  std::vector<long long> H;
  std::vector<VecD> f;
  for (long long h = 1; h <= 50; ++h) {
    H.push_back(h);
    f.push_back(m.evaluate(h));
  }
  VecD eps = VecD::Constant(2, 0.01);
  auto rep = verify_bracket_linear(m, H, f, eps);
  EXPECT_EQ(rep.max_violation, VecD::Zero(2));
  EXPECT_EQ(rep.pass, H);

  f[16](1) += 0.3;
  rep = verify_bracket_linear(m, H, f, eps);
  EXPECT_EQ(rep.fail, std::vector<long long>{17});
  EXPECT_EQ(rep.pass.size(), 49u);
  EXPECT_NEAR(rep.max_violation(1), 0.3, 1e-12);

  // Integer shifts of the residual are invisible.
  f[16](1) += 0.7;
  EXPECT_TRUE(verify_bracket_linear(m, H, f, eps).fail.empty());

  BracketLinearModel bad = m;
  bad.N_prime = 5000;
  EXPECT_THROW(bad.validate(), DomainError);
  bad.N_prime = 20011;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(BracketLinear, SingleFrequencyFit) {
  const long long N = 50;
  const long long Np = next_prime(100 * N);
  EXPECT_EQ(Np, 5003);
  std::vector<double> f;
  for (long long h = 1; h <= N; ++h) {
    const double phi = static_cast<double>(7 * h <= Np / 2 ? 7 * h : 7 * h - Np) / static_cast<double>(Np);
    f.push_back(0.4 * phi + 0.1);
  }
  const auto fit = fit_single_frequency(f);
  EXPECT_EQ(fit.N_prime, Np);
  EXPECT_LE(fit.violation, 1e-12);
  // 7h/N' never wraps on [50], so only a·p is identified: every optimum has a·p = 2.8.
  bool found = false;
  for (const auto& c : fit.optima) {
    EXPECT_LE(c.violation, 1e-12);
    EXPECT_NEAR(c.a * (c.beta * Np).convert_to<double>(), 2.8, 1e-9);
    if (std::abs(c.a - 0.4) < 1e-15 && c.beta == Rational(7, Np)) {
      found = true;
      EXPECT_NEAR(c.gamma, 0.1, 1e-12);
    }
  }
  EXPECT_TRUE(found);
  // p ∈ ±{4, 7, 8, 14, 28}; p = 56 (a = 0.05) wraps before h = 50.
  EXPECT_EQ(fit.optima.size(), 10u);

  // A frequency that wraps inside the range is identified uniquely.
  std::vector<double> g;
  for (long long h = 1; h <= N; ++h) {
    const long long r = (1500 * h) % Np;
    g.push_back(0.4 * static_cast<double>(2 * r > Np ? r - Np : r) / static_cast<double>(Np) + 0.1);
  }
  const auto fg = fit_single_frequency(g);
  // Up to the symmetry (a, β) ↦ (−a, −β).
  ASSERT_EQ(fg.optima.size(), 2u);
  EXPECT_EQ(fg.optima[1].beta, Rational(-1500, Np));
  EXPECT_NEAR(fg.a, 0.4, 1e-15);
  EXPECT_EQ(fg.beta, Rational(1500, Np));
  EXPECT_NEAR(fg.gamma, 0.1, 1e-12);
  EXPECT_THROW(fit_single_frequency(std::vector<double>(1001)), CapExceeded);
}

TEST(Gap, OneDimensional) {
  // P = {5 n : |n| ≤ 3} in Z/101Z with α = 2: u = 1 / {10/101}.
  GapCoordinates P({101, {5}, {3}, {2}});
  EXPECT_EQ(P.dual()(0, 0), Rational(101, 10));
  for (const auto& [x, n] : P.enumerate()) {
    auto c = gap_dual_coordinates(P, x);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(*c, n);
  }
  EXPECT_EQ(*gap_dual_coordinates(P, 0), std::vector<long long>{0});
  EXPECT_FALSE(gap_dual_coordinates(P, 1).has_value());
  EXPECT_FALSE(gap_dual_coordinates(P, 20).has_value());
}

TEST(Gap, DeskInstanceMatchesEnumeration) {
  GapCoordinates P({101, {1, 10}, {4, 4}, {1, 10}});
  std::map<long long, std::vector<long long>> brute;
  for (long long a = -4; a <= 4; ++a)
    for (long long b = -4; b <= 4; ++b) brute[((a + 10 * b) % 101 + 101) % 101] = {a, b};
  EXPECT_EQ(brute.size(), 81u);
  for (long long x = 0; x < 101; ++x) {
    auto c = gap_dual_coordinates(P, x);
    auto it = brute.find(x);
    if (it == brute.end()) {
      EXPECT_FALSE(c.has_value()) << x;
    } else {
      ASSERT_TRUE(c.has_value()) << x;
      EXPECT_EQ(*c, it->second);
    }
  }
  EXPECT_EQ(*gap_dual_coordinates(P, 0), (std::vector<long long>{0, 0}));

  // Freiman homomorphism f(Σ ℓ_i n_i) = f(0) + Σ n_i c_i through the bracket-linear model.
  VecD f0(1), f1(1), f2(1);
  f0 << 0.125;
  f1 << 0.375;
  f2 << -0.8;
  const auto model = P.freiman_model(f0, {f1, f2});
  for (const auto& [x, n] : P.enumerate()) {
    const double expect = 0.125 + static_cast<double>(n[0]) * (0.375 - 0.125) + static_cast<double>(n[1]) * (-0.8 - 0.125);
    EXPECT_NEAR(model.evaluate(x)(0), expect, 1e-12);
  }
}

TEST(Gap, CertificateFailures) {
  EXPECT_THROW(GapCoordinates({101, {1, 2}, {2, 2}, {1}}), DomainError);      // rank
  EXPECT_THROW(GapCoordinates({101, {1, 3}, {4, 4}, {1, 10}}), DomainError);  // not proper
  EXPECT_THROW(GapCoordinates({101, {30}, {3}, {1}}), DomainError);           // Φ not additive
  EXPECT_THROW(GapCoordinates({101, {1}, {600000}, {1}}), CapExceeded);
}
