#include <gtest/gtest.h>

#include "helpers.hpp"
#include "nilkit/universal.hpp"

using namespace nilkit;
using namespace testing_helpers;

namespace {

GeneratorSpec spec(int s, int r, std::vector<int> star, std::vector<int> lin = {}, std::vector<int> pet = {}) {
  return GeneratorSpec{s, r, std::move(star), std::move(lin), std::move(pet)};
}

// Witt's necklace formula: dimension of the length-n part of the free Lie algebra on k letters.
long witt(long k, int n) {
  auto mobius = [](int m) {
    int res = 1;
    for (int p = 2; p * p <= m; ++p)
      if (m % p == 0) {
        m /= p;
        if (m % p == 0) return 0;
        res = -res;
      }
    return m > 1 ? -res : res;
  };
  long total = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) {
      long pw = 1;
      for (int e = 0; e < n / d; ++e) pw *= k;
      total += mobius(d) * pw;
    }
  return total / n;
}

// Degree-one generators only: the surviving lengths are n < s, and n = s when s <= r*.
long oracle_dim(int k, int s, int r_star) {
  long d = 0;
  for (int n = 1; n < s; ++n) d += witt(k, n);
  if (s <= r_star) d += witt(k, s);
  return d;
}

std::shared_ptr<const UniversalQuotient> desk_quotient() {
  return std::make_shared<const UniversalQuotient>(build_quotient(build_universal(spec(2, 2, {1}, {1}, {1}))));
}

VecQ random_in(const Subspace& S, SplitMix64& rng) {
  VecQ v = VecQ::Zero(S.ambient_dim());
  for (int a = 0; a < S.dim(); ++a) v += random_rational(rng) * S.basis_vector(a);
  return v;
}

std::shared_ptr<const UniversalQuotient> larger_quotient() {
  return std::make_shared<const UniversalQuotient>(
      build_quotient(build_universal(spec(3, 2, {2, 1}, {1}, {1}))));
}

}  // namespace

TEST(Universal, Examples) {
  auto H = build_universal(spec(2, 2, {2}));
  EXPECT_EQ(H.algebra->dim(), 3);
  EXPECT_EQ(nilpotency_step(*H.algebra), 2);
  EXPECT_EQ(build_universal(spec(1, 1, {4})).algebra->dim(), 4);
  EXPECT_EQ(nilpotency_step(*build_universal(spec(1, 1, {4})).algebra), 1);
  auto U21 = build_universal(spec(2, 1, {2, 1}));
  EXPECT_EQ(U21.algebra->dim(), 3);
  EXPECT_EQ(nilpotency_step(*U21.algebra), 1);
  EXPECT_EQ(build_universal(spec(3, 2, {2})).algebra->dim(), 3);
  EXPECT_EQ(build_universal(spec(3, 3, {2})).algebra->dim(), 5);
}

TEST(Universal, DimensionMatchesWittOracle) {
  for (int d1 = 1; d1 <= 4; ++d1) {
    EXPECT_EQ(build_universal(spec(2, 2, {d1})).algebra->dim(), d1 + d1 * (d1 - 1) / 2);
    for (int s = 1; s <= 4; ++s)
      for (int r = 1; r <= s; ++r) {
        if (oracle_dim(d1, s, r) > kMaxDim) continue;
        EXPECT_EQ(build_universal(spec(s, r, {d1})).algebra->dim(), oracle_dim(d1, s, r)) << d1 << " " << s << " " << r;
      }
  }
}

TEST(Universal, FiltrationAndJacobiValid) {
  for (const auto& sp : {spec(2, 2, {2}), spec(3, 2, {2, 1}), spec(3, 3, {2, 1}), spec(4, 2, {2, 1}),
                         spec(4, 4, {2}), spec(5, 3, {1, 1, 1})}) {
    auto U = build_universal(sp);
    EXPECT_TRUE(U.algebra->validated());
    auto rep = validate_filtration(U.filtration);
    EXPECT_TRUE(rep.passed()) << (rep.violations.empty() ? "" : rep.violations[0].detail);
    EXPECT_EQ(U.lattice_gens.size(), U.letters.size());
  }
}

TEST(Universal, CapsAreErrors) {
  EXPECT_THROW(build_universal(spec(6, 1, {1})), CapExceeded);
  EXPECT_THROW(build_universal(spec(2, 2, {5}, {2}, {2})), CapExceeded);
  EXPECT_THROW(build_universal(spec(5, 5, {4})), CapExceeded);  // dimension beyond kMaxDim
  EXPECT_THROW(build_universal(spec(2, 3, {1})), DomainError);
}

TEST(UniversalQuotient, DeskExample) {
  auto U = build_universal(spec(2, 2, {1}, {1}, {1}));
  EXPECT_EQ(U.algebra->dim(), 6);
  auto Q = build_quotient(U);
  EXPECT_EQ(Q.rel.dim(), 3);
  EXPECT_EQ(Q.algebra()->dim(), 3);
  EXPECT_EQ(Q.lin.dim(), 2);
  EXPECT_TRUE(Q.normal_check);
  EXPECT_TRUE(Q.abelian_check);
  EXPECT_TRUE(Q.lin_normal_check);
  // Basis e_*, e_lin, [e_*, e_lin] with the Heisenberg bracket.
  EXPECT_EQ(Q.algebra()->bracket<Rational>(Q.algebra()->basis_vector(0), Q.algebra()->basis_vector(1)),
            Q.algebra()->basis_vector(2));
  EXPECT_EQ(Q.linear_slot, (std::vector<int>{-1, 0, 0}));
  EXPECT_TRUE(validate_filtration(Q.filtration()).passed());
}

TEST(UniversalQuotient, NoLinearNoPetal) {
  auto U = build_universal(spec(3, 2, {2, 1}));
  auto Q = build_quotient(U);
  EXPECT_EQ(Q.rel.dim(), 0);
  EXPECT_EQ(*Q.algebra(), *U.algebra);
  EXPECT_EQ(Q.lin.dim(), 0);
}

TEST(UniversalQuotient, LargerSpecChecks) {
  auto Q = larger_quotient();
  EXPECT_TRUE(Q->normal_check && Q->abelian_check && Q->lin_normal_check);
  EXPECT_TRUE(validate_filtration(Q->filtration()).passed());
}

TEST(Rho, TrivialValues) {
  auto Q = desk_quotient();
  SplitMix64 rng(31);
  auto g = ElementQ(Q->algebra(), random_vec(rng, 3));
  EXPECT_EQ(rho_power(*Q, g, vq({1})), g);
  auto e_lin = ElementQ(Q->algebra(), Q->algebra()->basis_vector(1));
  EXPECT_TRUE(rho_power(*Q, e_lin, vq({0})).is_identity());
  EXPECT_THROW(rho_power(*Q, g, vq({1, 2})), DomainError);
}

TEST(Rho, LawsOnRandomRationalInstances) {
  for (const auto& Q : {desk_quotient(), larger_quotient()}) {
    SemidirectGroup G(Q);
    const auto& A = Q->algebra();
    const int q = A->dim(), L = Q->linear_dim();
    SplitMix64 rng(32);
    for (int n = 0; n < 100; ++n) {
      VecQ s = random_vec(rng, L), t = random_vec(rng, L);
      ElementQ g(A, random_vec(rng, q)), h(A, random_vec(rng, q));
      ElementQ g1(A, random_in(Q->lin.space(), rng)), h1(A, random_in(Q->lin.space(), rng));
      // (g^t)^s = g^{ts}, and the map is a homomorphism of G_Quot.
      EXPECT_EQ(rho_power(*Q, rho_power(*Q, g, t), s), rho_power(*Q, g, VecQ(t.cwiseProduct(s))));
      EXPECT_EQ(rho_power(*Q, g * h, t), rho_power(*Q, g, t) * rho_power(*Q, h, t));
      // On G_Lin: g1^t g1^s = g1^{t+s}.
      EXPECT_EQ(rho_power(*Q, g1, t) * rho_power(*Q, g1, s), rho_power(*Q, g1, VecQ(t + s)));
      // (g g1 g^{-1})^t = g g1^t g^{-1}.
      EXPECT_EQ(rho_power(*Q, g * g1 * g.inverse(), t), g * rho_power(*Q, g1, t) * g.inverse());
      // ρ(s)∘ρ(t) = ρ(s+t), and ρ(t) is a homomorphism of G_Quot ⋉ G_Lin.
      auto a = std::make_pair(g, g1), b = std::make_pair(h, h1);
      auto lhs = G.rho(s, G.rho(t, a)), rhs = G.rho(VecQ(s + t), a);
      EXPECT_TRUE(lhs.first == rhs.first && lhs.second == rhs.second);
      auto hom_l = G.rho(t, G.inner_multiply(a, b));
      auto hom_r = G.inner_multiply(G.rho(t, a), G.rho(t, b));
      EXPECT_TRUE(hom_l.first == hom_r.first && hom_l.second == hom_r.second);
    }
  }
}

TEST(Rho, LatticeStability) {
  // Desk quotient: Γ_Quot = {exp(x a + y b + z [a,b]) : x, y ∈ Z, z - xy/2 ∈ Z}.
  auto Q = desk_quotient();
  const auto& A = Q->algebra();
  auto in_lattice = [](const ElementQ& g) {
    const VecQ& v = g.log();
    return is_integer(v(0)) && is_integer(v(1)) && is_integer(Rational(v(2) - v(0) * v(1) / 2));
  };
  SplitMix64 rng(33);
  for (int n = 0; n < 100; ++n) {
    auto gamma = ElementQ::identity(A);
    for (int k = 0; k < 6; ++k) {
      auto gen = ElementQ(A, A->basis_vector(static_cast<int>(rng.uniform_int(0, 1))));
      gamma = gamma * gen.pow(Rational(rng.uniform_int(-3, 3)));
    }
    ASSERT_TRUE(in_lattice(gamma));
    auto g1 = gamma * ElementQ(A, A->basis_vector(1)).pow(Rational(rng.uniform_int(-3, 3))) * gamma.inverse();
    ASSERT_TRUE(Q->lin.contains(g1.log()));
    EXPECT_TRUE(in_lattice(rho_power(*Q, g1, vq({Rational(rng.uniform_int(-4, 4))}))));
  }
}

TEST(Semidirect, GroupLaws) {
  for (const auto& Q : {desk_quotient(), larger_quotient()}) {
    SemidirectGroup G(Q);
    const int q = Q->algebra()->dim(), L = Q->linear_dim();
    SplitMix64 rng(34);
    auto random_el = [&]() {
      return G.make<Rational>(random_vec(rng, L), random_vec(rng, q), random_in(Q->lin.space(), rng));
    };
    const auto e = G.identity<Rational>();
    for (int n = 0; n < 100; ++n) {
      auto a = random_el(), b = random_el(), c = random_el();
      EXPECT_TRUE(G.equal(G.multiply(G.multiply(a, b), c), G.multiply(a, G.multiply(b, c))));
      EXPECT_TRUE(G.equal(G.multiply(a, G.inverse(a)), e));
      EXPECT_TRUE(G.equal(G.multiply(G.inverse(a), a), e));
      EXPECT_TRUE(G.equal(G.multiply(a, e), a));
      EXPECT_TRUE(G.equal(G.multiply(e, a), a));
      a.t.setZero();
      b.t.setZero();
      auto ab = G.multiply(a, b);
      auto inner = G.inner_multiply(std::make_pair(a.g, a.g1), std::make_pair(b.g, b.g1));
      EXPECT_TRUE(ab.g == inner.first && ab.g1 == inner.second);
    }
    EXPECT_THROW(G.make<Rational>(VecQ::Zero(L), VecQ::Zero(q), VecQ(Q->algebra()->basis_vector(0))), DomainError);
  }
}

TEST(Semidirect, MultidegreeFiltration) {
  for (const auto& Q : {desk_quotient(), larger_quotient()}) {
    SemidirectGroup G(Q);
    for (int d2 = 0; d2 < 5; ++d2) EXPECT_TRUE(G.filtration_at(2, d2).is_trivial());
    auto rep = validate_semidirect_filtration(G, 8, 35);
    EXPECT_TRUE(rep.passed()) << (rep.violations.empty() ? "" : rep.violations[0].kind + " " + rep.violations[0].detail);
    // (1,0) commutes with itself.
    SplitMix64 rng(36);
    const auto H = G.filtration_at(1, 0);
    for (int n = 0; n < 20; ++n) {
      auto x = G.make<Rational>(random_vec(rng, Q->linear_dim()), random_in(H.g, rng), VecQ::Zero(Q->algebra()->dim()));
      auto y = G.make<Rational>(random_vec(rng, Q->linear_dim()), random_in(H.g, rng), VecQ::Zero(Q->algebra()->dim()));
      EXPECT_TRUE(G.equal(G.multiply(x, y), G.multiply(y, x)));
    }
  }
}
