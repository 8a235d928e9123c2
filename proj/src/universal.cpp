#include "nilkit/universal.hpp"

#include "nilkit/rng.hpp"

#include <algorithm>
#include <functional>

namespace nilkit {

namespace {

int entry(const std::vector<int>& v, int i) {
  return (i >= 1 && i <= static_cast<int>(v.size())) ? v[i - 1] : 0;
}

using Word = std::vector<int>;
using Poly = std::map<Word, long long>;

bool is_lyndon(const Word& w) {
  for (size_t k = 1; k < w.size(); ++k)
    if (!(w < Word(w.begin() + static_cast<std::ptrdiff_t>(k), w.end()))) return false;
  return !w.empty();
}

/// All Lyndon words of length <= n over {0..k-1} (Duval's generation order).
std::vector<Word> lyndon_words(int k, int n) {
  std::vector<Word> out;
  if (k == 0) return out;
  Word w{-1};
  while (!w.empty()) {
    ++w.back();
    out.push_back(w);
    const size_t m = w.size();
    while (static_cast<int>(w.size()) < n) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == k - 1) w.pop_back();
  }
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out[w] += ca * cb;
    }
  return out;
}

Poly commutator_poly(const Poly& a, const Poly& b) {
  Poly out = poly_mul(a, b);
  for (const auto& [w, c] : poly_mul(b, a)) out[w] -= c;
  for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

class LyndonExpander {
 public:
  const Poly& expand(const Word& w) {
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;
    Poly p;
    if (w.size() == 1) {
      p[w] = 1;
    } else {
      // Standard factorization: v is the longest proper suffix that is Lyndon.
      size_t split = 1;
      for (; split < w.size(); ++split)
        if (is_lyndon(Word(w.begin() + static_cast<std::ptrdiff_t>(split), w.end()))) break;
      Word u(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(split));
      Word v(w.begin() + static_cast<std::ptrdiff_t>(split), w.end());
      Poly pu = expand(u);
      Poly pv = expand(v);
      p = commutator_poly(pu, pv);
    }
    return memo_.emplace(w, std::move(p)).first->second;
  }

 private:
  std::map<Word, Poly> memo_;
};

}  // namespace

int GeneratorSpec::star(int i) const { return entry(d_star, i); }
int GeneratorSpec::lin(int i) const { return entry(d_lin, i); }
int GeneratorSpec::pet(int i) const { return entry(d_pet, i); }

int GeneratorSpec::total_generators() const {
  int n = 0;
  for (int i = 1; i <= s; ++i) n += total(i);
  return n;
}

void GeneratorSpec::check() const {
  if (s < 1) throw DomainError("generator spec: s must be at least 1");
  if (r_star < 1 || r_star > s) throw DomainError("generator spec: r_star must lie in [1, s]");
  for (const auto* v : {&d_star, &d_lin, &d_pet}) {
    if (static_cast<int>(v->size()) > s) throw DomainError("generator spec: count vector longer than s");
    for (int c : *v)
      if (c < 0) throw DomainError("generator spec: negative generator count");
  }
  if (s > kUniversalMaxDegree) throw CapExceeded("generator spec: s exceeds " + std::to_string(kUniversalMaxDegree));
  if (total_generators() > kUniversalMaxGenerators)
    throw CapExceeded("generator spec: more than " + std::to_string(kUniversalMaxGenerators) + " generators");
}

std::string GeneratorLabel::name() const {
  const char* tag = type == GeneratorType::Star ? "" : (type == GeneratorType::Lin ? "lin" : "pet");
  return std::string("e") + tag + "_{" + std::to_string(degree) + "," + std::to_string(index) + "}";
}

int UniversalAlgebra::weight(int basis_index) const {
  int w = 0;
  for (int l : words.at(static_cast<size_t>(basis_index))) w += letters[static_cast<size_t>(l)].degree;
  return w;
}

std::string UniversalAlgebra::basis_name(int basis_index) const {
  // Standard bracketing printed recursively.
  std::function<std::string(const Word&)> show = [&](const Word& w) -> std::string {
    if (w.size() == 1) return letters[static_cast<size_t>(w[0])].name();
    size_t split = 1;
    for (; split < w.size(); ++split)
      if (is_lyndon(Word(w.begin() + static_cast<std::ptrdiff_t>(split), w.end()))) break;
    return "[" + show(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(split))) + "," +
           show(Word(w.begin() + static_cast<std::ptrdiff_t>(split), w.end())) + "]";
  };
  return show(words.at(static_cast<size_t>(basis_index)));
}

UniversalAlgebra build_universal(const GeneratorSpec& spec) {
  spec.check();
  UniversalAlgebra U;
  U.spec = spec;
  for (int i = 1; i <= spec.s; ++i)
    for (int j = 1; j <= spec.total(i); ++j) {
      GeneratorType type = j <= spec.star(i) ? GeneratorType::Star
                           : j <= spec.star(i) + spec.lin(i) ? GeneratorType::Lin
                                                             : GeneratorType::Pet;
      U.letters.push_back({i, j, type});
    }
  const int k = static_cast<int>(U.letters.size());
  if (k == 0) throw DomainError("build_universal: no generators");

  auto weight_of = [&](const Word& w) {
    int s = 0;
    for (int l : w) s += U.letters[static_cast<size_t>(l)].degree;
    return s;
  };
  auto survives = [&](int weight, int length) {
    return weight < spec.s || (weight == spec.s && length <= spec.r_star);
  };

  for (auto& w : lyndon_words(k, spec.s))
    if (survives(weight_of(w), static_cast<int>(w.size()))) U.words.push_back(std::move(w));
  if (static_cast<int>(U.words.size()) > kMaxDim)
    throw CapExceeded("build_universal: dimension " + std::to_string(U.words.size()) + " exceeds " +
                      std::to_string(kMaxDim));
  std::stable_sort(U.words.begin(), U.words.end(), [&](const Word& a, const Word& b) {
    return std::make_tuple(weight_of(a), a.size(), a) < std::make_tuple(weight_of(b), b.size(), b);
  });
  const int d = static_cast<int>(U.words.size());
  std::map<Word, int> index;
  for (int b = 0; b < d; ++b) index[U.words[static_cast<size_t>(b)]] = b;

  LyndonExpander ex;
  std::vector<StructureConstant> upper;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const Word& wa = U.words[static_cast<size_t>(a)];
      const Word& wb = U.words[static_cast<size_t>(b)];
      if (!survives(weight_of(wa) + weight_of(wb), static_cast<int>(wa.size() + wb.size()))) continue;
      Poly p = commutator_poly(ex.expand(wa), ex.expand(wb));
      // Triangularity: the lex-smallest word of a Lie polynomial is Lyndon, and the
      // expansion of a Lyndon word w is w plus lex-larger words.
      while (!p.empty()) {
        const Word lead = p.begin()->first;
        const long long c = p.begin()->second;
        auto it = index.find(lead);
        if (it == index.end())
          throw InvariantFailure("universal-constructions", "bracket expansion left the Lyndon basis");
        upper.push_back({a, b, it->second, Rational(c)});
        for (const auto& [w, cw] : ex.expand(lead)) {
          long long& slot = p[w];
          slot -= c * cw;
          if (slot == 0) p.erase(w);
        }
      }
    }
  }
  int max_len = 1;
  for (const auto& w : U.words) max_len = std::max(max_len, static_cast<int>(w.size()));
  U.algebra = make_algebra_antisymmetric(d, std::min(spec.s, max_len), upper);
  if (!U.algebra->validated())
    throw InvariantFailure("universal-constructions", "constructed algebra fails Lie validation");

  for (int b = 0; b < d; ++b) {
    const Word& w = U.words[static_cast<size_t>(b)];
    if (w.size() == 1) {
      const auto& g = U.letters[static_cast<size_t>(w[0])];
      U.generators[{g.degree, g.index}] = b;
    }
  }
  for (const auto& g : U.letters)
    U.lattice_gens.emplace_back(U.algebra, U.algebra->basis_vector(U.generators.at({g.degree, g.index})));

  std::map<OrderingIndex, Subspace> groups;
  for (int dd = 0; dd <= spec.s; ++dd)
    for (int r = 0; r <= dd; ++r) {
      std::vector<int> cols;
      for (int b = 0; b < d; ++b) {
        const int w = weight_of(U.words[static_cast<size_t>(b)]);
        const int len = static_cast<int>(U.words[static_cast<size_t>(b)].size());
        if (w > dd || (w == dd && len >= r)) cols.push_back(b);
      }
      groups.emplace(OrderingIndex::degree_rank(dd, r), Subspace::coordinate(d, cols));
    }
  U.filtration = Filtration(U.algebra, Flavor::DegreeRank, IndexKind::DegreeRank, std::move(groups));
  return U;
}

UniversalQuotient build_quotient(const UniversalAlgebra& U) {
  UniversalQuotient Q;
  Q.spec = U.spec;
  Q.letters = U.letters;
  const int d = U.algebra->dim();
  auto count = [&](const Word& w, GeneratorType t) {
    int c = 0;
    for (int l : w) c += U.letters[static_cast<size_t>(l)].type == t ? 1 : 0;
    return c;
  };
  std::vector<int> rel_cols;
  for (int b = 0; b < d; ++b) {
    const Word& w = U.words[static_cast<size_t>(b)];
    const int pet = count(w, GeneratorType::Pet);
    const int lin = count(w, GeneratorType::Lin);
    if (pet >= 1 || lin + pet >= 2) rel_cols.push_back(b);
  }
  const Subspace rel_space = Subspace::coordinate(d, rel_cols);
  if (bracket_closure(*U.algebra, rel_space) != rel_space)
    throw InvariantFailure("universal-constructions", "G_Rel is not bracket-closed");
  Q.rel = Subalgebra(U.algebra, rel_space);
  Q.normal_check = Q.rel.is_ideal();
  if (!Q.normal_check) throw InvariantFailure("universal-constructions", "G_Rel is not an ideal");
  Q.quotient = quotient(U.filtration, Q.rel);

  for (const auto& g : U.letters)
    if (g.type == GeneratorType::Lin) Q.linear_generators.push_back(g);
  auto slot_of = [&](const GeneratorLabel& g) {
    for (size_t k = 0; k < Q.linear_generators.size(); ++k)
      if (Q.linear_generators[k].degree == g.degree && Q.linear_generators[k].index == g.index)
        return static_cast<int>(k);
    return -1;
  };
  const int q = Q.quotient.algebra->dim();
  std::vector<int> lin_cols;
  for (int a = 0; a < q; ++a) {
    const Word& w = U.words[static_cast<size_t>(Q.quotient.complement[static_cast<size_t>(a)])];
    Q.words.push_back(w);
    int slot = -1;
    if (count(w, GeneratorType::Lin) == 1)
      for (int l : w)
        if (U.letters[static_cast<size_t>(l)].type == GeneratorType::Lin) slot = slot_of(U.letters[static_cast<size_t>(l)]);
    Q.linear_slot.push_back(slot);
    if (slot >= 0) lin_cols.push_back(a);
  }
  const Subspace lin_space = Subspace::coordinate(q, lin_cols);
  const LieAlgebra& G = *Q.quotient.algebra;
  Q.abelian_check = bracket_span(G, lin_space, lin_space).is_zero();
  Q.lin_normal_check = lin_space.contains(bracket_span(G, Subspace::full(q), lin_space));
  if (!Q.abelian_check) throw InvariantFailure("universal-constructions", "G_Lin is not abelian");
  if (!Q.lin_normal_check) throw InvariantFailure("universal-constructions", "G_Lin is not normal in G_Quot");
  Q.lin = Subalgebra(Q.quotient.algebra, lin_space);
  return Q;
}

SemidirectGroup::SemidirectGroup(std::shared_ptr<const UniversalQuotient> Q) : q_(std::move(Q)) {
  if (!q_) throw DomainError("SemidirectGroup: null quotient");
}

bool MultiSubgroup::contains(const SemidirectElement<Rational>& x) const {
  if (!t_free && !x.t.isZero()) return false;
  return g.contains(x.g.log()) && g1.contains(x.g1.log());
}

bool MultiSubgroup::contains(const MultiSubgroup& o) const {
  if (o.t_free && !t_free) return false;
  return g.contains(o.g) && g1.contains(o.g1);
}

MultiSubgroup SemidirectGroup::filtration_at(int d1, int d2) const {
  if (d1 < 0 || d2 < 0) throw DomainError("filtration_at: negative index");
  const int q = q_->algebra()->dim();
  const Subspace& lin = q_->lin.space();
  MultiSubgroup out{false, Subspace(q), Subspace(q)};
  if (d1 > 1) return out;
  const Subspace level = d2 == 0 ? Subspace::full(q) : q_->filtration().at(d2, 0);
  if (d1 == 1) {
    out.t_free = d2 == 0;
    out.g = level.intersect(lin);
    return out;
  }
  out.t_free = d2 == 0;
  out.g = level;
  out.g1 = level.intersect(lin);
  return out;
}

int SemidirectGroup::filtration_depth() const { return q_->spec.s; }

namespace {

Rational small_rational(SplitMix64& rng) {
  return Rational(rng.uniform_int(-4, 4)) / Rational(rng.uniform_int(1, 3));
}

VecQ random_in(const Subspace& S, SplitMix64& rng) {
  VecQ v = VecQ::Zero(S.ambient_dim());
  for (int a = 0; a < S.dim(); ++a) v += small_rational(rng) * S.basis_vector(a);
  return v;
}

SemidirectElement<Rational> random_element(const SemidirectGroup& G, const MultiSubgroup& H, SplitMix64& rng) {
  VecQ t = VecQ::Zero(G.quotient().linear_dim());
  if (H.t_free)
    for (int i = 0; i < t.size(); ++i) t(i) = small_rational(rng);
  return G.make<Rational>(t, random_in(H.g, rng), random_in(H.g1, rng));
}

std::string idx_str(int a, int b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

}  // namespace

MultiFiltrationReport validate_semidirect_filtration(const SemidirectGroup& G, int samples, std::uint64_t seed) {
  MultiFiltrationReport rep;
  SplitMix64 rng(seed);
  const int top = G.filtration_depth() + 1;
  std::vector<std::pair<int, int>> indices;
  for (int d1 = 0; d1 <= 2; ++d1)
    for (int d2 = 0; d2 <= top; ++d2) indices.emplace_back(d1, d2);
  auto violation = [&](const std::string& kind, std::pair<int, int> a, std::pair<int, int> b, std::string detail) {
    rep.violations.push_back({kind, OrderingIndex::multi({a.first, a.second}),
                              OrderingIndex::multi({b.first, b.second}), std::move(detail)});
  };

  for (auto a : indices)
    for (auto b : indices)
      if (a.first <= b.first && a.second <= b.second &&
          !G.filtration_at(a.first, a.second).contains(G.filtration_at(b.first, b.second)))
        violation("nesting", a, b, idx_str(b.first, b.second) + " not inside " + idx_str(a.first, a.second));

  for (auto a : indices) {
    const MultiSubgroup H = G.filtration_at(a.first, a.second);
    for (int n = 0; n < samples; ++n) {
      auto x = random_element(G, H, rng);
      auto y = random_element(G, H, rng);
      ++rep.samples;
      if (!H.contains(G.multiply(x, y)) || !H.contains(G.inverse(x))) {
        violation("closure", a, a, "products or inverses leave the group");
        break;
      }
    }
  }

  // (0,0) is generated by (1,0) and (0,1): (t,(g,g1)) = (t,(id,id)) (0,(g,g1)).
  const MultiSubgroup all = G.filtration_at(0, 0), h10 = G.filtration_at(1, 0), h01 = G.filtration_at(0, 1);
  for (int n = 0; n < samples; ++n) {
    auto x = random_element(G, all, rng);
    auto e = G.identity<Rational>();
    auto left = G.make<Rational>(x.t, e.g.log(), e.g1.log());
    auto right = G.make<Rational>(VecQ::Zero(x.t.size()), x.g.log(), x.g1.log());
    ++rep.samples;
    if (!h10.contains(left) || !h01.contains(right) || !G.equal(G.multiply(left, right), x)) {
      violation("flavor", {0, 0}, {1, 0}, "(0,0) is not the join of (1,0) and (0,1)");
      break;
    }
  }

  for (size_t ia = 0; ia < indices.size(); ++ia)
    for (size_t ib = ia; ib < indices.size(); ++ib) {
      auto a = indices[ia], b = indices[ib];
      const MultiSubgroup A = G.filtration_at(a.first, a.second), B = G.filtration_at(b.first, b.second);
      if (A.is_trivial() || B.is_trivial()) continue;
      const MultiSubgroup C = G.filtration_at(a.first + b.first, a.second + b.second);
      for (int n = 0; n < samples; ++n) {
        auto x = random_element(G, A, rng);
        auto y = random_element(G, B, rng);
        auto c = G.multiply(G.multiply(G.inverse(x), G.inverse(y)), G.multiply(x, y));
        ++rep.samples;
        if (!C.contains(c)) {
          violation("commutator", a, b, "sampled commutator outside " + idx_str(a.first + b.first, a.second + b.second));
          break;
        }
      }
    }
  return rep;
}

}  // namespace nilkit
