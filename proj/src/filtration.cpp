#include "nilkit/filtration.hpp"

#include <algorithm>
#include <sstream>

namespace nilkit {

OrderingIndex OrderingIndex::degree_rank(int d, int r) {
  if (d < 0 || r < 0) throw DomainError("degree-rank index must be nonnegative");
  return {IndexKind::DegreeRank, {d, r}};
}

int OrderingIndex::total() const {
  switch (kind) {
    case IndexKind::Degree:
    case IndexKind::DegreeRank:
      return v.at(0);
    case IndexKind::MultiDegree: {
      int s = 0;
      for (int x : v) s += x;
      return s;
    }
  }
  return 0;
}

bool OrderingIndex::is_zero() const {
  return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

std::string OrderingIndex::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

Comparison compare(const OrderingIndex& a, const OrderingIndex& b) {
  if (a.kind != b.kind || a.v.size() != b.v.size()) throw DomainError("compare: ordering variant mismatch");
  switch (a.kind) {
    case IndexKind::Degree:
      return a.v[0] <= b.v[0] ? Comparison::LessOrEqual : Comparison::Greater;
    case IndexKind::DegreeRank:
      if (a.v[0] < b.v[0] || (a.v[0] == b.v[0] && a.v[1] <= b.v[1])) return Comparison::LessOrEqual;
      return Comparison::Greater;
    case IndexKind::MultiDegree: {
      bool le = true, ge = true;
      for (size_t i = 0; i < a.v.size(); ++i) {
        le = le && a.v[i] <= b.v[i];
        ge = ge && a.v[i] >= b.v[i];
      }
      if (le) return Comparison::LessOrEqual;
      if (ge) return Comparison::Greater;
      return Comparison::Incomparable;
    }
  }
  return Comparison::Incomparable;
}

bool precedes(const OrderingIndex& a, const OrderingIndex& b) {
  return compare(a, b) == Comparison::LessOrEqual;
}

OrderingIndex add(const OrderingIndex& a, const OrderingIndex& b) {
  if (a.kind != b.kind || a.v.size() != b.v.size()) throw DomainError("add: ordering variant mismatch");
  OrderingIndex out{a.kind, a.v};
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
  return out;
}

Subalgebra::Subalgebra(AlgebraPtr ambient, Subspace space) : ambient_(std::move(ambient)), space_(std::move(space)) {
  if (space_.ambient_dim() != ambient_->dim()) throw DomainError("Subalgebra: ambient dimension mismatch");
  for (int a = 0; a < space_.dim(); ++a)
    for (int b = a + 1; b < space_.dim(); ++b)
      if (!space_.contains(ambient_->bracket<Rational>(space_.basis_vector(a), space_.basis_vector(b))))
        throw DomainError("Subalgebra: span is not closed under the bracket");
}

Subalgebra::Subalgebra(AlgebraPtr ambient, const std::vector<VecQ>& vectors)
    : Subalgebra(ambient, Subspace(ambient->dim(), vectors)) {}

bool Subalgebra::is_ideal() const {
  for (int i = 0; i < ambient_->dim(); ++i) {
    VecQ e = ambient_->basis_vector(i);
    for (int b = 0; b < space_.dim(); ++b)
      if (!space_.contains(ambient_->bracket<Rational>(e, space_.basis_vector(b)))) return false;
  }
  return true;
}

Subspace bracket_closure(const LieAlgebra& L, const Subspace& start) {
  SpanBuilder span(start);
  // Every vector is bracketed against everything found before it.
  std::vector<VecQ> all = start.basis_vectors();
  size_t next = 0;
  while (next < all.size()) {
    VecQ v = all[next++];
    for (size_t j = 0; j < next; ++j) {
      VecQ b = L.bracket<Rational>(all[j], v);
      if (span.add(b)) all.push_back(b);
    }
  }
  return span.finish();
}

Subalgebra join(const Subalgebra& a, const Subalgebra& b) {
  if (a.ambient() != b.ambient() && !(*a.ambient() == *b.ambient()))
    throw DomainError("join: ambient algebra mismatch");
  return Subalgebra(a.ambient(), bracket_closure(*a.ambient(), a.space().sum(b.space())));
}

Filtration::Filtration(AlgebraPtr algebra, Flavor flavor, IndexKind kind, std::map<OrderingIndex, Subspace> groups)
    : algebra_(std::move(algebra)), flavor_(flavor), kind_(kind), groups_(std::move(groups)) {
  for (const auto& [idx, sp] : groups_) {
    if (idx.kind != kind_) throw DomainError("Filtration: index kind mismatch at " + idx.str());
    if (sp.ambient_dim() != algebra_->dim()) throw DomainError("Filtration: subspace dimension mismatch");
    if (kind_ == IndexKind::DegreeRank && idx.v.size() != 2) throw DomainError("Filtration: degree-rank index needs two entries");
    if (kind_ == IndexKind::Degree && idx.v.size() != 1) throw DomainError("Filtration: degree index needs one entry");
  }
}

int Filtration::degree() const {
  int d = 0;
  for (const auto& [idx, sp] : groups_)
    if (!sp.is_zero()) d = std::max(d, idx.total());
  return d;
}

int Filtration::arity() const {
  if (kind_ != IndexKind::MultiDegree || groups_.empty()) return 1;
  return static_cast<int>(groups_.begin()->first.v.size());
}

Subspace Filtration::at(const OrderingIndex& i) const {
  if (i.kind != kind_) throw DomainError("Filtration: lookup with wrong index kind");
  auto it = groups_.find(i);
  if (it != groups_.end()) return it->second;
  if (i.is_zero()) return Subspace::full(algebra_->dim());
  if (kind_ == IndexKind::DegreeRank && i.v[1] > i.v[0]) return at(OrderingIndex::degree_rank(i.v[0] + 1, 0));
  return Subspace(algebra_->dim());
}

FiltrationReport validate_filtration(const Filtration& F) {
  FiltrationReport rep;
  const LieAlgebra& L = *F.algebra();
  const auto& groups = F.groups();
  for (const auto& [i, Gi] : groups) {
    for (int a = 0; a < Gi.dim(); ++a)
      for (int b = a + 1; b < Gi.dim(); ++b)
        if (!Gi.contains(L.bracket<Rational>(Gi.basis_vector(a), Gi.basis_vector(b)))) {
          rep.violations.push_back({"closure", i, i, "group is not bracket-closed"});
          a = Gi.dim();
          break;
        }
  }
  for (const auto& [i, Gi] : groups) {
    for (const auto& [j, Gj] : groups) {
      if (i == j) continue;
      if (precedes(i, j) && !Gi.contains(Gj))
        rep.violations.push_back({"nesting", i, j, "G_j not contained in G_i although i precedes j"});
    }
  }
  for (const auto& [i, Gi] : groups) {
    for (const auto& [j, Gj] : groups) {
      if (j < i) continue;  // the bracket condition is symmetric in (i, j)
      Subspace target = F.at(add(i, j));
      bool ok = true;
      for (int a = 0; a < Gi.dim() && ok; ++a)
        for (int b = 0; b < Gj.dim() && ok; ++b)
          ok = target.contains(L.bracket<Rational>(Gi.basis_vector(a), Gj.basis_vector(b)));
      if (!ok) rep.violations.push_back({"commutator", i, j, "[G_i, G_j] not contained in G_{i+j}"});
    }
  }
  const int d = L.dim();
  auto flavor_check = [&](const OrderingIndex& a, const OrderingIndex& b, const std::string& what) {
    if (F.at(a) != F.at(b)) rep.violations.push_back({"flavor", a, b, what});
  };
  switch (F.flavor()) {
    case Flavor::Plain:
      break;
    case Flavor::Degree:
      if (F.at_degree(0) != Subspace::full(d))
        rep.violations.push_back({"flavor", OrderingIndex::degree(0), OrderingIndex::degree(0), "G_0 must be G"});
      flavor_check(OrderingIndex::degree(0), OrderingIndex::degree(1), "degree flavor requires G_0 = G_1");
      break;
    case Flavor::DegreeRank: {
      if (F.at(0, 0) != Subspace::full(d))
        rep.violations.push_back({"flavor", OrderingIndex::degree_rank(0, 0), OrderingIndex::degree_rank(0, 0),
                                  "G_(0,0) must be G"});
      flavor_check(OrderingIndex::degree_rank(0, 0), OrderingIndex::degree_rank(1, 0),
                   "degree-rank flavor requires G_(0,0) = G_(1,0)");
      const int s = F.degree();
      for (int i = 1; i <= s + 1; ++i)
        flavor_check(OrderingIndex::degree_rank(i, 0), OrderingIndex::degree_rank(i, 1),
                     "degree-rank flavor requires G_(i,0) = G_(i,1)");
      break;
    }
    case Flavor::MultiDegree: {
      const int k = F.arity();
      Subspace joined(d);
      for (int i = 0; i < k; ++i) {
        std::vector<int> e(k, 0);
        e[i] = 1;
        joined = joined.sum(F.at(OrderingIndex::multi(e)));
      }
      joined = bracket_closure(L, joined);
      if (F.at(OrderingIndex::multi(std::vector<int>(k, 0))) != joined)
        rep.violations.push_back({"flavor", OrderingIndex::multi(std::vector<int>(k, 0)),
                                  OrderingIndex::multi(std::vector<int>(k, 0)),
                                  "multidegree flavor requires G_0 to be generated by the G_{e_i}"});
      break;
    }
  }
  return rep;
}

Filtration degree_filtration(const AlgebraPtr& L, const std::vector<Subspace>& groups) {
  std::map<OrderingIndex, Subspace> m;
  for (size_t i = 0; i < groups.size(); ++i) m.emplace(OrderingIndex::degree(static_cast<int>(i)), groups[i]);
  return Filtration(L, Flavor::Degree, IndexKind::Degree, std::move(m));
}

std::vector<Subalgebra> lower_central_series(const AlgebraPtr& L) {
  auto spaces = lower_central_spaces(*L);
  if (spaces.size() > static_cast<size_t>(L->dim()))
    throw DomainError("lower_central_series: series does not terminate within dim steps");
  std::vector<Subalgebra> out;
  for (auto& s : spaces) out.emplace_back(L, s);
  out.push_back(Subalgebra::zero(L));
  return out;
}

Filtration lower_central_filtration(const AlgebraPtr& L) {
  auto series = lower_central_series(L);
  std::vector<Subspace> groups{Subspace::full(L->dim())};
  for (const auto& h : series) groups.push_back(h.space());
  return degree_filtration(L, groups);
}

Filtration degree_rank_from_degree(const Filtration& F) {
  if (F.kind() != IndexKind::Degree) throw DomainError("degree_rank_from_degree: expects a degree filtration");
  auto rep = validate_filtration(F);
  if (!rep.passed()) throw DomainError("degree_rank_from_degree: input filtration fails validation");
  const LieAlgebra& L = *F.algebra();
  const int s = F.degree();
  const int d = L.dim();
  // R[e][m]: span of m-fold right-nested commutators of elements of G_{i_1}, ..., G_{i_m}
  // with i_1 + ... + i_m = e (all i_j >= 1).
  std::vector<std::vector<Subspace>> R(s + 1, std::vector<Subspace>(s + 1, Subspace(d)));
  for (int e = 1; e <= s; ++e) R[e][1] = F.at_degree(e);
  for (int m = 2; m <= s; ++m) {
    for (int e = m; e <= s; ++e) {
      SpanBuilder span(d);
      for (int i = 1; i <= e - (m - 1); ++i) {
        const Subspace Gi = F.at_degree(i);
        const Subspace& inner = R[e - i][m - 1];
        for (int a = 0; a < Gi.dim(); ++a)
          for (int b = 0; b < inner.dim(); ++b) span.add(L.bracket<Rational>(Gi.basis_vector(a), inner.basis_vector(b)));
      }
      R[e][m] = span.finish();
    }
  }
  std::map<OrderingIndex, Subspace> groups;
  for (int dd = 0; dd <= s; ++dd) {
    for (int r = 0; r <= dd; ++r) {
      SpanBuilder span = dd == 0 ? SpanBuilder(Subspace::full(d)) : SpanBuilder(d);
      for (int e = std::max(dd, 1); e <= s; ++e)
        for (int m = 1; m <= e; ++m)
          if (e > dd || m >= r) {
            const Subspace& part = R[e][m];
            for (int a = 0; a < part.dim(); ++a) span.add(part.basis_vector(a));
          }
      groups.emplace(OrderingIndex::degree_rank(dd, r), span.finish());
    }
  }
  return Filtration(F.algebra(), Flavor::DegreeRank, IndexKind::DegreeRank, std::move(groups));
}

Filtration associated_degree(const Filtration& F) {
  if (F.kind() != IndexKind::DegreeRank) throw DomainError("associated_degree: expects a degree-rank filtration");
  std::vector<Subspace> groups;
  for (int i = 0; i <= F.degree(); ++i) groups.push_back(F.at(i, 0));
  return degree_filtration(F.algebra(), groups);
}

VecQ Quotient::lift(const VecQ& w) const {
  VecQ v = VecQ::Zero(projection.cols());
  for (size_t a = 0; a < complement.size(); ++a) v(complement[a]) = w(static_cast<Eigen::Index>(a));
  return v;
}

Quotient quotient(const Filtration& F, const Subalgebra& H) {
  const AlgebraPtr& Lp = F.algebra();
  const LieAlgebra& L = *Lp;
  if (!H.is_ideal()) throw DomainError("quotient: subalgebra is not an ideal");
  const int d = L.dim();
  const Subspace& hs = H.space();
  std::vector<bool> pivot(d, false);
  for (int p : hs.pivots()) pivot[p] = true;
  Quotient out;
  for (int c = 0; c < d; ++c)
    if (!pivot[c]) out.complement.push_back(c);
  const int q = static_cast<int>(out.complement.size());
  out.projection = MatQ::Zero(q, d);
  for (int j = 0; j < d; ++j) {
    VecQ r = hs.reduce(L.basis_vector(j));
    for (int a = 0; a < q; ++a) out.projection(a, j) = r(out.complement[a]);
  }
  if (q == 0) throw DomainError("quotient: quotient by the whole algebra is trivial");
  std::vector<StructureConstant> constants;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      VecQ br = L.bracket<Rational>(L.basis_vector(out.complement[a]), L.basis_vector(out.complement[b]));
      VecQ img = out.projection * br;
      for (int k = 0; k < q; ++k)
        if (!img(k).is_zero()) constants.push_back({a, b, k, img(k)});
    }
  }
  out.algebra = make_algebra(q, L.declared_step(), std::move(constants));
  std::map<OrderingIndex, Subspace> groups;
  for (const auto& [idx, sp] : F.groups()) {
    std::vector<VecQ> imgs;
    for (int a = 0; a < sp.dim(); ++a) imgs.push_back(out.projection * sp.basis_vector(a));
    groups.emplace(idx, Subspace(q, imgs));
  }
  out.filtration = Filtration(out.algebra, F.flavor(), F.kind(), std::move(groups));
  return out;
}

}  // namespace nilkit
