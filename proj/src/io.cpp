#include "nilkit/io.hpp"

#include "nilkit/errors.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace nilkit::io {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::vector<int> int_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  std::vector<int> v;
  for (const auto& x : j) v.push_back(static_cast<int>(int_from(x, what)));
  return v;
}

}  // namespace

long long int_from(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return j.get<long long>();
}

double double_from(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(rational_from(j));
  throw ParseError(std::string(what) + " must be a number");
}

Rational rational_from(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_float()) throw ParseError("rationals must be integers or strings, got " + j.dump());
  throw ParseError("expected a rational, got " + j.dump());
}

VecQ vecq_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals");
  VecQ v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = rational_from(j[i]);
  return v;
}

Json to_json(const Rational& q) { return format_rational(q); }

Json to_json(const VecQ& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

// ---------------------------------------------------------------------------

AlgebraPtr algebra_from(const Json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "heisenberg") return algebras::heisenberg();
    if (name == "free_step3_rank2") return algebras::free_step3_rank2();
    if (name.rfind("abelian:", 0) == 0) return algebras::abelian(std::stoi(name.substr(8)));
    throw ParseError("unknown built-in algebra \"" + name + "\"");
  }
  const int dim = static_cast<int>(int_from(field(j, "dim"), "dim"));
  const int step = static_cast<int>(int_from(field(j, "step"), "step"));
  std::vector<StructureConstant> cs;
  bool upper_only = true;
  for (const auto& b : field(j, "brackets")) {
    if (!b.is_array() || b.size() != 4) throw ParseError("bracket entries are [i, j, k, c]");
    StructureConstant c{static_cast<int>(int_from(b[0], "i")), static_cast<int>(int_from(b[1], "j")),
                        static_cast<int>(int_from(b[2], "k")), rational_from(b[3])};
    if (c.i >= c.j) upper_only = false;
    cs.push_back(c);
  }
  return upper_only ? make_algebra_antisymmetric(dim, step, cs) : make_algebra(dim, step, cs);
}

Json to_json(const LieAlgebra& L) {
  Json br = Json::array();
  for (const auto& c : L.constants()) br.push_back(Json::array({c.i, c.j, c.k, format_rational(c.c)}));
  return Json{{"dim", L.dim()}, {"step", L.declared_step()}, {"brackets", br}};
}

// ---------------------------------------------------------------------------

Filtration filtration_from(const Json& j, const AlgebraPtr& L) {
  const std::string kind = field(j, "kind").get<std::string>();
  Flavor flavor;
  IndexKind ik;
  if (kind == "degree") {
    flavor = Flavor::Degree;
    ik = IndexKind::Degree;
  } else if (kind == "degree-rank") {
    flavor = Flavor::DegreeRank;
    ik = IndexKind::DegreeRank;
  } else if (kind == "multidegree") {
    flavor = Flavor::MultiDegree;
    ik = IndexKind::MultiDegree;
  } else {
    throw ParseError("unknown filtration kind \"" + kind + "\"");
  }
  std::map<OrderingIndex, Subspace> groups;
  for (const auto& g : field(j, "groups")) {
    OrderingIndex idx{ik, int_vector(field(g, "index"), "index")};
    std::vector<VecQ> rows;
    for (const auto& r : field(g, "basis")) {
      VecQ v = vecq_from(r);
      if (v.size() != L->dim()) throw ParseError("filtration basis vector has the wrong length");
      rows.push_back(v);
    }
    groups[idx] = Subspace(L->dim(), rows);
  }
  return Filtration(L, flavor, ik, std::move(groups));
}

Json to_json(const Filtration& F) {
  static const char* names[] = {"degree", "multidegree", "degree-rank"};
  Json groups = Json::array();
  for (const auto& [idx, sp] : F.groups()) {
    Json basis = Json::array();
    for (int i = 0; i < sp.dim(); ++i) basis.push_back(to_json(sp.basis_vector(i)));
    groups.push_back(Json{{"index", idx.v}, {"basis", basis}});
  }
  return Json{{"kind", names[static_cast<int>(F.kind())]}, {"groups", groups}};
}

// ---------------------------------------------------------------------------

PolySequence polyseq_from(const Json& j, const AlgebraPtr& L, const Filtration& F) {
  const int arity = j.contains("arity") ? static_cast<int>(int_from(j.at("arity"), "arity")) : 1;
  std::map<MultiIndex, VecQ, IndexOrder> coeffs;
  for (const auto& c : field(j, "coeffs")) {
    MultiIndex i = int_vector(field(c, "index"), "index");
    if (static_cast<int>(i.size()) != arity) throw ParseError("coefficient index has the wrong arity");
    VecQ v = vecq_from(field(c, "element"));
    if (v.size() != L->dim()) throw ParseError("coefficient has the wrong dimension");
    coeffs[i] = v;
  }
  return PolySequence(L, F, arity, std::move(coeffs));
}

Json to_json(const PolySequence& g) {
  Json cs = Json::array();
  for (const auto& [i, v] : g.coeffs()) cs.push_back(Json{{"index", i}, {"element", to_json(v)}});
  return Json{{"arity", g.arity()}, {"coeffs", cs}};
}

GeneratorSpec generator_spec_from(const Json& j) {
  GeneratorSpec s;
  s.s = static_cast<int>(int_from(field(j, "s"), "s"));
  s.r_star = static_cast<int>(int_from(field(j, "r_star"), "r_star"));
  auto vec = [&](const char* key) { return j.contains(key) ? int_vector(j.at(key), key) : std::vector<int>{}; };
  s.d_star = vec("d_star");
  s.d_lin = vec("d_lin");
  s.d_pet = vec("d_pet");
  s.check();
  return s;
}

Nilmanifold nilmanifold_from(const Json& j) {
  AlgebraPtr L = algebra_from(field(j, "algebra"));
  if (!j.contains("filtration")) {
    if (j.contains("order")) {
      std::vector<int> order = int_vector(j.at("order"), "order");
      return Nilmanifold(L, lower_central_filtration(L), order);
    }
    return Nilmanifold::standard(L);
  }
  Filtration F = filtration_from(j.at("filtration"), L);
  std::vector<int> order(static_cast<std::size_t>(L->dim()));
  std::iota(order.begin(), order.end(), 0);
  if (j.contains("order")) order = int_vector(j.at("order"), "order");
  return Nilmanifold(L, F, order);
}

// ---------------------------------------------------------------------------

BracketExpr bracket_from(const Json& j) {
  const std::string op = field(j, "op").get<std::string>();
  if (op == "linear")
    return BracketExpr::linear(double_from(field(j, "coef"), "coef"),
                               j.contains("offset") ? double_from(j.at("offset"), "offset") : 0.0);
  if (op == "sum" || op == "mul") {
    std::vector<BracketExpr> args;
    for (const auto& a : field(j, "args")) args.push_back(bracket_from(a));
    return op == "sum" ? BracketExpr::sum(std::move(args)) : BracketExpr::mul(std::move(args));
  }
  if (op == "frac") return BracketExpr::frac_of(bracket_from(field(j, "arg")));
  if (op == "int") return BracketExpr::int_of(bracket_from(field(j, "arg")));
  throw ParseError("unknown bracket op \"" + op + "\"");
}

Json to_json(const BracketExpr& e) {
  using Op = BracketExpr::Op;
  switch (e.op) {
    case Op::Linear:
      return Json{{"op", "linear"}, {"coef", e.coef}, {"offset", e.offset}};
    case Op::Sum:
    case Op::Mul: {
      Json args = Json::array();
      for (const auto& a : e.args) args.push_back(to_json(a));
      return Json{{"op", e.op == Op::Sum ? "sum" : "mul"}, {"args", args}};
    }
    case Op::Frac:
      return Json{{"op", "frac"}, {"arg", to_json(e.args.at(0))}};
    case Op::Int:
      return Json{{"op", "int"}, {"arg", to_json(e.args.at(0))}};
  }
  return {};
}

BohrSetSpec bohr_from(const Json& j) {
  BohrSetSpec B;
  B.N = int_from(field(j, "N"), "N");
  for (const auto& s : field(j, "S")) B.S.push_back(int_from(s, "S"));
  B.rho = double_from(field(j, "rho"), "rho");
  return B;
}

ProperGAP gap_from(const Json& j) {
  ProperGAP P;
  P.N_prime = int_from(field(j, "N_prime"), "N_prime");
  for (const auto& x : field(j, "generators")) P.generators.push_back(int_from(x, "generators"));
  for (const auto& x : field(j, "sides")) P.sides.push_back(int_from(x, "sides"));
  for (const auto& x : field(j, "S")) P.S.push_back(int_from(x, "S"));
  return P;
}

// ---------------------------------------------------------------------------

namespace {

Domain domain_from(const Json& j, Domain fallback) {
  if (!j.contains("domain")) return fallback;
  const std::string d = j.at("domain").get<std::string>();
  if (d == "cyclic") return Domain::Cyclic;
  if (d == "interval") return Domain::Interval;
  throw ParseError("unknown domain \"" + d + "\"");
}

}  // namespace

Signal signal_from(const Json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw ParseError("signal must be an object");
  if (j.contains("values")) {
    Signal s{domain_from(j, Domain::Cyclic), {}};
    for (const auto& v : j.at("values")) {
      if (v.is_array() && v.size() == 2)
        s.values.emplace_back(double_from(v[0], "re"), double_from(v[1], "im"));
      else
        s.values.emplace_back(double_from(v, "value"), 0.0);
    }
    if (j.contains("N") && int_from(j.at("N"), "N") != s.N()) throw ParseError("N disagrees with the number of values");
    return s;
  }
  const std::string family = field(j, "family").get<std::string>();
  const long long N = int_from(field(j, "N"), "N");
  if (N < 1) throw DomainError("signal length must be positive");
  if (N > (1LL << 24)) throw CapExceeded("signal length above 2^24");
  if (family == "poly-phase") {
    const Domain d = domain_from(j, Domain::Cyclic);
    const VecQ c = vecq_from(field(j, "coeffs"));
    std::vector<cd> v(static_cast<std::size_t>(N));
    const long long first = d == Domain::Cyclic ? 0 : 1;
    for (long long i = 0; i < N; ++i) {
      const Rational n(first + i);
      Rational t = 0, p = 1;
      for (Eigen::Index k = 0; k < c.size(); ++k) {
        t += c(k) * p;
        p *= n;
      }
      t -= Rational(floor_int(t));
      v[static_cast<std::size_t>(i)] = e(to_double(t));
    }
    return {d, v};
  }
  if (family == "bracket") {
    BracketConvention conv = BracketConvention::Nearest;
    if (j.contains("convention")) {
      const std::string c = j.at("convention").get<std::string>();
      if (c == "floor")
        conv = BracketConvention::Floor;
      else if (c != "nearest")
        throw ParseError("unknown bracket convention \"" + c + "\"");
    }
    Signal s = bracket_signal(bracket_from(field(j, "expr")), N, conv);
    s.domain = domain_from(j, Domain::Interval);
    return s;
  }
  if (family == "ap-indicator") {
    const Domain d = domain_from(j, Domain::Interval);
    const long long start = int_from(field(j, "start"), "start");
    const long long step = int_from(field(j, "step"), "step");
    const long long length = int_from(field(j, "length"), "length");
    std::vector<cd> v(static_cast<std::size_t>(N), 0.0);
    const long long first = d == Domain::Cyclic ? 0 : 1;
    for (long long t = 0; t < length; ++t) {
      long long n = start + step * t;
      if (d == Domain::Cyclic) n = ((n % N) + N) % N;
      if (n - first >= 0 && n - first < N) v[static_cast<std::size_t>(n - first)] = 1.0;
    }
    return {d, v};
  }
  if (family == "random") {
    SignalKind kind = SignalKind::Unimodular;
    if (j.contains("kind")) {
      const std::string k = j.at("kind").get<std::string>();
      if (k == "sign")
        kind = SignalKind::Sign;
      else if (k == "disk")
        kind = SignalKind::Disk;
      else if (k != "unimodular")
        throw ParseError("unknown random kind \"" + k + "\"");
    }
    const std::uint64_t seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
    return random_signal(domain_from(j, Domain::Cyclic), N, seed, kind);
  }
  throw ParseError("unknown signal family \"" + family + "\"");
}

std::uint64_t spec_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace nilkit::io
