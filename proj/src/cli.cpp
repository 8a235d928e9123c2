#include "nilkit/cli.hpp"

#include "nilkit/bch.hpp"
#include "nilkit/errors.hpp"
#include "nilkit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace nilkit::cli {

using io::Json;

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Json& c) {
  if (c.is_string()) return c.get<std::string>();
  if (c.is_number_float()) return io::format_double(c.get<double>());
  if (c.is_number_unsigned()) return std::to_string(c.get<std::uint64_t>());
  if (c.is_number_integer()) return std::to_string(c.get<long long>());
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_null()) return "";
  if (c.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ";" : "") + cell_text(c[i]);
    return s;
  }
  return c.dump();
}

std::uint64_t effective_seed(const Json& spec, const Options& opt) {
  if (opt.seed) return *opt.seed;
  if (spec.is_object() && spec.contains("seed")) return spec.at("seed").get<std::uint64_t>();
  return 0;
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("spec is missing \"") + key + "\"");
  return j.at(key);
}

std::vector<long long> int_list(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  std::vector<long long> v;
  for (const auto& x : j) v.push_back(io::int_from(x, what));
  return v;
}

Json vec_cell(const VecQ& v) { return io::to_json(v); }

// ---------------------------------------------------------------------------

Table cmd_gowers(const Json& spec, const Options& opt) {
  const Signal f = io::signal_from(need(spec, "signal"), effective_seed(spec, opt));
  std::vector<long long> orders;
  const Json& sj = need(spec, "s");
  if (sj.is_array())
    orders = int_list(sj, "s");
  else
    orders.push_back(io::int_from(sj, "s"));
  std::vector<GowersMethod> methods;
  const Json mj = spec.contains("methods") ? spec.at("methods") : Json("fft");
  std::vector<std::string> names;
  if (mj.is_array())
    for (const auto& m : mj) names.push_back(m.get<std::string>());
  else if (mj.get<std::string>() == "both")
    names = {"naive", "fft"};
  else
    names.push_back(mj.get<std::string>());
  for (const auto& n : names) {
    if (n == "naive")
      methods.push_back(GowersMethod::Naive);
    else if (n == "fft")
      methods.push_back(GowersMethod::RecursiveFFT);
    else
      throw ParseError("unknown Gowers method \"" + n + "\"");
  }
  std::optional<long long> Nt;
  if (spec.contains("N_tilde")) Nt = io::int_from(spec.at("N_tilde"), "N_tilde");

  Table t;
  t.columns = {"s", "method", "value"};
  for (long long s : orders) {
    std::vector<double> vals;
    for (auto m : methods) {
      const GowersResult r = f.domain == Domain::Cyclic
                                 ? gowers_norm_cyclic(f, static_cast<int>(s), m, opt.jobs)
                                 : gowers_norm_interval(f, static_cast<int>(s), m, Nt, opt.jobs);
      t.rows.push_back({s, method_name(m), r.value});
      vals.push_back(r.value);
      t.summary["N_tilde"] = r.N_tilde;
    }
    for (double v : vals)
      if (std::abs(v - vals.front()) > 1e-9)
        throw InvariantFailure("gowers", "naive and fft disagree at s = " + std::to_string(s) + ": " +
                                             io::format_double(vals.front()) + " vs " + io::format_double(v));
  }
  t.summary["N"] = f.N();
  t.summary["domain"] = f.domain == Domain::Cyclic ? "cyclic" : "interval";
  return t;
}

Table cmd_correlate(const Json& spec, const Options& opt) {
  const std::uint64_t seed = effective_seed(spec, opt);
  const Signal f = io::signal_from(need(spec, "f"), seed);
  std::vector<Signal> chi;
  const Json& cj = need(spec, "chi");
  if (cj.is_array())
    for (const auto& c : cj) chi.push_back(io::signal_from(c, seed));
  else
    chi.push_back(io::signal_from(cj, seed));
  Table t;
  t.columns = {"item", "value"};
  double best = 0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const double c = correlation(f, chi[i]);
    best = std::max(best, c);
    t.rows.push_back({"chi[" + std::to_string(i) + "]", c});
  }
  t.rows.push_back({"max", best});
  t.summary["correlation"] = best;
  if (spec.contains("major_arc")) {
    const Json& m = spec.at("major_arc");
    const MajorArc a = major_arc_search(f, io::int_from(need(m, "q"), "q"), io::double_from(need(m, "T"), "T"));
    t.rows.push_back({"major_arc.theta", a.theta});
    t.rows.push_back({"major_arc.score", a.score});
    t.rows.push_back({"major_arc.grid_size", a.grid_size});
    t.summary["major_arc"] = {{"theta", a.theta}, {"score", a.score}};
  }
  return t;
}

Table cmd_equidist(const Json& spec, const Options&) {
  const Nilmanifold M = io::nilmanifold_from(need(spec, "manifold"));
  const PolySequence g = io::polyseq_from(need(spec, "sequence"), M.algebra(), M.filtration());
  if (g.arity() != 1) throw DomainError("equidist needs a one-parameter sequence");
  const long long N = io::int_from(need(spec, "N"), "N");
  if (N < 1) throw DomainError("N must be positive");
  if (N > 100000) throw CapExceeded("equidist limited to N <= 100000");
  std::vector<VecQ> chars;
  for (const auto& k : need(spec, "characters")) chars.push_back(io::vecq_from(k));

  // ψ(g(n)) exactly, once per n.
  std::vector<VecQ> coords;
  coords.reserve(static_cast<std::size_t>(N));
  for (long long n = 1; n <= N; ++n) coords.push_back(M.psi(g.eval<Rational>({n})));

  Table t;
  t.columns = {"character", "horizontal", "bias"};
  for (const auto& k : chars) {
    if (k.size() != M.dim()) throw DomainError("character has the wrong length");
    const HorizontalCheck hc = validate_horizontal(k, M);
    std::vector<cd> terms;
    terms.reserve(coords.size());
    for (const auto& u : coords) {
      Rational phase = k.dot(u);
      phase -= Rational(floor_int(phase));
      terms.push_back(e(to_double(phase)));
    }
    const double bias = std::abs(tree_sum(terms)) / static_cast<double>(N);
    t.rows.push_back({vec_cell(k), hc.valid, bias});
  }
  t.summary["N"] = N;
  t.summary["dim"] = M.dim();
  return t;
}

Table cmd_bch(const Json& spec, const Options& opt) {
  const AlgebraPtr L = io::algebra_from(need(spec, "algebra"));
  if (!L->validated()) throw DomainError("algebra fails validation");
  std::vector<std::pair<VecQ, VecQ>> pairs;
  if (spec.contains("pairs")) {
    for (const auto& p : spec.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw ParseError("pairs are [x, y]");
      pairs.emplace_back(io::vecq_from(p[0]), io::vecq_from(p[1]));
    }
  }
  if (spec.contains("x")) pairs.emplace_back(io::vecq_from(spec.at("x")), io::vecq_from(need(spec, "y")));
  if (spec.contains("random")) {
    const long long count = io::int_from(spec.at("random"), "random");
    if (count > 100000) throw CapExceeded("at most 100000 random pairs");
    SplitMix64 rng(effective_seed(spec, opt));
    auto rv = [&] {
      VecQ v(L->dim());
      for (int i = 0; i < L->dim(); ++i) v(i) = Rational(rng.uniform_int(-9, 9)) / Rational(rng.uniform_int(1, 6));
      return v;
    };
    for (long long i = 0; i < count; ++i) {
      VecQ x = rv();
      pairs.emplace_back(x, rv());
    }
  }
  Table t;
  t.columns = {"pair", "x", "y", "z"};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    if (x.size() != L->dim() || y.size() != L->dim()) throw DomainError("pair " + std::to_string(i) + " has the wrong length");
    t.rows.push_back({static_cast<long long>(i), vec_cell(x), vec_cell(y), vec_cell(bch(*L, x, y))});
  }
  t.summary["dim"] = L->dim();
  t.summary["step"] = L->step();
  return t;
}

Table cmd_universal(const Json& spec, const Options& opt) {
  const GeneratorSpec gs = io::generator_spec_from(spec);
  const UniversalAlgebra U = build_universal(gs);
  const FiltrationReport fr = validate_filtration(U.filtration);
  auto Q = std::make_shared<const UniversalQuotient>(build_quotient(U));
  const SemidirectGroup G(Q);
  const MultiFiltrationReport mr = validate_semidirect_filtration(G, 20, effective_seed(spec, opt));

  Table t;
  t.columns = {"key", "value"};
  auto add = [&](const std::string& k, const Json& v) {
    t.rows.push_back({k, v});
    t.summary[k] = v;
  };
  add("dim", U.algebra->dim());
  add("step", U.algebra->step());
  add("filtration_validation", fr.passed() ? "pass" : "fail");
  add("quotient_dim", Q->algebra()->dim());
  add("linear_dim", Q->linear_dim());
  add("rel_normal", Q->normal_check);
  add("lin_abelian", Q->abelian_check);
  add("lin_normal", Q->lin_normal_check);
  add("semidirect_filtration", mr.passed() ? "pass" : "fail");
  Json names = Json::array();
  for (int i = 0; i < U.algebra->dim(); ++i) names.push_back(U.basis_name(i));
  add("basis", names);
  return t;
}

Table cmd_energy(const Json& spec, const Options&) {
  Table t;
  t.columns = {"energy"};
  std::uint64_t E;
  if (spec.contains("A")) {
    E = additive_energy(int_list(spec.at("A"), "A"));
  } else {
    E = additive_energy(int_list(need(spec, "A1"), "A1"), int_list(need(spec, "A2"), "A2"),
                        int_list(need(spec, "A3"), "A3"), int_list(need(spec, "A4"), "A4"));
  }
  t.rows.push_back({E});
  t.summary["energy"] = E;
  return t;
}

Table cmd_bohr(const Json& spec, const Options&) {
  const BohrSetSpec B = io::bohr_from(spec);
  const auto members = bohr_members(B);
  Table t;
  t.columns = {"x"};
  for (long long x : members) t.rows.push_back({x});
  t.summary["size"] = members.size();
  return t;
}

Table cmd_factor(const Json& spec, const Options&) {
  const AlgebraPtr L = io::algebra_from(need(spec, "algebra"));
  const Filtration F = spec.contains("filtration") ? io::filtration_from(spec.at("filtration"), L)
                                                   : degree_rank_from_degree(lower_central_filtration(L));
  const PolySequence g = io::polyseq_from(need(spec, "sequence"), L, F);
  std::vector<HorizontalFunctional> chars;
  for (const auto& c : need(spec, "characters"))
    chars.push_back({static_cast<int>(io::int_from(need(c, "level"), "level")), io::vecq_from(need(c, "k"))});
  const long long N = io::int_from(need(spec, "N"), "N");
  const FactorResult r = factor_by_characters(g, chars, N);

  Table t;
  t.columns = {"part", "index", "element"};
  auto emit = [&](const char* name, const PolySequence& p) {
    for (const auto& [i, v] : p.coeffs()) t.rows.push_back({name, i, vec_cell(v)});
  };
  emit("epsilon", r.epsilon);
  emit("g_prime", r.g_prime);
  emit("gamma", r.gamma);
  t.summary["gamma_denominator"] = r.gamma_denominator.str();
  t.summary["smoothness_constant"] = r.smoothness_constant;
  t.summary["verified_points"] = r.verified_points;
  return t;
}

using Handler = std::function<Table(const Json&, const Options&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"gowers", cmd_gowers},   {"correlate", cmd_correlate}, {"equidist", cmd_equidist},
      {"bch", cmd_bch},         {"universal", cmd_universal}, {"energy", cmd_energy},
      {"bohr", cmd_bohr},       {"factor", cmd_factor},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"gowers", "correlate", "equidist", "bch", "universal",
                                             "energy", "bohr",      "factor",   "sweep"};
  return c;
}

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_escape(t.columns[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(cell_text(row[i]));
    out += "\n";
  }
  return out;
}

std::string render_json(const std::string& command, const Table& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back(Json(r));
  Json j{{"command", command}, {"summary", t.summary}, {"columns", t.columns}, {"rows", rows}};
  return j.dump(2) + "\n";
}

int exit_code_for_current_exception(std::string& message) {
  try {
    throw;
  } catch (const InvariantFailure& e) {
    message = std::string("invariant failure in ") + e.what();
    return 4;
  } catch (const CapExceeded& e) {
    message = std::string("cap exceeded: ") + e.what();
    return 3;
  } catch (const ParseError& e) {
    message = std::string("parse error: ") + e.what();
    return 2;
  } catch (const nlohmann::json::exception& e) {
    message = std::string("parse error: ") + e.what();
    return 2;
  } catch (const DomainError& e) {
    message = std::string("invalid input: ") + e.what();
    return 2;
  } catch (const std::exception& e) {
    message = std::string("error: ") + e.what();
    return 1;
  }
}

JobOutput run_job(const std::string& command, const Json& spec, const Options& opt) {
  JobOutput out;
  try {
    if (command == "sweep") return run_sweep(spec, opt);
    auto it = handlers().find(command);
    if (it == handlers().end()) throw ParseError("unknown command \"" + command + "\"");
    const Table t = it->second(spec, opt);
    out.text = opt.format == Format::Csv ? render_csv(t) : render_json(command, t);
  } catch (...) {
    out.exit_code = exit_code_for_current_exception(out.error);
    out.text.clear();
  }
  return out;
}

JobOutput run_sweep(const Json& spec, const Options& opt) {
  const Json& jobs = need(spec, "jobs");
  if (!jobs.is_array()) throw ParseError("\"jobs\" must be an array");
  const std::uint64_t base_seed = effective_seed(spec, opt);
  struct Item {
    std::string command;
    Json spec;
    Options opt;
    JobOutput out;
  };
  std::vector<Item> items;
  for (const auto& j : jobs) {
    Item it;
    it.command = need(j, "command").get<std::string>();
    if (it.command == "sweep") throw ParseError("sweeps cannot be nested");
    it.spec = j.contains("spec_file") ? io::read_json_file(j.at("spec_file").get<std::string>()) : need(j, "spec");
    it.opt.format = opt.format;
    it.opt.jobs = 1;
    // Job-level seed, then --seed, then the job spec's own seed, then the sweep's seed.
    if (j.contains("seed"))
      it.opt.seed = j.at("seed").get<std::uint64_t>();
    else if (opt.seed)
      it.opt.seed = opt.seed;
    else if (!(it.spec.is_object() && it.spec.contains("seed")))
      it.opt.seed = base_seed;
    items.push_back(std::move(it));
  }

  const int workers = std::max(1, std::min<int>(opt.jobs, static_cast<int>(items.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++)
      items[i].out = run_job(items[i].command, items[i].spec, items[i].opt);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  JobOutput out;
  if (opt.format == Format::Csv) {
    out.text = "job,command,status,record\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      const std::string prefix = std::to_string(i) + "," + it.command + ",";
      if (it.out.exit_code != 0) {
        out.text += prefix + "failed," + csv_escape("exit " + std::to_string(it.out.exit_code) + ": " + it.out.error) + "\n";
        continue;
      }
      std::istringstream lines(it.out.text);
      std::string line;
      while (std::getline(lines, line)) out.text += prefix + "ok," + line + "\n";
    }
  } else {
    Json arr = Json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      Json rec{{"job", i}, {"command", it.command}, {"status", it.out.exit_code == 0 ? "ok" : "failed"},
               {"exit_code", it.out.exit_code}};
      if (it.out.exit_code == 0)
        rec["result"] = io::parse_json(it.out.text);
      else
        rec["error"] = it.out.error;
      arr.push_back(rec);
    }
    out.text = Json{{"command", "sweep"}, {"jobs", arr}}.dump(2) + "\n";
  }
  std::size_t failed = 0;
  for (const auto& it : items) failed += it.out.exit_code != 0;
  if (failed) out.error = std::to_string(failed) + " of " + std::to_string(items.size()) + " jobs failed";
  return out;
}

}  // namespace nilkit::cli
