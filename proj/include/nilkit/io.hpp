#pragma once

#include "nilkit/bracket.hpp"
#include "nilkit/filtration.hpp"
#include "nilkit/gowers.hpp"
#include "nilkit/lie_algebra.hpp"
#include "nilkit/nilmanifold.hpp"
#include "nilkit/polyseq.hpp"
#include "nilkit/universal.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace nilkit::io {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become ParseError.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

/// 17 significant digits, round-trip safe.
std::string format_double(double x);

/// A rational from a JSON integer or a string "p", "p/q", or a finite decimal.
Rational rational_from(const Json& j);
VecQ vecq_from(const Json& j);
Json to_json(const Rational& q);
Json to_json(const VecQ& v);
long long int_from(const Json& j, const char* what);
double double_from(const Json& j, const char* what);

/// { "dim", "step", "brackets": [[i, j, k, "p/q"], ...] }.  When only i < j entries are
/// present the antisymmetric completion is used; otherwise entries are taken as given.
/// A string names a built-in algebra: "heisenberg", "free_step3_rank2", "abelian:<d>".
AlgebraPtr algebra_from(const Json& j);
Json to_json(const LieAlgebra& L);

/// { "kind": "degree"|"degree-rank"|"multidegree", "groups": [{ "index": [..], "basis": [[..]] }] }.
Filtration filtration_from(const Json& j, const AlgebraPtr& L);
Json to_json(const Filtration& F);

/// { "arity": k, "coeffs": [{ "index": [..], "element": [..] }] }.
PolySequence polyseq_from(const Json& j, const AlgebraPtr& L, const Filtration& F);
Json to_json(const PolySequence& g);

GeneratorSpec generator_spec_from(const Json& j);

/// { "algebra", optional "filtration", optional "order" }; without a filtration the
/// standard structure on the algebra is used.
Nilmanifold nilmanifold_from(const Json& j);

/// { "op": "linear", "coef", "offset"? } | { "op": "sum"|"mul", "args": [..] } | { "op": "frac"|"int", "arg": .. }.
BracketExpr bracket_from(const Json& j);
Json to_json(const BracketExpr& e);

BohrSetSpec bohr_from(const Json& j);
ProperGAP gap_from(const Json& j);

/// Signal file { "domain", "N"?, "values": [[re, im], ...] } or a generator
/// { "family": "poly-phase"|"bracket"|"ap-indicator"|"random", ... }.  A family
/// without its own "seed" uses `default_seed`.
Signal signal_from(const Json& j, std::uint64_t default_seed);

/// 64-bit FNV-1a of the compact dump.
std::uint64_t spec_hash(const Json& j);

}  // namespace nilkit::io
