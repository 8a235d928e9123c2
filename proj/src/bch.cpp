#include "nilkit/bch.hpp"

#include <array>
#include <map>

namespace nilkit {

namespace {

Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Enumerates the sequences (r_1, s_1, ..., r_n, s_n) with r_i + s_i >= 1 summing to m
// and accumulates the Dynkin coefficient of each resulting word.
void accumulate(int m, int n, int remaining, std::vector<std::pair<int, int>>& pairs,
                std::map<std::pair<int, std::uint32_t>, Rational>& acc) {
  if (static_cast<int>(pairs.size()) == n) {
    if (remaining != 0) return;
    Rational coeff = Rational((n % 2 == 1) ? 1 : -1) / Rational(n * m);
    std::uint32_t bits = 0;
    int pos = 0;
    for (auto [r, s] : pairs) {
      coeff /= factorial(r) * factorial(s);
      pos += r;  // X letters are zero bits
      for (int q = 0; q < s; ++q) bits |= (1u << pos++);
    }
    acc[{m, bits}] += coeff;
    return;
  }
  const int slots_after = n - static_cast<int>(pairs.size()) - 1;
  for (int r = 0; r <= remaining; ++r) {
    for (int s = 0; r + s <= remaining; ++s) {
      if (r + s == 0) continue;
      if (remaining - r - s < slots_after) continue;
      pairs.emplace_back(r, s);
      accumulate(m, n, remaining - r - s, pairs, acc);
      pairs.pop_back();
    }
  }
}

std::array<std::vector<DynkinTerm>, kMaxStep + 1> build_tables() {
  std::array<std::vector<DynkinTerm>, kMaxStep + 1> tables;
  for (int m = 1; m <= kMaxStep; ++m) {
    std::map<std::pair<int, std::uint32_t>, Rational> acc;
    std::vector<std::pair<int, int>> pairs;
    for (int n = 1; n <= m; ++n) accumulate(m, n, m, pairs, acc);
    for (auto& [k, c] : acc) {
      if (c.is_zero()) continue;
      const std::uint32_t bits = k.second;
      if (m >= 2) {
        const bool last = (bits >> (m - 1)) & 1u;
        const bool second_last = (bits >> (m - 2)) & 1u;
        if (last == second_last) continue;  // [a, a] = 0 at the innermost level
      }
      tables[m].push_back({bits, m, c});
    }
  }
  return tables;
}

}  // namespace

const std::vector<DynkinTerm>& dynkin_terms(int degree) {
  static const auto tables = build_tables();
  if (degree < 1 || degree > kMaxStep) throw CapExceeded("dynkin_terms: degree outside 1..6");
  return tables[degree];
}

}  // namespace nilkit
