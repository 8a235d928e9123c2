#pragma once

#include "nilkit/group.hpp"
#include "nilkit/rng.hpp"

namespace testing_helpers {

using namespace nilkit;

inline Rational random_rational(SplitMix64& rng, int num_bound = 5, int den_bound = 4) {
  return Rational(rng.uniform_int(-num_bound, num_bound)) / Rational(rng.uniform_int(1, den_bound));
}

inline VecQ random_vec(SplitMix64& rng, int d, int num_bound = 5, int den_bound = 4) {
  VecQ v(d);
  for (int i = 0; i < d; ++i) v(i) = random_rational(rng, num_bound, den_bound);
  return v;
}

inline ElementQ random_element(SplitMix64& rng, const AlgebraPtr& L) {
  return ElementQ(L, random_vec(rng, L->dim()));
}

inline VecQ vq(std::initializer_list<Rational> xs) {
  VecQ v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v(i++) = x;
  return v;
}

inline Rational q(long p, long d = 1) { return Rational(p) / Rational(d); }

}  // namespace testing_helpers
