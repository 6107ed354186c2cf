#pragma once

// Brute-force resonance scan over a common denominator, for unit-modulus
// multipliers with rational angles. Independent of the library's channel
// logic.

#include <cstdint>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "holodyn/multi_index.hpp"

namespace oracle {

struct RationalTuple {
  std::vector<std::int64_t> p;
  std::vector<std::int64_t> q;
};

inline std::int64_t common_denominator(const RationalTuple& t) {
  std::int64_t l = 1;
  for (auto q : t.q) l = std::lcm(l, q);
  return l;
}

// Residue of 2π-turns (scaled by Q) of λ^alpha / λ_j.
inline std::int64_t turn_residue(const RationalTuple& t, const std::vector<int>& alpha, int j, std::int64_t Q) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) s += alpha[i] * t.p[i] * (Q / t.q[i]);
  if (j >= 0) s -= t.p[static_cast<std::size_t>(j)] * (Q / t.q[static_cast<std::size_t>(j)]);
  s %= Q;
  if (s < 0) s += Q;
  return s;
}

// Set of (alpha entries, j) with 2 <= |alpha| <= n and λ^alpha = λ_j.
inline std::set<std::pair<std::vector<int>, int>> brute_resonances(const RationalTuple& t, int n) {
  const std::int64_t Q = common_denominator(t);
  std::set<std::pair<std::vector<int>, int>> out;
  const int d = static_cast<int>(t.p.size());
  std::vector<int> alpha(static_cast<std::size_t>(d), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d) {
      int ord = 0;
      for (int e : alpha) ord += e;
      if (ord < 2) return;
      for (int j = 0; j < d; ++j)
        if (turn_residue(t, alpha, j, Q) == 0) out.emplace(alpha, j);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      alpha[static_cast<std::size_t>(pos)] = e;
      self(self, pos + 1, left - e);
    }
    alpha[static_cast<std::size_t>(pos)] = 0;
  };
  rec(rec, 0, n);
  return out;
}

inline std::set<std::vector<int>> brute_generators(const RationalTuple& t, int n) {
  const std::int64_t Q = common_denominator(t);
  std::set<std::vector<int>> out;
  for (const auto& g : holodyn::enumerate_multi_indices(t.p.size(), 1, n))
    if (turn_residue(t, g.entries(), -1, Q) == 0) out.insert(g.entries());
  return out;
}

}  // namespace oracle
