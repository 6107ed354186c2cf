#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "holodyn/mvps.hpp"
#include "holodyn/spectrum.hpp"

namespace holodyn {

inline constexpr double kEpsHomol = 1e-9;
inline constexpr double kEpsDiv = 1e-12;

// (alpha, component) slot; component is 0-based.
using Slot = std::pair<MultiIndex, std::size_t>;

struct NormalizationResult {
  TruncatedGerm normal_form;
  TruncatedGerm conjugacy;
  std::vector<Slot> resonant_support;  // nonlinear slots kept in G
  double residual = 0.0;
};

// Upper-triangular linear part required. Resonant slots of H are zero; the
// nonlinear part of G lives on resonant slots only.
NormalizationResult poincare_dulac(const TruncatedGerm& f);

struct ResonanceObstruction {
  MultiIndex alpha;
  std::size_t component = 0;
};

// H with F∘H = H∘dF_0 through trunc, or the first resonance in (|α|, j) order.
std::variant<TruncatedGerm, ResonanceObstruction> linearize_formal(const TruncatedGerm& f);

// Membership predicate over slots. The theorem's multi-index sets are the
// special case where membership does not depend on the component.
using SlotPredicate = std::function<bool(const MultiIndex&, std::size_t)>;
SlotPredicate index_set(std::function<bool(const MultiIndex&)> pred);
SlotPredicate slot_list(std::vector<Slot> slots);
SlotPredicate index_list(std::vector<MultiIndex> indices);

// Diagonal linear part required. Solves the homological equation on A,
// leaves H zero elsewhere, and validates conditions (1) and (2) on the
// truncation before solving.
NormalizationResult selective_eliminate(const TruncatedGerm& f, const SlotPredicate& a0, const SlotPredicate& a);

struct BrjunoSetLevel {
  int level = 0;       // k in 2^k
  double omega = 1.0;  // ω_A(2^k)
  double term = 0.0;   // 2^{-k} log(1/ω_A(2^k))
};

struct BrjunoSetReport {
  std::vector<BrjunoSetLevel> levels;
  double partial_sum = 0.0;
};

BrjunoSetReport brjuno_set_check(const MultiplierTuple& lambda, const std::vector<MultiIndex>& a, int depth);

// Smallest degree >= 2 with a non-zero layer; nullopt means "> trunc".
std::optional<int> germ_order(const TruncatedGerm& f);

struct ParabolicNF1D {
  cplx lambda;
  int p = 1;
  int k = 1;
  cplx b;
  cplx resit;
};

ParabolicNF1D parabolic_nf_1d(const TruncatedGerm& f);

struct ParabolicIndex {
  cplx b;
  std::optional<cplx> resit;  // present when (k, p) are known
  int points = 0;             // quadrature nodes used
};

// (1/2πi)∮ dz/(λz − f(z)) on |z| = radius by the trapezoidal rule.
ParabolicIndex parabolic_index(const std::function<cplx(cplx)>& f, cplx lambda, double radius = 0.1,
                               std::optional<std::pair<int, int>> kp = std::nullopt);
ParabolicIndex parabolic_index(const TruncatedGerm& f, double radius = 0.1);

// One-resonant data read off a germ in Poincaré-Dulac normal form: the
// smallest k with some g_{kα+e_j}^j ≠ 0 (j < r) and a_j = g^j_{kα+e_j}/λ_j.
struct OneResonantData {
  int k = 0;
  std::vector<cplx> a;
};
std::optional<OneResonantData> one_resonant_data(const TruncatedGerm& normal_form, const MultiIndex& alpha, int r);

}  // namespace holodyn
