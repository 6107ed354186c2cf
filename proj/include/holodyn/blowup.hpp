#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "holodyn/mvps.hpp"
#include "holodyn/spectrum.hpp"

namespace holodyn {

// Chart j of the blow-up of C^d along X_I = {z_i = 0 for i not in I}.
// Indices are 0-based.
struct BlowupChart {
  std::size_t dim = 0;
  std::vector<std::size_t> splitting;  // I, sorted
  std::size_t chart = 0;               // j, not in I

  bool in_splitting(std::size_t i) const;
  // i in I or i == j.
  bool kept(std::size_t i) const { return i == chart || in_splitting(i); }
};

// Throws InvalidArgument unless j is outside I, |I| < d and all indices fit.
BlowupChart make_chart(std::size_t dim, std::vector<std::size_t> splitting, std::size_t chart);

std::vector<cplx> chart_to_base(std::span<const cplx> w, const BlowupChart& chart);

struct NondegeneracyReport {
  bool nondegenerate = true;
  // First offending (component, monomial) in graded order.
  std::optional<std::pair<std::size_t, MultiIndex>> witness;
};

NondegeneracyReport nondegeneracy_check(const TruncatedGerm& f, const std::vector<std::size_t>& splitting);

// Lift in chart coordinates through the input truncation.
TruncatedGerm lift_germ(const TruncatedGerm& f, const BlowupChart& chart);

MultiplierTuple lifted_multipliers(const MultiplierTuple& lambda, const BlowupChart& chart);

}  // namespace holodyn
