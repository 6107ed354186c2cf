#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "holodyn/multi_index.hpp"
#include "holodyn/mvps.hpp"

namespace holodyn {

inline constexpr double kEpsRes = 1e-10;
inline constexpr double kEpsNeutral = 1e-10;
inline constexpr int kQMax = 10000;
inline constexpr double kEpsJordan = 1e-7;

struct MultiplierTuple {
  std::vector<cplx> values;
  // Same length as values; empty slots are float-only multipliers.
  std::vector<std::optional<Angle>> exact_angles;
  bool defective = false;

  std::size_t dim() const noexcept { return values.size(); }
  bool all_exact() const;

  static MultiplierTuple from_values(std::vector<cplx> values);
  // Multiplier |modulus|·e^{2πi p/q} for each angle.
  static MultiplierTuple from_angles(const std::vector<Angle>& angles, std::vector<double> moduli = {});
};

// Eigenvalues ordered by (|λ| descending, arg ascending with arg in [-π, π)).
// Exact angles from germ metadata follow their diagonal entry when the linear
// part is triangular and are matched by argument otherwise.
MultiplierTuple multipliers(const TruncatedGerm& f);
// Diagonal of the linear part in component order, with the germ's exact
// angles. This is the ordering the triangular normal-form solvers use.
MultiplierTuple diagonal_multipliers(const TruncatedGerm& f);

enum class MultiplierClass { Superattracting, GeometricallyAttracting, Repelling, Parabolic, Elliptic };

struct MultiplierClassification {
  MultiplierClass kind;
  int q = 0;  // order of the root of unity when Parabolic
};

MultiplierClassification classify_multiplier(cplx lambda, std::optional<Angle> exact = std::nullopt);
const char* multiplier_class_name(MultiplierClass kind);

// λ^α as a complex number (float channel).
cplx lambda_power(const MultiplierTuple& lambda, const MultiIndex& alpha);
// λ_j = λ^α: exact integer arithmetic when every multiplier involved carries
// an exact angle, tolerance ε_res otherwise.
bool resonance_holds(const MultiplierTuple& lambda, const MultiIndex& alpha, std::size_t j);
// λ^g = 1, with the same channel rule.
bool is_generator(const MultiplierTuple& lambda, const MultiIndex& g);

enum class ResonanceKind { Regular, IrregularSingular, IrregularComposite, Degenerate };
const char* resonance_kind_name(ResonanceKind kind);

struct ResonanceEntry {
  MultiIndex alpha;
  std::size_t component = 0;  // 0-based j
  ResonanceKind kind = ResonanceKind::IrregularSingular;
  // IrregularComposite only: alpha = generator_part + singular_part.
  std::optional<std::pair<MultiIndex, MultiIndex>> witness;
};

struct ResonanceTable {
  int degree_bound = 0;
  std::vector<ResonanceEntry> entries;
  std::vector<MultiIndex> generators;
  std::vector<MultiIndex> minimal;
  std::vector<MultiIndex> cominimal;
  // False when some generator did not decompose within the bound.
  bool decomposition_complete = true;
};

ResonanceTable find_resonances(const MultiplierTuple& lambda, int degree_bound);

struct GeneratorDecomposition {
  std::vector<MultiIndex> minimal;
  std::vector<MultiIndex> cominimal;
};

// Throws DecompositionIncomplete when some generator is neither an
// N-combination of the minimal elements nor such a combination plus one
// cominimal element.
GeneratorDecomposition minimal_cominimal(const std::vector<MultiIndex>& generators);

// Coefficients a with g = Σ a_i basis_i, a_i in N, if any.
std::optional<std::vector<int>> nonnegative_decomposition(const MultiIndex& g, const std::vector<MultiIndex>& basis);

struct MResonance {
  int m = 0;
  std::vector<MultiIndex> generators;
};

// r is the number of marked leading components (1 <= r <= d).
std::optional<MResonance> detect_m_resonance(const MultiplierTuple& lambda, int r, int degree_bound);

struct LinearSplitting {
  std::vector<Eigen::VectorXcd> stable;
  std::vector<Eigen::VectorXcd> centre;
  std::vector<Eigen::VectorXcd> unstable;
};

LinearSplitting invariant_splitting(const Eigen::MatrixXcd& l);

}  // namespace holodyn
