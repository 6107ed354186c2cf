#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holodyn/multi_index.hpp"
#include "holodyn/mvps.hpp"
#include "holodyn/spectrum.hpp"

namespace holodyn {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  DoubleDouble() = default;
  DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  DoubleDouble(double h, double l);

  double to_double() const { return hi + lo; }
  static DoubleDouble sqrt(DoubleDouble x);
};

DoubleDouble operator+(DoubleDouble a, DoubleDouble b);
DoubleDouble operator-(DoubleDouble a, DoubleDouble b);
DoubleDouble operator*(DoubleDouble a, DoubleDouble b);
DoubleDouble operator/(DoubleDouble a, DoubleDouble b);

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

struct ContinuedFraction {
  double theta = 0.0;
  std::vector<std::int64_t> partial_quotients;  // a_1, a_2, ...
  std::vector<Convergent> convergents;          // (p_0, q_0) = (0, 1), then one per quotient
  bool rational = false;
  bool precision_exhausted = false;
};

// Gauss map in double-double arithmetic; theta in (0, 1).
ContinuedFraction continued_fraction(DoubleDouble theta, int depth);

enum class BrjunoKind { Classical, CF, WeakCF, Partial, Reduced, SetBased };
enum class Verdict { ConvergesNumerically, DivergesNumerically, Undecided };

const char* brjuno_kind_name(BrjunoKind kind);
const char* verdict_name(Verdict v);

struct BrjunoLevel {
  int level = 0;
  // ω value at this level; for the CF kinds this is q_{j+1}.
  double omega = 0.0;
  double term = 0.0;
};

struct BrjunoReport {
  BrjunoKind kind = BrjunoKind::Classical;
  int depth = 0;
  std::vector<BrjunoLevel> per_level;
  double partial_sum = 0.0;
  Verdict verdict = Verdict::Undecided;
  bool rational = false;
  bool zero_divisor = false;
  bool truncated = false;  // enumeration budget hit before `depth`
  bool precision_exhausted = false;
};

// Σ_{j<J} (1/q_j) log q_{j+1}; the weak variant uses log max(log q_{j+1}, 1).
BrjunoReport brjuno_sum_cf(DoubleDouble theta, int depth, bool weak = false);

// min{|λ^α − λ_j| : 2 <= |α| <= m, all j}. Exact resonances give 0.
double omega(const MultiplierTuple& lambda, int m);
// min over the listed α with 2 <= |α| <= k and all i, with 1 adjoined.
double omega_a(const MultiplierTuple& lambda, const std::vector<MultiIndex>& a, int k);

struct BrjunoSeriesOptions {
  BrjunoKind kind = BrjunoKind::Classical;
  std::vector<std::size_t> subset;  // Partial: components S (0-based)
  std::vector<MultiIndex> set;      // SetBased: A
  // Cap on the number of (α, j) pairs scanned across all levels.
  std::uint64_t budget = 50'000'000;
};

// Levels ν = 1..K with p_ν = 2^ν. Classical throws ZeroDivisor when an
// in-range resonance makes ω vanish.
BrjunoReport brjuno_series(const MultiplierTuple& lambda, int depth, const BrjunoSeriesOptions& options = {});

// Verdict rules shared by every Brjuno-type report.
Verdict brjuno_verdict(const std::vector<double>& terms, bool zero_divisor);

struct DiophantineRecord {
  std::int64_t q = 0;
  std::int64_t p = 0;
  double distance = 0.0;  // |qθ − p|
};

struct DiophantineWitness {
  double c_best = 0.0;
  double m_fit = 0.0;
  bool rational = false;
  std::int64_t rational_q = 0;
  bool non_diophantine = false;  // m_fit > 2.5 on the scanned range
  std::vector<DiophantineRecord> records;  // best-approximation denominators
};

DiophantineWitness diophantine_witness(DoubleDouble theta, std::int64_t q_bound);

struct CremerIndicator {
  std::vector<double> values;       // |λ^n − 1|^{-1/n}, +inf when flagged
  std::vector<double> running_max;
  std::optional<int> first_infinite;
};

// angle: turns of λ (λ = e^{2πi·turns}); exact angles flag q | n.
CremerIndicator cremer_indicator(DoubleDouble turns, int n_max, std::optional<Angle> exact = std::nullopt);

struct DeltaNode {
  MultiIndex alpha;
  double epsilon = 0.0;
  std::size_t argmin_component = 0;
};

struct SigmaDeltaReport {
  std::vector<double> sigma;  // σ_1..σ_N
  double delta_log_sup = 0.0;
  MultiIndex maximizer;
  std::vector<DeltaNode> chain;  // α_0 = maximizer, then the ε-factors of its decomposition
  double scaling = 1.0;          // z -> s z makes every ‖f_α‖₁ <= 1
  double theta = 0.0;
  int n = 0;
  bool siegel_separation_holds = true;
  bool brjuno_count_holds = true;
};

std::vector<double> sigma_sequence(std::size_t d, int n);
SigmaDeltaReport sigma_delta_diagnostics(const TruncatedGerm& f, int n);

}  // namespace holodyn
