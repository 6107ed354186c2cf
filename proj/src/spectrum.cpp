#include "holodyn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "holodyn/error.hpp"

namespace holodyn {

namespace {

double arg_half_open(cplx z) {
  double a = std::arg(z);
  if (a >= std::numbers::pi) a -= 2.0 * std::numbers::pi;
  return a;
}

cplx snap_to_angle(cplx v, const Angle& a) { return std::polar(std::abs(v), a.radians()); }

bool is_upper_triangular(const Eigen::MatrixXcd& l) {
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (l(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

int numerical_rank(const Eigen::MatrixXcd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

// Sum of a_i * p_i / q_i over the listed terms is an integer.
bool angle_sum_is_integer(const std::vector<std::pair<std::int64_t, Angle>>& terms) {
  __int128 num = 0, den = 1;
  for (const auto& [a, ang] : terms) {
    if (a == 0) continue;
    const __int128 q = ang.q;
    // lcm(den, q) computed with 128-bit intermediates.
    __int128 x = den, y = q;
    while (y != 0) {
      __int128 t = x % y;
      x = y;
      y = t;
    }
    const __int128 l = den / x * q;
    num = num * (l / den) + static_cast<__int128>(a) * ang.p * (l / q);
    den = l;
    num %= den;
    if (num < 0) num += den;
  }
  return num == 0;
}

bool modulus_is_one(cplx v) { return std::abs(std::abs(v) - 1.0) < kEpsNeutral; }

}  // namespace

bool MultiplierTuple::all_exact() const {
  if (exact_angles.size() != values.size()) return false;
  return std::all_of(exact_angles.begin(), exact_angles.end(), [](const auto& a) { return a.has_value(); });
}

MultiplierTuple MultiplierTuple::from_values(std::vector<cplx> values) {
  MultiplierTuple t;
  t.exact_angles.assign(values.size(), std::nullopt);
  t.values = std::move(values);
  return t;
}

MultiplierTuple MultiplierTuple::from_angles(const std::vector<Angle>& angles, std::vector<double> moduli) {
  if (moduli.empty()) moduli.assign(angles.size(), 1.0);
  if (moduli.size() != angles.size()) fail(ErrorKind::DimensionMismatch, "one modulus per angle is required");
  MultiplierTuple t;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    Angle a = angles[i].reduced();
    t.values.push_back(std::polar(moduli[i], a.radians()));
    t.exact_angles.emplace_back(a);
  }
  return t;
}

MultiplierTuple diagonal_multipliers(const TruncatedGerm& f) {
  const Eigen::MatrixXcd l = linear_part(f);
  MultiplierTuple t;
  for (Eigen::Index i = 0; i < l.rows(); ++i) t.values.push_back(l(i, i));
  t.exact_angles.assign(t.values.size(), std::nullopt);
  if (f.exact_angles()) {
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      const auto& a = (*f.exact_angles())[i];
      if (!a) continue;
      t.exact_angles[i] = a;
      t.values[i] = snap_to_angle(t.values[i], *a);
    }
  }
  return t;
}

MultiplierTuple multipliers(const TruncatedGerm& f) {
  const Eigen::MatrixXcd l = linear_part(f);
  const auto d = static_cast<std::size_t>(l.rows());
  std::vector<cplx> vals(d);
  std::vector<std::optional<Angle>> angles(d);
  if (is_upper_triangular(l)) {
    auto diag = diagonal_multipliers(f);
    vals = diag.values;
    angles = diag.exact_angles;
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l, false);
    for (std::size_t i = 0; i < d; ++i) vals[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
    if (f.exact_angles()) {
      std::vector<char> used(d, 0);
      for (const auto& a : *f.exact_angles()) {
        if (!a) continue;
        for (std::size_t i = 0; i < d; ++i) {
          if (used[i] || std::abs(vals[i]) == 0.0) continue;
          if (std::abs(std::polar(1.0, a->radians()) - vals[i] / std::abs(vals[i])) < 1e-8) {
            used[i] = 1;
            angles[i] = a;
            vals[i] = snap_to_angle(vals[i], *a);
            break;
          }
        }
      }
    }
  }

  MultiplierTuple out;
  // Merge near-coincident eigenvalues and flag missing eigenvectors.
  const double scale = std::max(1.0, l.norm());
  std::vector<char> done(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> cluster{i};
    for (std::size_t j = i + 1; j < d; ++j)
      if (!done[j] && std::abs(vals[j] - vals[i]) < kEpsJordan) cluster.push_back(j);
    if (cluster.size() > 1) {
      cplx mean(0.0, 0.0);
      for (auto c : cluster) mean += vals[c];
      mean /= static_cast<double>(cluster.size());
      std::optional<Angle> ang;
      for (auto c : cluster)
        if (angles[c]) ang = angles[c];
      if (ang) mean = snap_to_angle(mean, *ang);
      for (auto c : cluster) {
        vals[c] = mean;
        angles[c] = ang;
      }
      const Eigen::MatrixXcd shifted = l - mean * Eigen::MatrixXcd::Identity(l.rows(), l.cols());
      if (numerical_rank(shifted, kEpsJordan * scale) > static_cast<int>(d - cluster.size())) out.defective = true;
    }
    for (auto c : cluster) done[c] = 1;
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(vals[a]), mb = std::abs(vals[b]);
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb))) return ma > mb;
    return arg_half_open(vals[a]) < arg_half_open(vals[b]);
  });
  for (auto i : order) {
    out.values.push_back(vals[i]);
    out.exact_angles.push_back(angles[i]);
  }
  return out;
}

MultiplierClassification classify_multiplier(cplx lambda, std::optional<Angle> exact) {
  const double m = std::abs(lambda);
  if (m < kEpsNeutral) return {MultiplierClass::Superattracting, 0};
  if (m < 1.0 - kEpsNeutral) return {MultiplierClass::GeometricallyAttracting, 0};
  if (m > 1.0 + kEpsNeutral) return {MultiplierClass::Repelling, 0};
  if (exact) {
    auto a = exact->reduced();
    return {MultiplierClass::Parabolic, static_cast<int>(a.q)};
  }
  const double turns = std::arg(lambda) / (2.0 * std::numbers::pi);
  for (int q = 1; q <= kQMax; ++q) {
    const double x = turns * q;
    const double frac = x - std::round(x);
    if (2.0 * std::abs(std::sin(std::numbers::pi * frac)) < kEpsRes) return {MultiplierClass::Parabolic, q};
  }
  return {MultiplierClass::Elliptic, 0};
}

const char* multiplier_class_name(MultiplierClass kind) {
  switch (kind) {
    case MultiplierClass::Superattracting: return "superattracting";
    case MultiplierClass::GeometricallyAttracting: return "geometrically-attracting";
    case MultiplierClass::Repelling: return "repelling";
    case MultiplierClass::Parabolic: return "parabolic";
    case MultiplierClass::Elliptic: return "elliptic";
  }
  return "unknown";
}

const char* resonance_kind_name(ResonanceKind kind) {
  switch (kind) {
    case ResonanceKind::Regular: return "Regular";
    case ResonanceKind::IrregularSingular: return "IrregularSingular";
    case ResonanceKind::IrregularComposite: return "IrregularComposite";
    case ResonanceKind::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

cplx lambda_power(const MultiplierTuple& lambda, const MultiIndex& alpha) {
  if (alpha.dim() != lambda.dim()) fail(ErrorKind::DimensionMismatch, "multi-index and multiplier tuple differ in length");
  cplx p(1.0, 0.0);
  for (std::size_t i = 0; i < alpha.dim(); ++i)
    for (int e = 0; e < alpha[i]; ++e) p *= lambda.values[i];
  return p;
}

namespace {

const std::optional<Angle>& angle_at(const MultiplierTuple& lambda, std::size_t i) {
  static const std::optional<Angle> none;
  return i < lambda.exact_angles.size() ? lambda.exact_angles[i] : none;
}

// Exact channel for λ^α / λ_j (j = npos means compare with 1).
std::optional<bool> exact_relation(const MultiplierTuple& lambda, const MultiIndex& alpha, std::size_t j) {
  std::vector<std::pair<std::int64_t, Angle>> terms;
  double log_mod = 0.0;
  bool all_unit = true;
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    if (alpha[i] == 0) continue;
    const auto& a = angle_at(lambda, i);
    if (!a) return std::nullopt;
    terms.emplace_back(alpha[i], *a);
    if (!modulus_is_one(lambda.values[i])) {
      all_unit = false;
      log_mod += alpha[i] * std::log(std::abs(lambda.values[i]));
    }
  }
  double target_mod = 1.0;
  if (j != static_cast<std::size_t>(-1)) {
    const auto& a = angle_at(lambda, j);
    if (!a) return std::nullopt;
    terms.emplace_back(-1, *a);
    if (!modulus_is_one(lambda.values[j])) {
      all_unit = false;
      target_mod = std::abs(lambda.values[j]);
    }
  }
  if (!angle_sum_is_integer(terms)) return false;
  if (all_unit) return true;
  return std::abs(std::exp(log_mod) - target_mod) < kEpsRes;
}

}  // namespace

bool resonance_holds(const MultiplierTuple& lambda, const MultiIndex& alpha, std::size_t j) {
  if (auto e = exact_relation(lambda, alpha, j)) return *e;
  return std::abs(lambda_power(lambda, alpha) - lambda.values[j]) < kEpsRes;
}

bool is_generator(const MultiplierTuple& lambda, const MultiIndex& g) {
  if (g.is_zero()) return false;
  if (auto e = exact_relation(lambda, g, static_cast<std::size_t>(-1))) return *e;
  return std::abs(lambda_power(lambda, g) - cplx(1.0, 0.0)) < kEpsRes;
}

std::optional<std::vector<int>> nonnegative_decomposition(const MultiIndex& g, const std::vector<MultiIndex>& basis) {
  std::vector<int> coeffs(basis.size(), 0);
  std::set<std::pair<std::vector<int>, std::size_t>> dead;
  // Depth-first search with non-decreasing basis index.
  auto search = [&](auto&& self, const MultiIndex& rest, std::size_t start) -> bool {
    if (rest.is_zero()) return true;
    auto key = std::make_pair(rest.entries(), start);
    if (dead.count(key)) return false;
    for (std::size_t i = start; i < basis.size(); ++i) {
      if (basis[i].is_zero() || !basis[i].divides(rest)) continue;
      ++coeffs[i];
      if (self(self, rest - basis[i], i)) return true;
      --coeffs[i];
    }
    dead.insert(std::move(key));
    return false;
  };
  if (search(search, g, 0)) return coeffs;
  return std::nullopt;
}

namespace {

int integer_rank(const std::vector<MultiIndex>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().dim()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].dim(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

bool strict_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

GeneratorDecomposition minimal_cominimal(const std::vector<MultiIndex>& generators) {
  std::vector<MultiIndex> gens(generators);
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  GeneratorDecomposition out;
  if (gens.empty()) return out;
  const std::set<MultiIndex> members(gens.begin(), gens.end());

  std::vector<std::vector<std::size_t>> supports;
  for (const auto& g : gens) supports.push_back(g.support());

  for (std::size_t a = 0; a < gens.size(); ++a) {
    bool support_minimal = true;
    for (std::size_t b = 0; b < gens.size() && support_minimal; ++b)
      if (strict_subset(supports[b], supports[a])) support_minimal = false;
    if (!support_minimal) continue;
    if (nonnegative_decomposition(gens[a], out.minimal)) continue;
    auto trial = out.minimal;
    trial.push_back(gens[a]);
    if (integer_rank(trial) == static_cast<int>(trial.size())) out.minimal = std::move(trial);
  }

  for (const auto& g : gens) {
    if (nonnegative_decomposition(g, out.minimal)) continue;
    bool via_cominimal = false;
    for (const auto& c : out.cominimal)
      if (c.divides(g) && nonnegative_decomposition(g - c, out.minimal)) {
        via_cominimal = true;
        break;
      }
    if (via_cominimal) continue;
    bool irreducible = true;
    for (const auto& h : gens) {
      if (h == g || !h.divides(g)) continue;
      if (members.count(g - h)) {
        irreducible = false;
        break;
      }
    }
    if (!irreducible)
      fail(ErrorKind::DecompositionIncomplete,
           "generator " + g.to_string() + " is not a combination of minimal elements plus at most one cominimal element");
    out.cominimal.push_back(g);
  }
  return out;
}

ResonanceTable find_resonances(const MultiplierTuple& lambda, int degree_bound) {
  if (degree_bound < 2) fail(ErrorKind::OrderOutOfRange, "degree bound must be at least 2");
  const std::size_t d = lambda.dim();
  ResonanceTable table;
  table.degree_bound = degree_bound;
  for (const auto& g : enumerate_multi_indices(d, 1, degree_bound))
    if (is_generator(lambda, g)) table.generators.push_back(g);
  const std::set<MultiIndex> gen_set(table.generators.begin(), table.generators.end());

  for (const auto& alpha : enumerate_multi_indices(d, 2, degree_bound)) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!resonance_holds(lambda, alpha, j)) continue;
      ResonanceEntry e{alpha, j, ResonanceKind::IrregularSingular, std::nullopt};
      if (std::abs(lambda.values[j]) < kEpsRes) {
        e.kind = ResonanceKind::Degenerate;
      } else if (alpha[j] >= 1 && gen_set.count(alpha - MultiIndex::unit(d, j))) {
        e.kind = ResonanceKind::Regular;
      } else {
        // Peel generators off until none fits strictly below the rest.
        MultiIndex rest = alpha;
        bool peeled = true;
        while (peeled) {
          peeled = false;
          for (const auto& g : table.generators) {
            if (g != rest && g.divides(rest)) {
              rest = rest - g;
              peeled = true;
              break;
            }
          }
        }
        if (rest != alpha) {
          e.kind = ResonanceKind::IrregularComposite;
          e.witness = std::make_pair(alpha - rest, rest);
        }
      }
      table.entries.push_back(std::move(e));
    }
  }

  try {
    auto dec = minimal_cominimal(table.generators);
    table.minimal = std::move(dec.minimal);
    table.cominimal = std::move(dec.cominimal);
  } catch (const DomainError& err) {
    if (err.kind() != ErrorKind::DecompositionIncomplete) throw;
    table.decomposition_complete = false;
  }
  return table;
}

std::optional<MResonance> detect_m_resonance(const MultiplierTuple& lambda, int r, int degree_bound) {
  const auto d = static_cast<int>(lambda.dim());
  if (r < 1 || r > d) fail(ErrorKind::InvalidArgument, "r must lie in [1, d]");
  if (degree_bound < 2) fail(ErrorKind::OrderOutOfRange, "degree bound must be at least 2");

  std::vector<MultiIndex> gens;
  for (const auto& g : enumerate_multi_indices(lambda.dim(), 1, degree_bound)) {
    bool inside = true;
    for (int i = r; i < d; ++i)
      if (g[static_cast<std::size_t>(i)] != 0) inside = false;
    if (inside && is_generator(lambda, g)) gens.push_back(g);
  }
  GeneratorDecomposition dec;
  try {
    dec = minimal_cominimal(gens);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  if (dec.minimal.empty() || !dec.cominimal.empty()) return std::nullopt;
  if (integer_rank(dec.minimal) != static_cast<int>(dec.minimal.size())) return std::nullopt;

  for (const auto& alpha : enumerate_multi_indices(lambda.dim(), 2, degree_bound)) {
    for (int j = 0; j < r; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const bool resonant = resonance_holds(lambda, alpha, uj);
      bool generated = false;
      if (alpha[uj] >= 1) {
        auto rest = alpha - MultiIndex::unit(lambda.dim(), uj);
        generated = !rest.is_zero() && nonnegative_decomposition(rest, dec.minimal).has_value();
      }
      if (resonant != generated) return std::nullopt;
    }
  }
  return MResonance{static_cast<int>(dec.minimal.size()), dec.minimal};
}

LinearSplitting invariant_splitting(const Eigen::MatrixXcd& l) {
  if (l.rows() != l.cols()) fail(ErrorKind::DimensionMismatch, "matrix must be square");
  const Eigen::Index d = l.rows();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  auto group = [](cplx v) {
    const double m = std::abs(v);
    if (m < 1.0 - kEpsNeutral) return 0;
    if (m > 1.0 + kEpsNeutral) return 2;
    return 1;
  };
  LinearSplitting out;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  for (int g = 0; g < 3; ++g) {
    int count = 0;
    Eigen::MatrixXcd p = id;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (group(ev(i)) == g)
        ++count;
      else
        p = p * (l - ev(i) * id);
    }
    if (count == 0) continue;
    // The annihilator of the other groups maps onto this generalised eigenspace.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p, Eigen::ComputeFullU);
    auto& target = g == 0 ? out.stable : (g == 1 ? out.centre : out.unstable);
    for (int c = 0; c < count; ++c) target.push_back(svd.matrixU().col(c));
  }
  return out;
}

}  // namespace holodyn
