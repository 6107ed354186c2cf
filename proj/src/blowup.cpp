#include "holodyn/blowup.hpp"

#include <algorithm>
#include <cmath>

#include "holodyn/error.hpp"

namespace holodyn {

namespace {

bool supported_in(const MultiIndex& alpha, const std::vector<std::size_t>& set) {
  for (std::size_t i : alpha.support())
    if (!std::binary_search(set.begin(), set.end(), i)) return false;
  return true;
}

// Exponent of z^alpha after z_i = w_i w_j for the complement of I and j.
MultiIndex chart_exponent(const MultiIndex& alpha, const BlowupChart& chart) {
  std::vector<int> e = alpha.entries();
  int extra = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (!chart.kept(i)) extra += e[i];
  e[chart.chart] += extra;
  return MultiIndex(std::move(e));
}

}  // namespace

bool BlowupChart::in_splitting(std::size_t i) const {
  return std::binary_search(splitting.begin(), splitting.end(), i);
}

BlowupChart make_chart(std::size_t dim, std::vector<std::size_t> splitting, std::size_t chart) {
  std::sort(splitting.begin(), splitting.end());
  splitting.erase(std::unique(splitting.begin(), splitting.end()), splitting.end());
  if (splitting.size() >= dim) fail(ErrorKind::InvalidArgument, "splitting must be a proper subset");
  if (chart >= dim) fail(ErrorKind::InvalidArgument, "chart index out of range");
  for (std::size_t i : splitting)
    if (i >= dim) fail(ErrorKind::InvalidArgument, "splitting index out of range");
  BlowupChart c{dim, std::move(splitting), chart};
  if (c.in_splitting(chart)) fail(ErrorKind::InvalidArgument, "chart index lies in the splitting");
  return c;
}

std::vector<cplx> chart_to_base(std::span<const cplx> w, const BlowupChart& chart) {
  if (w.size() != chart.dim) fail(ErrorKind::DimensionMismatch, "point dimension differs from chart");
  std::vector<cplx> z(w.begin(), w.end());
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!chart.kept(i)) z[i] = w[i] * w[chart.chart];
  return z;
}

NondegeneracyReport nondegeneracy_check(const TruncatedGerm& f, const std::vector<std::size_t>& splitting) {
  std::vector<std::size_t> set = splitting;
  std::sort(set.begin(), set.end());
  NondegeneracyReport out;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    if (std::binary_search(set.begin(), set.end(), i)) continue;
    for (const auto& [alpha, c] : f.component(i).terms()) {
      if (supported_in(alpha, set)) {
        out.nondegenerate = false;
        out.witness = std::make_pair(i, alpha);
        return out;
      }
    }
  }
  return out;
}

TruncatedGerm lift_germ(const TruncatedGerm& f, const BlowupChart& chart) {
  const std::size_t d = f.dim();
  const int n = f.trunc();
  if (chart.dim != d) fail(ErrorKind::DimensionMismatch, "chart dimension differs from germ");
  const NondegeneracyReport nd = nondegeneracy_check(f, chart.splitting);
  if (!nd.nondegenerate)
    fail(ErrorKind::DegenerateAlongCenter,
         "component " + std::to_string(nd.witness->first) + " has " + nd.witness->second.to_string());
  const std::size_t j = chart.chart;
  const double scale = std::max(1.0, f.max_abs());
  for (std::size_t i = 0; i < d; ++i)
    if (!chart.kept(i) && std::abs(f.component(i).coeff(MultiIndex::unit(d, j))) > 1e-12 * scale)
      fail(ErrorKind::NotEigendirection, "e_j is not an eigendirection of the linear part");
  const cplx lambda_j = f.component(j).coeff(MultiIndex::unit(d, j));
  if (std::abs(lambda_j) < 1e-14 * scale) fail(ErrorKind::ZeroMultiplier, "multiplier of the chart direction vanishes");

  // Kept components are plain substitutions; the others are A_i / A_j with
  // F_i(χ(w)) = w_j A_i(w).
  std::vector<TruncatedSeries> out;
  std::vector<TruncatedSeries> quotient_num;
  std::vector<TruncatedSeries> a(d, TruncatedSeries(d, n));
  for (std::size_t i = 0; i < d; ++i) {
    TruncatedSeries kept(d, n);
    for (const auto& [alpha, c] : f.component(i).terms()) {
      const MultiIndex beta = chart_exponent(alpha, chart);
      if (chart.kept(i) && beta.order() <= n) kept.add_term(beta, c);
      // The constant of A_j is λ_j and is divided out below.
      if ((!chart.kept(i) || i == j) && beta.order() >= 2 && beta.order() - 1 <= n)
        a[i].add_term(beta - MultiIndex::unit(d, j), c);
    }
    kept.prune();
    out.push_back(std::move(kept));
  }
  // 1/(A_j/λ_j) as a geometric series in q = A_j/λ_j - 1.
  a[j].prune();
  const TruncatedSeries q = a[j] * (1.0 / lambda_j);
  TruncatedSeries r(d, n);
  TruncatedSeries power = -q;
  for (int m = 1; m <= n && !power.is_zero(); ++m) {
    r = r + power;
    power = multiply(power, -q);
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (chart.kept(i)) continue;
    a[i].prune();
    const TruncatedSeries base = a[i] * (1.0 / lambda_j);
    out[i] = base + multiply(base, r);
  }
  TruncatedGerm lifted(std::move(out));
  if (const auto& angles = f.exact_angles()) {
    MultiplierTuple lam;
    lam.values.resize(d);
    lam.exact_angles = *angles;
    for (std::size_t i = 0; i < d; ++i) lam.values[i] = f.component(i).coeff(MultiIndex::unit(d, i));
    lifted = lifted.with_exact_angles(lifted_multipliers(lam, chart).exact_angles);
  }
  return lifted;
}

MultiplierTuple lifted_multipliers(const MultiplierTuple& lambda, const BlowupChart& chart) {
  const std::size_t d = lambda.dim();
  if (chart.dim != d) fail(ErrorKind::DimensionMismatch, "chart dimension differs from multipliers");
  const std::size_t j = chart.chart;
  if (lambda.values[j] == cplx(0.0, 0.0)) fail(ErrorKind::ZeroMultiplier, "multiplier of the chart direction vanishes");
  MultiplierTuple out = lambda;
  if (out.exact_angles.size() != d) out.exact_angles.assign(d, std::nullopt);
  const std::optional<Angle> aj = out.exact_angles[j];
  for (std::size_t i = 0; i < d; ++i) {
    if (chart.kept(i)) continue;
    out.values[i] = lambda.values[i] / lambda.values[j];
    const std::optional<Angle> ai = out.exact_angles[i];
    if (ai && aj)
      out.exact_angles[i] = Angle{ai->p * aj->q - aj->p * ai->q, ai->q * aj->q}.reduced();
    else
      out.exact_angles[i] = std::nullopt;
  }
  return out;
}

}  // namespace holodyn
