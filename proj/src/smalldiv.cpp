#include "holodyn/smalldiv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "holodyn/error.hpp"

namespace holodyn {

namespace {

DoubleDouble raw(double hi, double lo) {
  DoubleDouble r;
  r.hi = hi;
  r.lo = lo;
  return r;
}

DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return raw(s, (a - (s - bb)) + (b - bb));
}

DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return raw(s, b - (s - a));
}

}  // namespace

DoubleDouble::DoubleDouble(double h, double l) {
  const DoubleDouble n = quick_two_sum(h, l);
  hi = n.hi;
  lo = n.lo;
}

DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  const DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + DoubleDouble(-b.hi, -b.lo); }

DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  const double p = a.hi * b.hi;
  const double e = std::fma(a.hi, b.hi, -p);
  return quick_two_sum(p, e + (a.hi * b.lo + a.lo * b.hi));
}

DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * DoubleDouble(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * DoubleDouble(q2);
  const double q3 = r.hi / b.hi;
  return DoubleDouble(q1, q2) + DoubleDouble(q3);
}

DoubleDouble DoubleDouble::sqrt(DoubleDouble x) {
  if (x.hi <= 0.0) return DoubleDouble(0.0);
  const double s = std::sqrt(x.hi);
  // One Newton step from the double estimate.
  const DoubleDouble sd(s);
  return sd + (x - sd * sd) / DoubleDouble(2.0 * s);
}

namespace {

DoubleDouble dd_floor(DoubleDouble x) {
  double f = std::floor(x.hi);
  if (f == x.hi) return quick_two_sum(f, std::floor(x.lo));
  return DoubleDouble(f);
}

// Distance from x to the nearest integer, and that integer.
std::pair<double, std::int64_t> dd_dist_to_int(DoubleDouble x) {
  const DoubleDouble r = dd_floor(x + DoubleDouble(0.5));
  const DoubleDouble diff = x - r;
  return {std::abs(diff.to_double()), static_cast<std::int64_t>(r.hi) + static_cast<std::int64_t>(r.lo)};
}

bool mul_add_overflows(std::int64_t a, std::int64_t x, std::int64_t y, std::int64_t& out) {
  std::int64_t t = 0;
  if (__builtin_mul_overflow(a, x, &t)) return true;
  return __builtin_add_overflow(t, y, &out);
}

}  // namespace

ContinuedFraction continued_fraction(DoubleDouble theta, int depth) {
  const double t = theta.to_double();
  if (!(t > 0.0 && t < 1.0)) fail(ErrorKind::InvalidArgument, "theta must lie in (0, 1)");
  if (depth < 1) fail(ErrorKind::InvalidArgument, "depth must be at least 1");

  ContinuedFraction cf;
  cf.theta = t;
  cf.convergents.push_back({0, 1});
  std::int64_t p_prev = 1, q_prev = 0;
  DoubleDouble x = theta;
  // Absolute error of x; the Gauss map divides it by x^2 each step.
  double err = 4.0 * std::ldexp(std::abs(t), -104);

  for (int j = 1; j <= depth; ++j) {
    const DoubleDouble inv = DoubleDouble(1.0) / x;
    err = err / (x.hi * x.hi) + std::ldexp(std::abs(inv.hi), -104);
    if (inv.hi >= 9.0e18) {
      cf.precision_exhausted = true;
      break;
    }
    const DoubleDouble fl = dd_floor(inv);
    const auto a = static_cast<std::int64_t>(fl.hi) + static_cast<std::int64_t>(fl.lo);
    DoubleDouble frac = inv - fl;
    // Rounding can leave frac a hair below 0 or at 1.
    std::int64_t a_adj = a;
    if (frac.hi < 0.0) {
      frac = frac + DoubleDouble(1.0);
      --a_adj;
    }
    const Convergent& last = cf.convergents.back();
    std::int64_t pn = 0, qn = 0;
    if (a_adj < 1 || mul_add_overflows(a_adj, last.p, p_prev, pn) || mul_add_overflows(a_adj, last.q, q_prev, qn)) {
      cf.precision_exhausted = true;
      break;
    }
    const double residual = std::min(std::abs(frac.to_double()), std::abs(1.0 - frac.to_double()));
    if (residual < 10.0 * err && 10.0 * err >= 1e-15) {
      // The floor itself is no longer determined by the data.
      cf.precision_exhausted = true;
      break;
    }
    const bool terminal = residual < 1e-15;
    if (terminal && std::abs(1.0 - frac.to_double()) < std::abs(frac.to_double())) {
      // 1/x sits just below the integer a + 1.
      ++a_adj;
      if (mul_add_overflows(a_adj, last.p, p_prev, pn) || mul_add_overflows(a_adj, last.q, q_prev, qn)) {
        cf.precision_exhausted = true;
        break;
      }
    }
    cf.partial_quotients.push_back(a_adj);
    p_prev = last.p;
    q_prev = last.q;
    cf.convergents.push_back({pn, qn});
    if (terminal) {
      cf.rational = true;
      break;
    }
    x = frac;
  }
  return cf;
}

const char* brjuno_kind_name(BrjunoKind kind) {
  switch (kind) {
    case BrjunoKind::Classical:
      return "classical";
    case BrjunoKind::CF:
      return "cf";
    case BrjunoKind::WeakCF:
      return "weak_cf";
    case BrjunoKind::Partial:
      return "partial";
    case BrjunoKind::Reduced:
      return "reduced";
    case BrjunoKind::SetBased:
      return "set";
  }
  return "?";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ConvergesNumerically:
      return "ConvergesNumerically";
    case Verdict::DivergesNumerically:
      return "DivergesNumerically";
    case Verdict::Undecided:
      return "Undecided";
  }
  return "?";
}

Verdict brjuno_verdict(const std::vector<double>& terms, bool zero_divisor) {
  if (zero_divisor) return Verdict::DivergesNumerically;
  if (terms.size() < 5) return Verdict::Undecided;
  const auto tail = terms.end() - 5;
  if (std::all_of(tail, terms.end(), [](double t) { return t > 1.0; })) return Verdict::DivergesNumerically;
  bool decays = true;
  for (auto it = tail; it + 1 != terms.end(); ++it) {
    const double a = *it, b = *(it + 1);
    decays = decays && (b <= 0.0 || (a > 0.0 && b < 0.9 * a));
  }
  return decays ? Verdict::ConvergesNumerically : Verdict::Undecided;
}

BrjunoReport brjuno_sum_cf(DoubleDouble theta, int depth, bool weak) {
  const ContinuedFraction cf = continued_fraction(theta, depth);
  BrjunoReport rep;
  rep.kind = weak ? BrjunoKind::WeakCF : BrjunoKind::CF;
  rep.depth = depth;
  rep.rational = cf.rational;
  rep.precision_exhausted = cf.precision_exhausted;
  std::vector<double> terms;
  for (std::size_t j = 0; j + 1 < cf.convergents.size(); ++j) {
    const double qj = static_cast<double>(cf.convergents[j].q);
    const double qn = static_cast<double>(cf.convergents[j + 1].q);
    const double l = weak ? std::log(std::max(std::log(qn), 1.0)) : std::log(qn);
    const double term = l / qj;
    rep.per_level.push_back({static_cast<int>(j), qn, term});
    rep.partial_sum += term;
    terms.push_back(term);
  }
  rep.verdict = cf.rational ? Verdict::DivergesNumerically : brjuno_verdict(terms, false);
  return rep;
}

namespace {

// Level scan of min |λ^α − λ_j| over 2 <= |α| <= 2^ν, with filters on α and
// on (α, j). Exact resonances count as zero divisors.
struct LevelScan {
  std::vector<double> omega;  // per level 1..K
  std::optional<int> zero_level;
  bool truncated = false;
};

template <class IndexFilter, class PairFilter>
LevelScan scan_levels(const MultiplierTuple& lambda, int depth, std::uint64_t budget, IndexFilter keep_index,
                      PairFilter keep_pair) {
  const std::size_t d = lambda.dim();
  LevelScan out;
  double current = std::numeric_limits<double>::infinity();
  std::uint64_t spent = 0;
  int done_degree = 1;
  for (int nu = 1; nu <= depth; ++nu) {
    const int top = 1 << std::min(nu, 30);
    for (int m = done_degree + 1; m <= top; ++m) {
      const std::vector<MultiIndex> layer = enumerate_multi_indices(d, m, m);
      spent += layer.size() * d;
      if (spent > budget) {
        out.truncated = true;
        return out;
      }
      for (const auto& alpha : layer) {
        if (!keep_index(alpha)) continue;
        const cplx la = lambda_power(lambda, alpha);
        for (std::size_t j = 0; j < d; ++j) {
          double dist = std::abs(la - lambda.values[j]);
          const bool resonant = dist < kEpsRes && resonance_holds(lambda, alpha, j);
          if (!keep_pair(alpha, j, resonant)) continue;
          if (resonant) {
            dist = 0.0;
            if (!out.zero_level) out.zero_level = nu;
          }
          current = std::min(current, dist);
        }
      }
    }
    done_degree = top;
    out.omega.push_back(current);
  }
  return out;
}

}  // namespace

double omega(const MultiplierTuple& lambda, int m) {
  if (m < 2) fail(ErrorKind::InvalidArgument, "omega needs m >= 2");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& alpha : enumerate_multi_indices(lambda.dim(), 2, m)) {
    const cplx la = lambda_power(lambda, alpha);
    for (std::size_t j = 0; j < lambda.dim(); ++j) {
      if (resonance_holds(lambda, alpha, j)) return 0.0;
      best = std::min(best, std::abs(la - lambda.values[j]));
    }
  }
  return best;
}

double omega_a(const MultiplierTuple& lambda, const std::vector<MultiIndex>& a, int k) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "omega_A needs k >= 2");
  double best = 1.0;
  for (const auto& alpha : a) {
    if (alpha.dim() != lambda.dim()) fail(ErrorKind::DimensionMismatch, "index dimension differs from the tuple");
    if (alpha.order() < 2 || alpha.order() > k) continue;
    const cplx la = lambda_power(lambda, alpha);
    for (std::size_t j = 0; j < lambda.dim(); ++j) {
      if (resonance_holds(lambda, alpha, j)) return 0.0;
      best = std::min(best, std::abs(la - lambda.values[j]));
    }
  }
  return best;
}

BrjunoReport brjuno_series(const MultiplierTuple& lambda, int depth, const BrjunoSeriesOptions& options) {
  if (depth < 1) fail(ErrorKind::InvalidArgument, "depth must be at least 1");
  const std::size_t d = lambda.dim();
  BrjunoReport rep;
  rep.kind = options.kind;
  rep.depth = depth;

  LevelScan scan;
  auto all_index = [](const MultiIndex&) { return true; };
  auto all_pairs = [](const MultiIndex&, std::size_t, bool) { return true; };
  switch (options.kind) {
    case BrjunoKind::Classical:
      scan = scan_levels(lambda, depth, options.budget, all_index, all_pairs);
      if (scan.zero_level)
        fail(ErrorKind::ZeroDivisor, "resonance inside level " + std::to_string(*scan.zero_level));
      break;
    case BrjunoKind::Partial: {
      std::vector<bool> in_s(d, false);
      for (auto s : options.subset) {
        if (s >= d) fail(ErrorKind::InvalidArgument, "subset index out of range");
        in_s[s] = true;
      }
      auto supported = [&](const MultiIndex& alpha) {
        for (auto i : alpha.support())
          if (!in_s[i]) return false;
        return true;
      };
      scan = scan_levels(lambda, depth, options.budget, supported, all_pairs);
      break;
    }
    case BrjunoKind::Reduced:
      scan = scan_levels(lambda, depth, options.budget, all_index,
                         [](const MultiIndex&, std::size_t, bool resonant) { return !resonant; });
      break;
    case BrjunoKind::SetBased: {
      std::set<MultiIndex> a(options.set.begin(), options.set.end());
      scan = scan_levels(lambda, depth, options.budget, [&](const MultiIndex& alpha) { return a.count(alpha) > 0; },
                         all_pairs);
      break;
    }
    case BrjunoKind::CF:
    case BrjunoKind::WeakCF:
      fail(ErrorKind::InvalidArgument, "continued-fraction kinds take an angle, not a tuple");
  }

  rep.truncated = scan.truncated;
  rep.zero_divisor = scan.zero_level.has_value();
  std::vector<double> terms;
  for (std::size_t i = 0; i < scan.omega.size(); ++i) {
    const int nu = static_cast<int>(i) + 1;
    // Capped at 1 so that levels never subtract; an empty scan gives 1.
    const double w = std::min(1.0, scan.omega[i]);
    // Classical weights 1/p_{ν-1} with ω(p_ν); the other kinds use 2^{-ν}.
    const int shift = options.kind == BrjunoKind::Classical ? nu - 1 : nu;
    const double term = w > 0.0 ? std::ldexp(-std::log(w), -shift) + 0.0 : std::numeric_limits<double>::infinity();
    rep.per_level.push_back({nu, scan.omega[i], term});
    rep.partial_sum += term;
    terms.push_back(term);
  }
  rep.verdict = scan.truncated ? Verdict::Undecided : brjuno_verdict(terms, rep.zero_divisor);
  if (scan.truncated && rep.zero_divisor) rep.verdict = Verdict::DivergesNumerically;
  return rep;
}

DiophantineWitness diophantine_witness(DoubleDouble theta, std::int64_t q_bound) {
  if (q_bound < 2) fail(ErrorKind::InvalidArgument, "Q must be at least 2");
  DiophantineWitness w;
  // A plain double carries 53 bits, a double-double about 104.
  const double ulp = std::ldexp(std::abs(theta.to_double()), theta.lo == 0.0 ? -53 : -104);
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t q = 1; q <= q_bound; ++q) {
    const auto [dist, p] = dd_dist_to_int(theta * DoubleDouble(static_cast<double>(q)));
    if (dist < 8.0 * static_cast<double>(q) * ulp) {
      w.rational = true;
      w.rational_q = q;
      w.records.push_back({q, p, dist});
      break;
    }
    if (dist < best) {
      best = dist;
      w.records.push_back({q, p, dist});
    }
  }

  // log|θ − p/q| = log c − m log q over the record denominators.
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : w.records)
    if (r.distance > 0.0) {
      const double q = static_cast<double>(r.q);
      pts.emplace_back(std::log(q), std::log(r.distance / q));
    }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double den = n * sxx - sx * sx;
    if (den > 0.0) w.m_fit = -(n * sxy - sx * sy) / den;
  }
  w.c_best = std::numeric_limits<double>::infinity();
  for (const auto& r : w.records) {
    const double q = static_cast<double>(r.q);
    w.c_best = std::min(w.c_best, std::pow(q, w.m_fit) * r.distance / q);
  }
  if (w.rational) w.c_best = 0.0;
  w.non_diophantine = !w.rational && w.m_fit > 2.5;
  return w;
}

CremerIndicator cremer_indicator(DoubleDouble turns, int n_max, std::optional<Angle> exact) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "Nmax must be positive");
  CremerIndicator out;
  double run = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  const std::optional<Angle> a = exact ? std::optional<Angle>(exact->reduced()) : std::nullopt;
  for (int n = 1; n <= n_max; ++n) {
    double v = 0.0;
    if (a && n % a->q == 0) {
      v = inf;
    } else {
      const auto [dist, _] = dd_dist_to_int(turns * DoubleDouble(static_cast<double>(n)));
      const double gap = 2.0 * std::sin(M_PI * dist);
      v = gap < kEpsRes ? inf : std::pow(gap, -1.0 / static_cast<double>(n));
    }
    if (std::isinf(v) && !out.first_infinite) out.first_infinite = n;
    run = std::max(run, v);
    out.values.push_back(v);
    out.running_max.push_back(run);
  }
  return out;
}

std::vector<double> sigma_sequence(std::size_t d, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "N must be positive");
  // U = σ/(1−σ) = Σ_{k>=1} σ^k, so Σ_{k>=2} σ^k = σ·U.
  std::vector<double> sigma(static_cast<std::size_t>(n) + 1, 0.0), u(sigma.size(), 0.0);
  sigma[1] = 1.0;
  u[1] = 1.0;
  for (std::size_t r = 2; r < sigma.size(); ++r) {
    double conv = 0.0;
    for (std::size_t i = 1; i < r; ++i) conv += sigma[i] * u[r - i];
    sigma[r] = static_cast<double>(d) * conv;
    u[r] = sigma[r] + conv;
  }
  return {sigma.begin() + 1, sigma.end()};
}

SigmaDeltaReport sigma_delta_diagnostics(const TruncatedGerm& f, int n) {
  const std::size_t d = f.dim();
  if (n < 2) fail(ErrorKind::InvalidArgument, "N must be at least 2");
  const Eigen::MatrixXcd l = linear_part(f);
  for (Eigen::Index r = 0; r < l.rows(); ++r)
    for (Eigen::Index c = 0; c < l.cols(); ++c)
      if (r != c && std::abs(l(r, c)) > 1e-12 * std::max(1.0, l.cwiseAbs().maxCoeff()))
        fail(ErrorKind::NotDiagonal, "diagnostics need a diagonal linear part");
  const MultiplierTuple lambda = diagonal_multipliers(f);

  SigmaDeltaReport rep;
  rep.sigma = sigma_sequence(d, n);

  for (int m = 2; m <= f.trunc(); ++m) {
    for (const auto& alpha : enumerate_multi_indices(d, m, m)) {
      double norm1 = 0.0;
      for (const auto& c : f.components()) norm1 += std::abs(c.coeff(alpha));
      if (norm1 > 0.0) rep.scaling = std::min(rep.scaling, std::pow(norm1, -1.0 / static_cast<double>(m - 1)));
    }
  }

  double min_mod = std::numeric_limits<double>::infinity();
  for (const auto& v : lambda.values) min_mod = std::min(min_mod, std::abs(v));
  rep.n = static_cast<int>(std::ceil(2.0 * min_mod - 1e-12)) + 1;
  rep.n = std::max(rep.n, 1);
  rep.theta = std::min(min_mod, 1.0) / static_cast<double>(rep.n);

  // Log-scale recursion: D(α) = max(δ_α, best(α)), best over binary splits.
  const std::vector<MultiIndex> all = enumerate_multi_indices(d, 1, n);
  std::map<MultiIndex, double> log_d, log_delta, log_best, eps;
  std::map<MultiIndex, std::size_t> argmin;
  std::map<MultiIndex, std::pair<MultiIndex, MultiIndex>> split;
  for (const auto& alpha : all) {
    if (alpha.order() == 1) {
      log_d[alpha] = 0.0;
      continue;
    }
    const cplx la = lambda_power(lambda, alpha);
    double e = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (resonance_holds(lambda, alpha, j)) fail(ErrorKind::ZeroDivisor, "resonance at " + alpha.to_string());
      const double v = std::abs(la - lambda.values[j]);
      if (v < e) {
        e = v;
        arg = j;
      }
    }
    if (e == 0.0) fail(ErrorKind::ZeroDivisor, "vanishing divisor at " + alpha.to_string());
    eps[alpha] = e;
    argmin[alpha] = arg;

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& beta : all) {
      if (beta.order() >= alpha.order()) break;
      if (!beta.divides(alpha)) continue;
      const MultiIndex gamma = alpha - beta;
      if (gamma < beta) continue;  // each unordered split once
      const double v = log_d.at(beta) + log_d.at(gamma);
      if (v > best) {
        best = v;
        split[alpha] = {beta, gamma};
      }
    }
    log_best[alpha] = best;
    log_delta[alpha] = best - std::log(e);
    log_d[alpha] = std::max(log_delta[alpha], best);
  }

  // Nodes α_0..α_s of the flattened decomposition of δ_α.
  auto chain_of = [&](const MultiIndex& alpha) {
    std::vector<DeltaNode> nodes;
    auto expand_d = [&](auto&& self, const MultiIndex& beta, bool as_delta) -> void {
      if (beta.order() == 1) return;
      if (as_delta || log_delta.at(beta) >= log_best.at(beta)) {
        nodes.push_back({beta, eps.at(beta), argmin.at(beta)});
      }
      const auto& [x, y] = split.at(beta);
      self(self, x, false);
      self(self, y, false);
    };
    expand_d(expand_d, alpha, true);
    return nodes;
  };

  std::vector<double> omega_levels(static_cast<std::size_t>(n) + 1, std::numeric_limits<double>::infinity());
  {
    double cur = 1.0;
    for (int m = 2; m <= n; ++m) {
      for (const auto& alpha : enumerate_multi_indices(d, m, m)) cur = std::min(cur, eps.at(alpha));
      omega_levels[static_cast<std::size_t>(m)] = cur;
    }
  }

  rep.delta_log_sup = -std::numeric_limits<double>::infinity();
  for (const auto& alpha : all) {
    if (alpha.order() < 2) continue;
    const double v = log_delta.at(alpha) / static_cast<double>(alpha.order());
    if (v > rep.delta_log_sup) {
      rep.delta_log_sup = v;
      rep.maximizer = alpha;
    }
  }
  rep.chain = chain_of(rep.maximizer);

  for (const auto& alpha : all) {
    if (alpha.order() < 2) continue;
    const auto nodes = chain_of(alpha);
    for (int m = 1; m <= n; ++m) {
      const double bar = rep.theta * omega_levels[static_cast<std::size_t>(m)];
      for (std::size_t j = 0; j < d; ++j) {
        int count = 0;
        for (std::size_t x = 0; x < nodes.size(); ++x) {
          if (nodes[x].argmin_component != j || !(nodes[x].epsilon < bar)) continue;
          ++count;
          for (std::size_t y = 0; y < nodes.size(); ++y) {
            if (x == y || nodes[y].argmin_component != j || !(nodes[y].epsilon < bar)) continue;
            const MultiIndex& big = nodes[x].alpha;
            const MultiIndex& small = nodes[y].alpha;
            if (big != small && small.divides(big) && (big - small).order() < m) rep.siegel_separation_holds = false;
          }
        }
        const double bound = alpha.order() <= m ? 0.0 : 2.0 * alpha.order() / static_cast<double>(m) - 1.0;
        if (count > bound + 1e-12) rep.brjuno_count_holds = false;
      }
    }
  }
  return rep;
}

}  // namespace holodyn
