#include "holodyn/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "holodyn/error.hpp"
#include "holodyn/smalldiv.hpp"

namespace holodyn {

namespace {

enum class SlotAction { SolveH, KeepG };

// Decides what happens at a nonlinear slot. Returning nullopt aborts the
// solve and reports the slot as an obstruction (linearize mode).
using SlotDecision = std::function<std::optional<SlotAction>(const MultiIndex&, std::size_t, cplx rhs)>;

struct EngineOutput {
  TruncatedGerm g;
  TruncatedGerm h;
  std::optional<ResonanceObstruction> obstruction;
};

double matrix_scale(const Eigen::MatrixXcd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

void require_upper_triangular(const Eigen::MatrixXcd& l) {
  const double tol = 1e-12 * matrix_scale(l);
  for (Eigen::Index r = 1; r < l.rows(); ++r)
    for (Eigen::Index c = 0; c < r; ++c)
      if (std::abs(l(r, c)) > tol) fail(ErrorKind::NotTriangular, "linear part has a nonzero entry below the diagonal");
}

bool is_diagonal(const Eigen::MatrixXcd& l) {
  const double tol = 1e-12 * matrix_scale(l);
  for (Eigen::Index r = 0; r < l.rows(); ++r)
    for (Eigen::Index c = 0; c < l.cols(); ++c)
      if (r != c && std::abs(l(r, c)) > tol) return false;
  return true;
}

TruncatedSeries monomial(std::size_t dim, int trunc, const MultiIndex& alpha) {
  TruncatedSeries s(dim, trunc);
  s.add_term(alpha, 1.0);
  return s;
}

// Degree-by-degree solve of h∘Λ − Λh + g = E. Within one degree the operator
// is lower triangular when slots are visited in graded α order and descending
// component, with diagonal λ^α − λ_j.
EngineOutput run_engine(const TruncatedGerm& f, const SlotDecision& decide) {
  const std::size_t d = f.dim();
  const int n = f.trunc();
  const Eigen::MatrixXcd lam = linear_part(f);

  std::vector<TruncatedSeries> hs = identity_germ(d, n).components();
  std::vector<TruncatedSeries> gs = linear_germ(lam, n).components();

  for (int m = 2; m <= n; ++m) {
    const TruncatedGerm hm = TruncatedGerm(hs).restricted(m);
    const TruncatedGerm gm = TruncatedGerm(gs).restricted(m);
    const TruncatedGerm fm = f.restricted(m);
    const TruncatedGerm e = compose(fm, hm) - compose(hm, gm);

    const std::vector<MultiIndex> mons = enumerate_multi_indices(d, m, m);
    const std::size_t nm = mons.size();
    const auto unknown = [d](std::size_t pos, std::size_t comp) { return pos * d + comp; };

    // (Λz)^β for every β of degree m.
    const TruncatedGerm lin = linear_germ(lam, m);
    std::vector<TruncatedSeries> images;
    images.reserve(nm);
    for (const auto& beta : mons) images.push_back(compose(monomial(d, m, beta), lin));

    const auto t_entry = [&](std::size_t row_pos, std::size_t row_comp, std::size_t col_pos, std::size_t col_comp) {
      cplx v = 0.0;
      if (row_comp == col_comp) v += images[col_pos].coeff(mons[row_pos]);
      if (row_pos == col_pos) v -= lam(static_cast<Eigen::Index>(row_comp), static_cast<Eigen::Index>(col_comp));
      return v;
    };

    std::vector<cplx> hx(nm * d, 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> done;
    for (std::size_t pos = 0; pos < nm; ++pos) {
      for (std::size_t jj = d; jj-- > 0;) {
        cplx r = e.component(jj).coeff(mons[pos]);
        for (const auto& [p2, c2] : done) {
          const cplx h = hx[unknown(p2, c2)];
          if (h != 0.0) r -= t_entry(pos, jj, p2, c2) * h;
        }
        const auto action = decide(mons[pos], jj, r);
        if (!action) return {TruncatedGerm(gs), TruncatedGerm(hs), ResonanceObstruction{mons[pos], jj}};
        if (*action == SlotAction::SolveH) {
          const cplx diag = t_entry(pos, jj, pos, jj);
          hx[unknown(pos, jj)] = r / diag;
          hs[jj].add_term(mons[pos], r / diag);
        } else {
          gs[jj].add_term(mons[pos], r);
        }
        done.emplace_back(pos, jj);
      }
    }
  }
  for (auto& s : hs) s.prune();
  for (auto& s : gs) s.prune();
  TruncatedGerm g(gs);
  if (f.exact_angles()) g = g.with_exact_angles(*f.exact_angles());
  return {std::move(g), TruncatedGerm(hs), std::nullopt};
}

std::vector<Slot> nonlinear_support(const TruncatedGerm& g) {
  std::vector<Slot> out;
  for (std::size_t j = 0; j < g.dim(); ++j)
    for (const auto& [alpha, c] : g.component(j).terms())
      if (alpha.order() >= 2) out.emplace_back(alpha, j);
  std::sort(out.begin(), out.end());
  return out;
}

NormalizationResult finish(const TruncatedGerm& f, EngineOutput out) {
  NormalizationResult res{out.g, out.h, nonlinear_support(out.g), 0.0};
  res.residual = max_coeff_diff(compose(f, res.conjugacy), compose(res.conjugacy, res.normal_form));
  return res;
}

std::string slot_text(const MultiIndex& alpha, std::size_t j) {
  return alpha.to_string() + " in component " + std::to_string(j + 1);
}

std::optional<Angle> exact_angle_of(const TruncatedGerm& f, std::size_t j) {
  if (f.exact_angles() && j < f.exact_angles()->size()) return (*f.exact_angles())[j];
  return std::nullopt;
}

}  // namespace

NormalizationResult poincare_dulac(const TruncatedGerm& f) {
  require_upper_triangular(linear_part(f));
  const MultiplierTuple lambda = diagonal_multipliers(f);
  auto decide = [&](const MultiIndex& alpha, std::size_t j, cplx) -> std::optional<SlotAction> {
    return resonance_holds(lambda, alpha, j) ? SlotAction::KeepG : SlotAction::SolveH;
  };
  return finish(f, run_engine(f, decide));
}

std::variant<TruncatedGerm, ResonanceObstruction> linearize_formal(const TruncatedGerm& f) {
  const Eigen::MatrixXcd l = linear_part(f);
  bool triangular = true;
  const double tol = 1e-12 * matrix_scale(l);
  for (Eigen::Index r = 1; r < l.rows(); ++r)
    for (Eigen::Index c = 0; c < r; ++c) triangular = triangular && std::abs(l(r, c)) <= tol;

  TruncatedGerm work = f;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(l.rows(), l.cols());
  if (!triangular) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(l);
    q = schur.matrixU();
    work = compose(linear_germ(q.adjoint(), f.trunc()), compose(f.without_exact_angles(), linear_germ(q, f.trunc())));
  }

  const MultiplierTuple lambda = diagonal_multipliers(work);
  const double scale = std::max(1.0, f.max_abs());
  // A resonant slot only obstructs when its right-hand side is nonzero.
  auto decide = [&](const MultiIndex& alpha, std::size_t j, cplx rhs) -> std::optional<SlotAction> {
    if (!resonance_holds(lambda, alpha, j)) return SlotAction::SolveH;
    if (std::abs(rhs) > kEpsHomol * scale) return std::nullopt;
    return SlotAction::KeepG;
  };
  EngineOutput out = run_engine(work, decide);
  if (out.obstruction) return *out.obstruction;
  if (!triangular) return compose(linear_germ(q, f.trunc()), compose(out.h, linear_germ(q.adjoint(), f.trunc())));
  return out.h;
}

SlotPredicate index_set(std::function<bool(const MultiIndex&)> pred) {
  return [pred = std::move(pred)](const MultiIndex& alpha, std::size_t) { return pred(alpha); };
}

SlotPredicate slot_list(std::vector<Slot> slots) {
  std::set<Slot> s(slots.begin(), slots.end());
  return [s = std::move(s)](const MultiIndex& alpha, std::size_t j) { return s.count({alpha, j}) > 0; };
}

SlotPredicate index_list(std::vector<MultiIndex> indices) {
  std::set<MultiIndex> s(indices.begin(), indices.end());
  return [s = std::move(s)](const MultiIndex& alpha, std::size_t) { return s.count(alpha) > 0; };
}

namespace {

// Linear diagonal slots always belong to A0.
bool in_a0(const SlotPredicate& a0, const MultiIndex& alpha, std::size_t j) {
  if (alpha.order() == 1) return alpha[j] == 1;
  return a0(alpha, j);
}

void check_condition_one(std::size_t d, int n, const SlotPredicate& a0, const SlotPredicate& a) {
  const auto all = enumerate_multi_indices(d, 2, n);
  for (const auto& alpha : all) {
    for (std::size_t j = 0; j < d; ++j) {
      const bool is0 = a0(alpha, j);
      const bool isa = a(alpha, j);
      if (!is0 && !isa) continue;
      for (const auto& beta : all) {
        if (beta.order() >= alpha.order() || !beta.divides(alpha)) continue;
        for (std::size_t i = 0; i < d; ++i) {
          const bool ok = is0 ? a0(beta, i) : (a0(beta, i) || a(beta, i));
          if (!ok) {
            fail(ErrorKind::ConditionViolation, "condition 1: " + slot_text(alpha, j) + " requires " + slot_text(beta, i) +
                                                    (is0 ? " in A0" : " in A0 or A"));
          }
        }
      }
    }
  }
}

void check_condition_two(const TruncatedGerm& f, const SlotPredicate& a0, const SlotPredicate& a) {
  const std::size_t d = f.dim();
  const int n = f.trunc();
  std::vector<Slot> pool;
  for (std::size_t j = 0; j < d; ++j) pool.emplace_back(MultiIndex::unit(d, j), j);
  for (std::size_t j = 0; j < d; ++j)
    for (const auto& [beta, c] : f.component(j).terms())
      if (beta.order() >= 2 && beta.order() < n && a0(beta, j)) pool.emplace_back(beta, j);

  std::vector<std::size_t> chosen;
  MultiIndex sum = MultiIndex::zero(d);
  MultiIndex ej = MultiIndex::zero(d);
  auto rec = [&](auto&& self, std::size_t start, bool has_big) -> void {
    if (chosen.size() >= 2 && has_big) {
      for (std::size_t j = 0; j < d; ++j) {
        if (!(in_a0(a0, sum, j) || a(sum, j))) continue;
        if (a(ej, j)) {
          std::ostringstream msg;
          msg << "condition 2: factors";
          for (auto idx : chosen) msg << ' ' << pool[idx].first.to_string() << '/' << pool[idx].second + 1;
          msg << " sum to " << slot_text(sum, j) << " but " << slot_text(ej, j) << " is in A";
          fail(ErrorKind::ConditionViolation, msg.str());
        }
      }
    }
    for (std::size_t idx = start; idx < pool.size(); ++idx) {
      const auto& [beta, comp] = pool[idx];
      if (sum.order() + beta.order() > n) continue;
      chosen.push_back(idx);
      sum = sum + beta;
      ej = ej + MultiIndex::unit(d, comp);
      self(self, idx, has_big || beta.order() >= 2);
      ej = ej - MultiIndex::unit(d, comp);
      sum = sum - beta;
      chosen.pop_back();
    }
  };
  rec(rec, 0, false);
}

}  // namespace

NormalizationResult selective_eliminate(const TruncatedGerm& f, const SlotPredicate& a0, const SlotPredicate& a) {
  const Eigen::MatrixXcd l = linear_part(f);
  if (!is_diagonal(l)) fail(ErrorKind::NotDiagonal, "selective elimination needs a diagonal linear part");
  const std::size_t d = f.dim();
  const int n = f.trunc();
  const MultiplierTuple lambda = diagonal_multipliers(f);

  for (const auto& alpha : enumerate_multi_indices(d, 2, n))
    for (std::size_t j = 0; j < d; ++j)
      if (a0(alpha, j) && a(alpha, j))
        fail(ErrorKind::ConditionViolation, "A0 and A are not disjoint at " + slot_text(alpha, j));

  check_condition_one(d, n, a0, a);
  check_condition_two(f, a0, a);

  for (const auto& alpha : enumerate_multi_indices(d, 2, n))
    for (std::size_t j = 0; j < d; ++j) {
      if (!a(alpha, j)) continue;
      const bool exact_zero = resonance_holds(lambda, alpha, j) && lambda.all_exact();
      if (exact_zero || std::abs(lambda_power(lambda, alpha) - lambda.values[j]) < kEpsDiv)
        fail(ErrorKind::SmallDivisor, "divisor below threshold at " + slot_text(alpha, j));
    }

  auto decide = [&](const MultiIndex& alpha, std::size_t j, cplx) -> std::optional<SlotAction> {
    return a(alpha, j) ? SlotAction::SolveH : SlotAction::KeepG;
  };
  return finish(f, run_engine(f, decide));
}

BrjunoSetReport brjuno_set_check(const MultiplierTuple& lambda, const std::vector<MultiIndex>& a, int depth) {
  if (depth < 1) fail(ErrorKind::InvalidArgument, "depth must be at least 1");
  BrjunoSetReport rep;
  for (int k = 1; k <= depth; ++k) {
    const int p = 1 << std::min(k, 30);
    const double w = omega_a(lambda, a, p);
    const double term = std::ldexp(-std::log(w), -k);
    rep.levels.push_back({k, w, term});
    rep.partial_sum += term;
  }
  return rep;
}

std::optional<int> germ_order(const TruncatedGerm& f) {
  if (f.dim() > 1) {
    const Eigen::MatrixXcd l = linear_part(f);
    if ((l - Eigen::MatrixXcd::Identity(l.rows(), l.cols())).cwiseAbs().maxCoeff() > kEpsRes)
      fail(ErrorKind::NotTangentToIdentity, "linear part is not the identity");
  }
  for (int m = 2; m <= f.trunc(); ++m)
    for (const auto& c : f.components())
      if (c.max_abs_of_degree(m) > 0.0) return m;
  return std::nullopt;
}

namespace {

// Exact angle of a 1-D multiplier: metadata first, then the four roots of
// unity that are exactly representable.
std::optional<Angle> parabolic_angle(const TruncatedGerm& f, cplx lambda) {
  if (auto a = exact_angle_of(f, 0)) return a->reduced();
  if (lambda == cplx(1.0, 0.0)) return Angle{0, 1};
  if (lambda == cplx(-1.0, 0.0)) return Angle{1, 2};
  if (lambda == cplx(0.0, 1.0)) return Angle{1, 4};
  if (lambda == cplx(0.0, -1.0)) return Angle{3, 4};
  return std::nullopt;
}

TruncatedGerm conjugate_1d(const TruncatedGerm& g, const TruncatedGerm& h) { return compose(invert(h), compose(g, h)); }

}  // namespace

ParabolicNF1D parabolic_nf_1d(const TruncatedGerm& f) {
  if (f.dim() != 1) fail(ErrorKind::DimensionMismatch, "parabolic normal form is one-dimensional");
  const cplx lambda = f.component(0).coeff(MultiIndex{1});
  const auto angle = parabolic_angle(f, lambda);
  if (!angle || std::abs(std::abs(lambda) - 1.0) > kEpsNeutral)
    fail(ErrorKind::NotParabolic, "multiplier is not an exact root of unity");
  const int p = static_cast<int>(angle->q);
  const int n = f.trunc();

  TruncatedGerm g = poincare_dulac(f.with_exact_angles({*angle})).normal_form;
  const double tiny = 1e-12 * std::max(1.0, g.max_abs());
  int k = 0;
  for (int m = p + 1; m <= n; m += p)
    if (std::abs(g.component(0).coeff(MultiIndex{m})) > tiny) {
      k = (m - 1) / p;
      break;
    }
  if (k == 0) fail(ErrorKind::IsIdentityIterate, "the p-th iterate is the identity through the truncation");
  const int top = 2 * p * k + 1;
  if (n < top)
    fail(ErrorKind::InsufficientTruncation, "truncation " + std::to_string(n) + " below " + std::to_string(top));
  g = g.restricted(top);

  // z -> c z with a c^{pk} = 1.
  const cplx a = g.component(0).coeff(MultiIndex{p * k + 1});
  const cplx c = std::pow(1.0 / a, 1.0 / static_cast<double>(p * k));
  {
    TruncatedSeries s(1, top);
    s.add_term(MultiIndex{1}, c);
    g = conjugate_1d(g, TruncatedGerm({s}));
  }

  // Kill z^{p(k+j)+1} for 1 <= j < k with h = z + t z^{pj+1}; the target
  // coefficient is affine in t at this order.
  for (int j = 1; j < k; ++j) {
    const MultiIndex target{p * (k + j) + 1};
    auto probe = [&](cplx t) {
      TruncatedSeries s(1, top);
      s.add_term(MultiIndex{1}, 1.0);
      s.add_term(MultiIndex{p * j + 1}, t);
      return conjugate_1d(g, TruncatedGerm({s}));
    };
    const cplx v0 = g.component(0).coeff(target);
    const cplx v1 = probe(1.0).component(0).coeff(target);
    if (std::abs(v1 - v0) < 1e-14) continue;
    g = probe(-v0 / (v1 - v0));
  }

  ParabolicNF1D out;
  out.lambda = lambda;
  out.p = p;
  out.k = k;
  out.b = g.component(0).coeff(MultiIndex{top});
  out.resit = (static_cast<double>(k * p) + 1.0) / 2.0 - out.b;
  return out;
}

ParabolicIndex parabolic_index(const std::function<cplx(cplx)>& f, cplx lambda, double radius,
                               std::optional<std::pair<int, int>> kp) {
  if (!(radius > 0.0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
  auto quad = [&](int m) {
    cplx s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(m);
      const cplx z = std::polar(radius, t);
      s += z / (lambda * z - f(z));
    }
    return s / static_cast<double>(m);
  };
  int m = 64;
  cplx prev = quad(m);
  while (m < (1 << 20)) {
    m *= 2;
    const cplx cur = quad(m);
    if (std::abs(cur - prev) < 1e-8) {
      ParabolicIndex out{cur, std::nullopt, m};
      if (kp) out.resit = (static_cast<double>(kp->first * kp->second) + 1.0) / 2.0 - cur;
      return out;
    }
    prev = cur;
  }
  fail(ErrorKind::QuadratureNonConvergent, "trapezoidal rule did not settle by 2^20 nodes");
}

ParabolicIndex parabolic_index(const TruncatedGerm& f, double radius) {
  if (f.dim() != 1) fail(ErrorKind::DimensionMismatch, "parabolic index is one-dimensional");
  std::optional<std::pair<int, int>> kp;
  try {
    const auto nf = parabolic_nf_1d(f);
    kp = std::make_pair(nf.k, nf.p);
  } catch (const DomainError&) {
  }
  const cplx lambda = f.component(0).coeff(MultiIndex{1});
  auto eval = [&](cplx z) { return f.component(0).evaluate(std::span<const cplx>(&z, 1)); };
  return parabolic_index(eval, lambda, radius, kp);
}

std::optional<OneResonantData> one_resonant_data(const TruncatedGerm& g, const MultiIndex& alpha, int r) {
  const std::size_t d = g.dim();
  if (alpha.dim() != d) fail(ErrorKind::DimensionMismatch, "alpha has the wrong dimension");
  if (r < 1 || static_cast<std::size_t>(r) > d) fail(ErrorKind::InvalidArgument, "r out of range");
  if (alpha.order() == 0) fail(ErrorKind::InvalidArgument, "alpha must be nonzero");
  const Eigen::MatrixXcd l = linear_part(g);
  const double tiny = 1e-12 * std::max(1.0, g.max_abs());
  for (int k = 1; k * alpha.order() + 1 <= g.trunc(); ++k) {
    std::vector<cplx> a(static_cast<std::size_t>(r));
    bool any = false;
    for (std::size_t j = 0; j < static_cast<std::size_t>(r); ++j) {
      const cplx c = g.component(j).coeff(alpha.scaled(k) + MultiIndex::unit(d, j));
      const cplx lj = l(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
      if (lj == 0.0) fail(ErrorKind::ZeroMultiplier, "marked multiplier vanishes");
      a[j] = c / lj;
      any = any || std::abs(c) > tiny;
    }
    if (any) return OneResonantData{k, std::move(a)};
  }
  return std::nullopt;
}

}  // namespace holodyn
