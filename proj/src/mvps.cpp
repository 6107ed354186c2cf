#include "holodyn/mvps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "holodyn/error.hpp"
#include "monomial_layout.hpp"

namespace holodyn {

using detail::layout_for;
using detail::MonomialLayout;

Angle Angle::reduced() const {
  if (q == 0) fail(ErrorKind::InvalidArgument, "angle denominator must be non-zero");
  std::int64_t pp = p, qq = q;
  if (qq < 0) {
    pp = -pp;
    qq = -qq;
  }
  pp %= qq;
  if (pp < 0) pp += qq;
  std::int64_t g = std::gcd(pp, qq);
  if (g == 0) g = 1;
  return Angle{pp / g, qq / g};
}

double Angle::radians() const {
  return 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(q);
}

// ---------------------------------------------------------------------------
// TruncatedSeries

TruncatedSeries::TruncatedSeries(std::size_t dim, int trunc) : layout_(layout_for(dim, trunc)) {
  coeffs_.assign(layout_->size(), cplx(0.0, 0.0));
}

TruncatedSeries::TruncatedSeries(std::shared_ptr<const MonomialLayout> layout,
                                 std::vector<cplx> coeffs)
    : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {}

TruncatedSeries TruncatedSeries::from_dense(std::shared_ptr<const MonomialLayout> layout,
                                            std::vector<cplx> coeffs) {
  if (coeffs.size() != layout->size())
    fail(ErrorKind::DimensionMismatch, "dense coefficient vector has the wrong length");
  TruncatedSeries s(std::move(layout), std::move(coeffs));
  s.prune();
  return s;
}

std::size_t TruncatedSeries::dim() const noexcept { return layout_->dim(); }
int TruncatedSeries::trunc() const noexcept { return layout_->trunc(); }

cplx TruncatedSeries::coeff(const MultiIndex& alpha) const {
  auto r = layout_->rank_of(alpha);
  return r < 0 ? cplx(0.0, 0.0) : coeffs_[static_cast<std::size_t>(r)];
}

std::vector<std::pair<MultiIndex, cplx>> TruncatedSeries::terms() const {
  std::vector<std::pair<MultiIndex, cplx>> out;
  for (std::size_t r = 0; r < coeffs_.size(); ++r)
    if (coeffs_[r] != cplx(0.0, 0.0)) out.emplace_back(layout_->monomial(r), coeffs_[r]);
  return out;
}

std::size_t TruncatedSeries::term_count() const {
  return static_cast<std::size_t>(
      std::count_if(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c != cplx(0.0, 0.0); }));
}

bool TruncatedSeries::is_zero() const { return term_count() == 0; }

double TruncatedSeries::max_abs() const {
  double m = 0.0;
  for (auto c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double TruncatedSeries::max_abs_of_degree(int degree) const {
  if (degree < 1 || degree > trunc()) return 0.0;
  double m = 0.0;
  for (std::size_t r = layout_->degree_begin(degree); r < layout_->degree_begin(degree + 1); ++r)
    m = std::max(m, std::abs(coeffs_[r]));
  return m;
}

void TruncatedSeries::prune() {
  for (int m = 1; m <= trunc(); ++m) {
    const std::size_t lo = layout_->degree_begin(m), hi = layout_->degree_begin(m + 1);
    double big = 0.0;
    for (std::size_t r = lo; r < hi; ++r) big = std::max(big, std::abs(coeffs_[r]));
    const double floor = kPruneRelative * big;
    for (std::size_t r = lo; r < hi; ++r)
      if (std::abs(coeffs_[r]) < floor) coeffs_[r] = cplx(0.0, 0.0);
  }
}

void TruncatedSeries::add_term(const MultiIndex& alpha, cplx c) {
  if (alpha.dim() != dim()) fail(ErrorKind::DimensionMismatch, "multi-index " + alpha.to_string() + " has the wrong length");
  if (alpha.order() < 1 || alpha.order() > trunc())
    fail(ErrorKind::OrderOutOfRange, "multi-index " + alpha.to_string() + " has order outside [1, trunc]");
  coeffs_[static_cast<std::size_t>(layout_->rank_of(alpha))] += c;
}

TruncatedSeries TruncatedSeries::homogeneous_part(int degree) const {
  std::vector<cplx> c(coeffs_.size(), cplx(0.0, 0.0));
  if (degree >= 1 && degree <= trunc())
    for (std::size_t r = layout_->degree_begin(degree); r < layout_->degree_begin(degree + 1); ++r)
      c[r] = coeffs_[r];
  return TruncatedSeries(layout_, std::move(c));
}

TruncatedSeries TruncatedSeries::restricted(int new_trunc) const {
  if (new_trunc < 1 || new_trunc > trunc())
    fail(ErrorKind::OrderOutOfRange, "restriction order must lie in [1, trunc]");
  auto lay = layout_for(dim(), new_trunc);
  // Same graded enumeration, so the lower ranks coincide.
  std::vector<cplx> c(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lay->size()));
  return TruncatedSeries(std::move(lay), std::move(c));
}

TruncatedSeries TruncatedSeries::extended(int new_trunc) const {
  if (new_trunc < trunc()) fail(ErrorKind::OrderOutOfRange, "extension order below trunc");
  auto lay = layout_for(dim(), new_trunc);
  std::vector<cplx> c(lay->size(), cplx(0.0, 0.0));
  std::copy(coeffs_.begin(), coeffs_.end(), c.begin());
  return TruncatedSeries(std::move(lay), std::move(c));
}

cplx TruncatedSeries::evaluate(std::span<const cplx> z) const {
  if (z.size() != dim()) fail(ErrorKind::DimensionMismatch, "evaluation point has the wrong dimension");
  std::vector<cplx> mono(coeffs_.size());
  cplx sum(0.0, 0.0);
  for (std::size_t r = 0; r < coeffs_.size(); ++r) {
    auto p = layout_->pred_rank(r);
    mono[r] = (p < 0 ? cplx(1.0, 0.0) : mono[static_cast<std::size_t>(p)]) * z[layout_->pred_var(r)];
    sum += coeffs_[r] * mono[r];
  }
  return sum;
}

namespace {

void require_same_shape(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.dim() != b.dim() || a.trunc() != b.trunc())
    fail(ErrorKind::DimensionMismatch, "series differ in dimension or truncation");
}

// out += a * b, all dense over the same layout.
void accumulate_product(const MonomialLayout& lay, std::span<const cplx> a, std::span<const cplx> b,
                        std::vector<cplx>& out) {
  for (std::size_t ra = 0; ra < a.size(); ++ra) {
    const cplx ca = a[ra];
    if (ca == cplx(0.0, 0.0)) continue;
    for (const auto& [rb, rc] : lay.products(ra)) {
      const cplx cb = b[rb];
      if (cb != cplx(0.0, 0.0)) out[rc] += ca * cb;
    }
  }
}

}  // namespace

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& other) const {
  require_same_shape(*this, other);
  std::vector<cplx> c(coeffs_);
  for (std::size_t r = 0; r < c.size(); ++r) c[r] += other.coeffs_[r];
  return from_dense(layout_, std::move(c));
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& other) const {
  require_same_shape(*this, other);
  std::vector<cplx> c(coeffs_);
  for (std::size_t r = 0; r < c.size(); ++r) c[r] -= other.coeffs_[r];
  return from_dense(layout_, std::move(c));
}

TruncatedSeries TruncatedSeries::operator*(cplx scalar) const {
  std::vector<cplx> c(coeffs_);
  for (auto& x : c) x *= scalar;
  return from_dense(layout_, std::move(c));
}

TruncatedSeries TruncatedSeries::operator-() const { return (*this) * cplx(-1.0, 0.0); }

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_shape(a, b);
  std::vector<cplx> out(a.dense().size(), cplx(0.0, 0.0));
  accumulate_product(a.layout(), a.dense(), b.dense(), out);
  return TruncatedSeries::from_dense(a.layout_ptr(), std::move(out));
}

// ---------------------------------------------------------------------------
// TruncatedGerm

TruncatedGerm::TruncatedGerm(std::size_t dim, int trunc) : dim_(dim), trunc_(trunc) {
  components_.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) components_.emplace_back(dim, trunc);
}

TruncatedGerm::TruncatedGerm(std::vector<TruncatedSeries> components)
    : dim_(components.size()), trunc_(components.empty() ? 0 : components.front().trunc()),
      components_(std::move(components)) {
  if (components_.empty()) fail(ErrorKind::DimensionMismatch, "germ needs at least one component");
  for (const auto& c : components_)
    if (c.dim() != dim_ || c.trunc() != trunc_)
      fail(ErrorKind::DimensionMismatch, "germ components disagree on dimension or truncation");
}

TruncatedGerm TruncatedGerm::with_exact_angles(std::vector<std::optional<Angle>> angles) const {
  if (angles.size() != dim_) fail(ErrorKind::DimensionMismatch, "one exact angle slot per component is required");
  for (auto& a : angles)
    if (a) a = a->reduced();
  TruncatedGerm g(*this);
  g.exact_angles_ = std::move(angles);
  return g;
}

TruncatedGerm TruncatedGerm::without_exact_angles() const {
  TruncatedGerm g(*this);
  g.exact_angles_.reset();
  return g;
}

std::vector<cplx> TruncatedGerm::evaluate(std::span<const cplx> z) const {
  if (z.size() != dim_) fail(ErrorKind::DimensionMismatch, "evaluation point has the wrong dimension");
  const auto& lay = components_.front().layout();
  std::vector<cplx> mono(lay.size());
  for (std::size_t r = 0; r < lay.size(); ++r) {
    auto p = lay.pred_rank(r);
    mono[r] = (p < 0 ? cplx(1.0, 0.0) : mono[static_cast<std::size_t>(p)]) * z[lay.pred_var(r)];
  }
  std::vector<cplx> out(dim_, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < dim_; ++j) {
    auto c = components_[j].dense();
    cplx s(0.0, 0.0);
    for (std::size_t r = 0; r < c.size(); ++r)
      if (c[r] != cplx(0.0, 0.0)) s += c[r] * mono[r];
    out[j] = s;
  }
  return out;
}

TruncatedGerm TruncatedGerm::restricted(int new_trunc) const {
  std::vector<TruncatedSeries> c;
  for (const auto& s : components_) c.push_back(s.restricted(new_trunc));
  TruncatedGerm g(std::move(c));
  g.exact_angles_ = exact_angles_;
  return g;
}

TruncatedGerm TruncatedGerm::extended(int new_trunc) const {
  std::vector<TruncatedSeries> c;
  for (const auto& s : components_) c.push_back(s.extended(new_trunc));
  TruncatedGerm g(std::move(c));
  g.exact_angles_ = exact_angles_;
  return g;
}

TruncatedGerm TruncatedGerm::homogeneous_part(int degree) const {
  std::vector<TruncatedSeries> c;
  for (const auto& s : components_) c.push_back(s.homogeneous_part(degree));
  return TruncatedGerm(std::move(c));
}

TruncatedGerm TruncatedGerm::operator+(const TruncatedGerm& other) const {
  if (other.dim_ != dim_) fail(ErrorKind::DimensionMismatch, "germ dimensions differ");
  std::vector<TruncatedSeries> c;
  for (std::size_t j = 0; j < dim_; ++j) c.push_back(components_[j] + other.components_[j]);
  return TruncatedGerm(std::move(c));
}

TruncatedGerm TruncatedGerm::operator-(const TruncatedGerm& other) const {
  if (other.dim_ != dim_) fail(ErrorKind::DimensionMismatch, "germ dimensions differ");
  std::vector<TruncatedSeries> c;
  for (std::size_t j = 0; j < dim_; ++j) c.push_back(components_[j] - other.components_[j]);
  return TruncatedGerm(std::move(c));
}

double TruncatedGerm::max_abs() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.max_abs());
  return m;
}

TruncatedGerm make_germ(std::size_t dim, int trunc, std::span<const GermTerm> terms) {
  if (dim == 0) fail(ErrorKind::DimensionMismatch, "dimension must be at least 1");
  if (trunc < 1) fail(ErrorKind::OrderOutOfRange, "truncation must be at least 1");
  std::vector<TruncatedSeries> comps;
  for (std::size_t j = 0; j < dim; ++j) comps.emplace_back(dim, trunc);
  for (const auto& t : terms) {
    if (t.component >= dim)
      fail(ErrorKind::DimensionMismatch, "component index " + std::to_string(t.component + 1) + " out of range");
    comps[t.component].add_term(t.alpha, t.value);
  }
  for (auto& c : comps) c.prune();
  return TruncatedGerm(std::move(comps));
}

TruncatedGerm identity_germ(std::size_t dim, int trunc) {
  return linear_germ(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)), trunc);
}

TruncatedGerm linear_germ(const Eigen::MatrixXcd& matrix, int trunc) {
  if (matrix.rows() != matrix.cols()) fail(ErrorKind::DimensionMismatch, "linear part must be square");
  const auto d = static_cast<std::size_t>(matrix.rows());
  std::vector<GermTerm> terms;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      cplx v = matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (v != cplx(0.0, 0.0)) terms.push_back({j, MultiIndex::unit(d, i), v});
    }
  return make_germ(d, trunc, terms);
}

Eigen::MatrixXcd linear_part(const TruncatedGerm& f) {
  const auto d = static_cast<Eigen::Index>(f.dim());
  Eigen::MatrixXcd m(d, d);
  // Degree-one monomials are ranks 0..d-1 in graded order: e_1, e_2, ...
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      m(j, i) = f.component(static_cast<std::size_t>(j)).dense()[static_cast<std::size_t>(i)];
  return m;
}

namespace {

void require_composable(std::size_t outer_vars, int outer_trunc, const TruncatedGerm& inner) {
  if (outer_vars != inner.dim()) fail(ErrorKind::DimensionMismatch, "composition dimensions differ");
  if (outer_trunc != inner.trunc()) fail(ErrorKind::DimensionMismatch, "composition truncations differ");
}

// Powers inner^alpha for every alpha needed by the listed outer series,
// built along the predecessor chain alpha = pred + e_v.
class PowerTable {
 public:
  PowerTable(const TruncatedGerm& inner, const std::vector<const TruncatedSeries*>& outers)
      : lay_(inner.component(0).layout()), pow_(lay_.size()) {
    std::vector<char> need(lay_.size(), 0);
    for (const auto* s : outers) {
      auto c = s->dense();
      for (std::size_t r = 0; r < c.size(); ++r)
        if (c[r] != cplx(0.0, 0.0)) need[r] = 1;
    }
    for (std::size_t r = lay_.size(); r-- > 0;)
      if (need[r] && lay_.pred_rank(r) >= 0) need[static_cast<std::size_t>(lay_.pred_rank(r))] = 1;
    for (std::size_t r = 0; r < lay_.size(); ++r) {
      if (!need[r]) continue;
      const auto& factor = inner.component(lay_.pred_var(r)).dense();
      auto p = lay_.pred_rank(r);
      if (p < 0) {
        pow_[r].assign(factor.begin(), factor.end());
      } else {
        pow_[r].assign(lay_.size(), cplx(0.0, 0.0));
        accumulate_product(lay_, pow_[static_cast<std::size_t>(p)], factor, pow_[r]);
      }
    }
  }

  std::vector<cplx> apply(const TruncatedSeries& outer) const {
    std::vector<cplx> out(lay_.size(), cplx(0.0, 0.0));
    auto c = outer.dense();
    for (std::size_t r = 0; r < c.size(); ++r) {
      if (c[r] == cplx(0.0, 0.0)) continue;
      const auto& p = pow_[r];
      // inner^alpha starts at degree |alpha|.
      for (std::size_t s = lay_.degree_begin(lay_.degree(r)); s < p.size(); ++s) out[s] += c[r] * p[s];
    }
    return out;
  }

 private:
  const MonomialLayout& lay_;
  std::vector<std::vector<cplx>> pow_;
};

}  // namespace

TruncatedGerm compose(const TruncatedGerm& outer, const TruncatedGerm& inner) {
  require_composable(outer.dim(), outer.trunc(), inner);
  std::vector<const TruncatedSeries*> outs;
  for (const auto& c : outer.components()) outs.push_back(&c);
  PowerTable table(inner, outs);
  std::vector<TruncatedSeries> comps;
  for (const auto& c : outer.components())
    comps.push_back(TruncatedSeries::from_dense(inner.component(0).layout_ptr(), table.apply(c)));
  return TruncatedGerm(std::move(comps));
}

TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedGerm& inner) {
  require_composable(outer.dim(), outer.trunc(), inner);
  PowerTable table(inner, {&outer});
  return TruncatedSeries::from_dense(inner.component(0).layout_ptr(), table.apply(outer));
}

namespace {

TruncatedGerm apply_matrix(const Eigen::MatrixXcd& m, const TruncatedGerm& g) {
  std::vector<TruncatedSeries> comps;
  const auto& lay = g.component(0).layout_ptr();
  for (std::size_t i = 0; i < g.dim(); ++i) {
    std::vector<cplx> c(lay->size(), cplx(0.0, 0.0));
    for (std::size_t j = 0; j < g.dim(); ++j) {
      const cplx w = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w == cplx(0.0, 0.0)) continue;
      auto src = g.component(j).dense();
      for (std::size_t r = 0; r < c.size(); ++r) c[r] += w * src[r];
    }
    comps.push_back(TruncatedSeries::from_dense(lay, std::move(c)));
  }
  return TruncatedGerm(std::move(comps));
}

}  // namespace

TruncatedGerm invert(const TruncatedGerm& h) {
  const Eigen::MatrixXcd lin = linear_part(h);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lin);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || smax / smin > kMaxCondition)
    fail(ErrorKind::SingularLinearPart, "linear part is not invertible within the condition bound");
  const Eigen::MatrixXcd inv = lin.inverse();
  const TruncatedGerm id = identity_germ(h.dim(), h.trunc());
  const TruncatedGerm nonlinear = h - linear_germ(lin, h.trunc());
  TruncatedGerm k = linear_germ(inv, h.trunc());
  // K <- L^{-1}(z - N(K)); each pass fixes one more degree.
  for (int pass = 2; pass <= h.trunc(); ++pass) k = apply_matrix(inv, id - compose(nonlinear, k));
  return k;
}

double max_coeff_diff(const TruncatedGerm& a, const TruncatedGerm& b) {
  if (a.dim() != b.dim() || a.trunc() != b.trunc())
    fail(ErrorKind::DimensionMismatch, "germs differ in dimension or truncation");
  double m = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    auto x = a.component(j).dense(), y = b.component(j).dense();
    for (std::size_t r = 0; r < x.size(); ++r) m = std::max(m, std::abs(x[r] - y[r]));
  }
  return m;
}

}  // namespace holodyn
