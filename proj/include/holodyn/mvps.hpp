#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "holodyn/multi_index.hpp"

namespace holodyn {

using cplx = std::complex<double>;

inline constexpr double kPruneRelative = 1e-15;
inline constexpr double kMaxCondition = 1e12;

// Exact argument of a neutral multiplier: arg = 2*pi*p/q. The modulus is
// carried by the floating value.
struct Angle {
  std::int64_t p = 0;
  std::int64_t q = 1;

  Angle reduced() const;  // q > 0, 0 <= p < q, gcd(p, q) = 1
  double radians() const;
  bool operator==(const Angle& other) const = default;
};

namespace detail {
class MonomialLayout;
}

// Power series in d variables with zero constant term, truncated after total
// degree N. Coefficients live in a dense vector indexed by the graded rank of
// the monomial; the layout is shared between all series of the same (d, N).
class TruncatedSeries {
 public:
  TruncatedSeries(std::size_t dim, int trunc);

  std::size_t dim() const noexcept;
  int trunc() const noexcept;

  cplx coeff(const MultiIndex& alpha) const;
  std::vector<std::pair<MultiIndex, cplx>> terms() const;  // nonzero, graded order
  std::size_t term_count() const;
  bool is_zero() const;
  double max_abs() const;
  double max_abs_of_degree(int degree) const;

  // Degree-m layer only, as a series with the same (dim, trunc).
  TruncatedSeries homogeneous_part(int degree) const;
  // Drop all terms of degree > new_trunc and shrink the truncation.
  TruncatedSeries restricted(int new_trunc) const;
  // Same coefficients at a larger truncation (missing orders are zero).
  TruncatedSeries extended(int new_trunc) const;

  cplx evaluate(std::span<const cplx> z) const;

  TruncatedSeries operator+(const TruncatedSeries& other) const;
  TruncatedSeries operator-(const TruncatedSeries& other) const;
  TruncatedSeries operator*(cplx scalar) const;
  TruncatedSeries operator-() const;

  // Low-level access used by the algorithms; rank follows graded order.
  const detail::MonomialLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const detail::MonomialLayout>& layout_ptr() const noexcept {
    return layout_;
  }
  std::span<const cplx> dense() const noexcept { return coeffs_; }
  static TruncatedSeries from_dense(std::shared_ptr<const detail::MonomialLayout> layout,
                                    std::vector<cplx> coeffs);
  // Builder access; results of public operations are always pruned.
  void add_term(const MultiIndex& alpha, cplx c);

  void prune();

 private:
  TruncatedSeries(std::shared_ptr<const detail::MonomialLayout> layout, std::vector<cplx> coeffs);

  std::shared_ptr<const detail::MonomialLayout> layout_;
  std::vector<cplx> coeffs_;
};

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b);

// Entry of make_germ: component is 0-based.
struct GermTerm {
  std::size_t component = 0;
  MultiIndex alpha;
  cplx value;
};

class TruncatedGerm {
 public:
  TruncatedGerm(std::size_t dim, int trunc);
  explicit TruncatedGerm(std::vector<TruncatedSeries> components);

  std::size_t dim() const noexcept { return dim_; }
  int trunc() const noexcept { return trunc_; }
  const TruncatedSeries& component(std::size_t j) const { return components_.at(j); }
  const std::vector<TruncatedSeries>& components() const noexcept { return components_; }

  // Optional exact arguments of the multipliers, in the order of the diagonal
  // of the linear part.
  const std::optional<std::vector<std::optional<Angle>>>& exact_angles() const noexcept {
    return exact_angles_;
  }
  TruncatedGerm with_exact_angles(std::vector<std::optional<Angle>> angles) const;
  TruncatedGerm without_exact_angles() const;

  std::vector<cplx> evaluate(std::span<const cplx> z) const;

  TruncatedGerm restricted(int new_trunc) const;
  TruncatedGerm extended(int new_trunc) const;
  TruncatedGerm homogeneous_part(int degree) const;

  TruncatedGerm operator+(const TruncatedGerm& other) const;
  TruncatedGerm operator-(const TruncatedGerm& other) const;

  // max over components and monomials of |coefficient|.
  double max_abs() const;

 private:
  std::size_t dim_;
  int trunc_;
  std::vector<TruncatedSeries> components_;
  std::optional<std::vector<std::optional<Angle>>> exact_angles_;
};

TruncatedGerm make_germ(std::size_t dim, int trunc, std::span<const GermTerm> terms);
TruncatedGerm identity_germ(std::size_t dim, int trunc);
TruncatedGerm linear_germ(const Eigen::MatrixXcd& matrix, int trunc);

TruncatedGerm compose(const TruncatedGerm& outer, const TruncatedGerm& inner);
// Composition of a single series with a germ.
TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedGerm& inner);
TruncatedGerm invert(const TruncatedGerm& h);
Eigen::MatrixXcd linear_part(const TruncatedGerm& f);

// max |coefficient| of a - b over every component and monomial.
double max_coeff_diff(const TruncatedGerm& a, const TruncatedGerm& b);

}  // namespace holodyn
