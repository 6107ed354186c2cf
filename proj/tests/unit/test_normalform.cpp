#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "holodyn/error.hpp"
#include "holodyn/normalform.hpp"
#include "holodyn/smalldiv.hpp"
#include "support/poly_oracle.hpp"

using namespace holodyn;

namespace {

const double kPi = std::numbers::pi;

TruncatedGerm poly1(int trunc, std::vector<cplx> coeffs) {  // coeffs[k] multiplies z^{k+1}
  std::vector<GermTerm> t;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0.0) t.push_back({0, MultiIndex{static_cast<int>(k) + 1}, coeffs[k]});
  return make_germ(1, trunc, t);
}

TruncatedGerm germ2(int trunc, std::vector<GermTerm> t) { return make_germ(2, trunc, t); }

DomainError expect_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    return e;
  }
  FAIL("expected a DomainError");
  return DomainError(ErrorKind::InvalidArgument, "");
}

Eigen::MatrixXcd diag_random(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> mod(0.3, 3.0), arg(-kPi, kPi);
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::polar(mod(rng), arg(rng));
  return l;
}

// 1-D linearization by h_j (λ^j − λ) = Σ_{k=2}^{j} f_k [z^j] h^k.
std::vector<cplx> lin_series_1d(const std::vector<cplx>& f, int n) {
  const cplx lam = f[1];
  std::vector<cplx> h(static_cast<std::size_t>(n) + 1, 0.0);
  h[1] = 1.0;
  for (int j = 2; j <= n; ++j) {
    // powers of the known part of h, truncated at degree j
    std::vector<cplx> pw(static_cast<std::size_t>(j) + 1, 0.0), hk = pw;
    for (int i = 1; i < j; ++i) hk[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i)];
    pw = hk;
    cplx rhs = 0.0;
    for (int k = 2; k <= j; ++k) {
      std::vector<cplx> next(pw.size(), 0.0);
      for (std::size_t a = 0; a < pw.size(); ++a)
        for (std::size_t b = 0; a + b < pw.size(); ++b) next[a + b] += pw[a] * hk[b];
      pw = next;
      if (static_cast<std::size_t>(k) < f.size()) rhs += f[static_cast<std::size_t>(k)] * pw[static_cast<std::size_t>(j)];
    }
    h[static_cast<std::size_t>(j)] = rhs / (std::pow(lam, j) - lam);
  }
  return h;
}

}  // namespace

TEST_CASE("poincare_dulac keeps only the resonant monomial") {
  // λ = (1/2, 1/4): λ_1^2 = λ_2 is the only resonance.
  auto f = germ2(4, {{0, MultiIndex{1, 0}, 0.5},
                     {1, MultiIndex{0, 1}, 0.25},
                     {1, MultiIndex{2, 0}, 1.0},
                     {0, MultiIndex{1, 1}, 0.7},
                     {0, MultiIndex{0, 2}, -0.3},
                     {1, MultiIndex{1, 2}, 0.2}});
  auto r = poincare_dulac(f);
  CHECK(r.residual < 1e-9);
  CHECK(std::abs(r.normal_form.component(1).coeff(MultiIndex{2, 0}) - 1.0) < 1e-12);
  REQUIRE(r.resonant_support.size() == 1);
  CHECK(r.resonant_support[0] == Slot{MultiIndex{2, 0}, 1});
  CHECK(std::abs(linear_part(r.conjugacy)(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("poincare_dulac with w^2 in the first component linearizes") {
  // λ_2^2 = 1/16 differs from λ_1 = 1/2, so w^2 in component 1 is removable.
  auto f = germ2(4, {{0, MultiIndex{1, 0}, 0.5}, {0, MultiIndex{0, 2}, 1.0}, {1, MultiIndex{0, 1}, 0.25}});
  auto r = poincare_dulac(f);
  CHECK(r.residual < 1e-9);
  CHECK(r.resonant_support.empty());
  CHECK(std::abs(r.conjugacy.component(0).coeff(MultiIndex{0, 2}) - 1.0 / (1.0 / 16 - 0.5)) < 1e-12);
}

TEST_CASE("poincare_dulac on non-resonant and linear germs") {
  std::mt19937_64 rng(7);
  Eigen::MatrixXcd l = Eigen::Vector2cd(2.0, 3.0).asDiagonal();
  auto f = oracle::random_germ(rng, l, 5);
  auto r = poincare_dulac(f);
  CHECK(r.residual < 1e-9);
  CHECK(r.resonant_support.empty());
  CHECK(max_coeff_diff(r.normal_form, linear_germ(l, 5)) < 1e-12);

  auto lin = linear_germ(l, 4);
  auto rl = poincare_dulac(lin);
  CHECK(max_coeff_diff(rl.normal_form, lin) == 0.0);
  CHECK(max_coeff_diff(rl.conjugacy, identity_germ(2, 4)) == 0.0);
}

TEST_CASE("poincare_dulac with a Jordan block") {
  std::mt19937_64 rng(11);
  Eigen::MatrixXcd l(2, 2);
  l << 2.0, 1.0, 0.0, 2.0;
  auto r = poincare_dulac(oracle::random_germ(rng, l, 5));
  CHECK(r.residual < 1e-9);
  CHECK(r.resonant_support.empty());

  // Multipliers (1, 1): everything is resonant, G = F.
  Eigen::MatrixXcd u(2, 2);
  u << 1.0, 1.0, 0.0, 1.0;
  auto f = oracle::random_germ(rng, u, 4);
  auto ru = poincare_dulac(f);
  CHECK(ru.residual < 1e-9);
  CHECK(max_coeff_diff(ru.normal_form, f) < 1e-12);

  Eigen::MatrixXcd lower(2, 2);
  lower << 2.0, 0.0, 1.0, 3.0;
  CHECK(expect_error([&] { poincare_dulac(linear_germ(lower, 3)); }).kind() == ErrorKind::NotTriangular);
}

TEST_CASE("linearize_formal examples") {
  auto out = linearize_formal(poly1(6, {2.0, 1.0}));
  REQUIRE(std::holds_alternative<TruncatedGerm>(out));
  const auto& h = std::get<TruncatedGerm>(out);
  CHECK(std::abs(h.component(0).coeff(MultiIndex{2}) - 0.5) < 1e-15);

  auto ob = linearize_formal(poly1(5, {1.0, 1.0}));
  REQUIRE(std::holds_alternative<ResonanceObstruction>(ob));
  CHECK(std::get<ResonanceObstruction>(ob).alpha == MultiIndex{2});
  CHECK(std::get<ResonanceObstruction>(ob).component == 0);

  auto f = germ2(6, {{0, MultiIndex{1, 0}, 0.5}, {1, MultiIndex{0, 1}, 1.0 / 3}, {1, MultiIndex{1, 1}, 1.0}});
  auto lf = linearize_formal(f);
  REQUIRE(std::holds_alternative<TruncatedGerm>(lf));
  const auto& hf = std::get<TruncatedGerm>(lf);
  CHECK(max_coeff_diff(compose(f, hf), compose(hf, linear_germ(linear_part(f), 6))) < 1e-12);
}

TEST_CASE("linearize_formal pre-conjugates a non-triangular linear part") {
  std::mt19937_64 rng(3);
  Eigen::MatrixXcd l(2, 2);
  l << 0.0, 1.0, -6.0, 5.0;  // eigenvalues 2 and 3
  auto f = oracle::random_germ(rng, l, 5);
  auto out = linearize_formal(f);
  REQUIRE(std::holds_alternative<TruncatedGerm>(out));
  const auto& h = std::get<TruncatedGerm>(out);
  CHECK(max_coeff_diff(compose(f, h), compose(h, linear_germ(l, 5))) < 1e-9);
}

TEST_CASE("1-D linearization matches the coefficient recursion") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> f(9, 0.0);
    f[1] = std::polar(std::uniform_real_distribution<double>(0.3, 3.0)(rng), 1.0 + trial);
    for (std::size_t k = 2; k < f.size(); ++k) f[k] = oracle::random_cplx(rng);
    auto out = linearize_formal(poly1(8, std::vector<cplx>(f.begin() + 1, f.end())));
    REQUIRE(std::holds_alternative<TruncatedGerm>(out));
    const auto& h = std::get<TruncatedGerm>(out);
    auto ref = lin_series_1d(f, 8);
    double diff = 0.0;
    for (int j = 1; j <= 8; ++j) diff = std::max(diff, std::abs(h.component(0).coeff(MultiIndex{j}) - ref[static_cast<std::size_t>(j)]));
    CHECK(diff < 1e-12 * std::max(1.0, std::abs(ref[8])));
  }
}

TEST_CASE("selective_eliminate keeps w^2 and removes zw") {
  const auto lam = std::polar(1.0, 2 * kPi / 5), mu = std::polar(1.0, 2 * kPi * 2 / 7);
  auto f = germ2(2, {{0, MultiIndex{1, 0}, lam}, {0, MultiIndex{1, 1}, 1.0}, {1, MultiIndex{0, 1}, mu}, {1, MultiIndex{0, 2}, 1.0}})
               .with_exact_angles({Angle{1, 5}, Angle{2, 7}});
  auto r = selective_eliminate(f, slot_list({{MultiIndex{0, 2}, 1}}), slot_list({{MultiIndex{1, 1}, 0}}));
  CHECK(r.residual < 1e-12);
  CHECK(r.normal_form.component(0).coeff(MultiIndex{1, 1}) == cplx(0.0));
  CHECK(r.normal_form.component(1).coeff(MultiIndex{0, 2}) == cplx(1.0));
  for (const auto& [alpha, c] : r.conjugacy.component(1).terms()) CHECK(alpha.order() == 1);
}

TEST_CASE("selective_eliminate errors") {
  auto f = germ2(3, {{0, MultiIndex{1, 0}, 0.5}, {1, MultiIndex{0, 1}, 0.25}, {1, MultiIndex{2, 0}, 1.0}});
  auto none = slot_list({});
  CHECK(expect_error([&] { selective_eliminate(f, none, index_list({MultiIndex{2, 0}})); }).kind() ==
        ErrorKind::SmallDivisor);
  auto both = slot_list({{MultiIndex{1, 1}, 0}});
  CHECK(expect_error([&] { selective_eliminate(f, both, both); }).kind() == ErrorKind::ConditionViolation);
  // (1,2) in A0 needs (1,1) in A0 for every component.
  CHECK(expect_error([&] { selective_eliminate(f, slot_list({{MultiIndex{1, 2}, 0}}), none); }).kind() ==
        ErrorKind::ConditionViolation);
  Eigen::MatrixXcd tri(2, 2);
  tri << 0.5, 1.0, 0.0, 0.25;
  CHECK(expect_error([&] { selective_eliminate(linear_germ(tri, 2), none, none); }).kind() == ErrorKind::NotDiagonal);
}

TEST_CASE("selective_eliminate condition 2 uses coefficient witnesses") {
  // z^2 in component 2 with the linear slot e_1 sums to (3,0) in A, while
  // e_1 + e_2 = (1,1) is in A: violation once degree 3 is in range.
  auto f = germ2(3, {{0, MultiIndex{1, 0}, 0.5}, {1, MultiIndex{0, 1}, 0.25}, {1, MultiIndex{2, 0}, 1.0}});
  const MultiplierTuple lam = diagonal_multipliers(f);
  SlotPredicate res = [lam](const MultiIndex& a, std::size_t j) { return resonance_holds(lam, a, j); };
  SlotPredicate rest = [lam](const MultiIndex& a, std::size_t j) { return !resonance_holds(lam, a, j); };
  CHECK(expect_error([&] { selective_eliminate(f, res, rest); }).kind() == ErrorKind::ConditionViolation);
  // Same sets at truncation 2 have no admissible products.
  auto r = selective_eliminate(f.restricted(2), res, rest);
  auto pd = poincare_dulac(f.restricted(2));
  CHECK(max_coeff_diff(r.normal_form, pd.normal_form) < 1e-10);
}

TEST_CASE("selective_eliminate with A0 = resonant slots reproduces poincare_dulac") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const int n = 3 + trial % 4;
    auto f = oracle::random_germ(rng, diag_random(rng, d), n);
    const MultiplierTuple lam = diagonal_multipliers(f);
    SlotPredicate res = [lam](const MultiIndex& a, std::size_t j) { return resonance_holds(lam, a, j); };
    SlotPredicate rest = [lam](const MultiIndex& a, std::size_t j) { return !resonance_holds(lam, a, j); };
    auto s = selective_eliminate(f, res, rest);
    auto p = poincare_dulac(f);
    CHECK(max_coeff_diff(s.normal_form, p.normal_form) < 1e-10);
    CHECK(max_coeff_diff(s.conjugacy, p.conjugacy) < 1e-10);
  }
}

TEST_CASE("conjugacy residual and support on random germs") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const int n = 2 + trial % 7;
    auto f = oracle::random_germ(rng, diag_random(rng, d), n, 0.5, 0.5);
    auto r = poincare_dulac(f);
    CHECK(r.residual < 1e-9);
    const auto lam = diagonal_multipliers(f);
    for (const auto& [alpha, j] : r.resonant_support) CHECK(resonance_holds(lam, alpha, j));
  }
  // Resonant tuples: λ = (e^{2πi/3}, e^{-2πi/3}) exactly.
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd l = Eigen::Vector2cd(std::polar(1.0, 2 * kPi / 3), std::polar(1.0, -2 * kPi / 3)).asDiagonal();
    auto f = oracle::random_germ(rng, l, 6, 0.5, 0.5).with_exact_angles({Angle{1, 3}, Angle{2, 3}});
    auto r = poincare_dulac(f);
    CHECK(r.residual < 1e-9);
    const auto lam = diagonal_multipliers(f);
    for (const auto& [alpha, j] : r.resonant_support) CHECK(resonance_holds(lam, alpha, j));
    CHECK_FALSE(r.resonant_support.empty());
  }
}

TEST_CASE("brjuno_set_check") {
  auto lam = MultiplierTuple::from_angles({Angle{1, 4}, Angle{3, 4}});
  auto empty = brjuno_set_check(lam, {}, 5);
  CHECK(empty.partial_sum == 0.0);
  for (const auto& l : empty.levels) CHECK(l.omega == 1.0);

  auto one = brjuno_set_check(lam, {MultiIndex{1, 1}}, 3);
  CHECK(one.levels[0].omega == 1.0);  // distances are √2, the adjoined 1 wins
  CHECK(one.partial_sum == 0.0);

  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto pair = MultiplierTuple::from_values({std::polar(1.0, 2 * kPi * g), std::polar(1.0, 2 * kPi * std::sqrt(2.0))});
  const int k = 4;
  auto all = enumerate_multi_indices(2, 2, 1 << k);
  auto a = brjuno_set_check(pair, all, k);
  BrjunoSeriesOptions opt;
  opt.kind = BrjunoKind::SetBased;
  opt.set = all;
  auto b = brjuno_series(pair, k, opt);
  CHECK(std::abs(a.partial_sum - b.partial_sum) < 1e-12);
}

TEST_CASE("germ_order") {
  CHECK(germ_order(poly1(5, {1.0, 0.0, 1.0})) == 3);
  CHECK(germ_order(germ2(4, {{0, MultiIndex{1, 0}, 1.0}, {0, MultiIndex{1, 1}, 1.0}, {1, MultiIndex{0, 1}, 1.0}, {1, MultiIndex{0, 2}, 1.0}})) == 2);
  CHECK_FALSE(germ_order(poly1(8, {1.0})).has_value());
  CHECK(expect_error([] { germ_order(germ2(3, {{0, MultiIndex{1, 0}, 2.0}, {1, MultiIndex{0, 1}, 1.0}})); }).kind() ==
        ErrorKind::NotTangentToIdentity);
}

TEST_CASE("parabolic_nf_1d examples") {
  auto a = parabolic_nf_1d(poly1(5, {1.0, 1.0}));
  CHECK(a.p == 1);
  CHECK(a.k == 1);
  CHECK(std::abs(a.b) < 1e-12);

  auto b = parabolic_nf_1d(poly1(5, {1.0, 1.0, 1.0}));
  CHECK(b.k == 1);
  CHECK(std::abs(b.b - 1.0) < 1e-12);
  CHECK(std::abs(b.resit - (1.0 - b.b)) < 1e-15);

  auto c = parabolic_nf_1d(poly1(5, {-1.0, 0.0, 1.0}));
  CHECK(c.p == 2);
  CHECK(c.k == 1);

  // z + 2z^2 + z^3 rescales to z + z^2 + z^3/4.
  auto d = parabolic_nf_1d(poly1(4, {1.0, 2.0, 1.0}));
  CHECK(std::abs(d.b - 0.25) < 1e-12);

  auto e = parabolic_nf_1d(poly1(6, {1.0, 0.0, 1.0}));
  CHECK(e.k == 2);
  CHECK(std::abs(e.resit - 1.5) < 1e-12);
}

TEST_CASE("parabolic_nf_1d errors") {
  CHECK(expect_error([] { parabolic_nf_1d(poly1(2, {1.0, 1.0})); }).kind() == ErrorKind::InsufficientTruncation);
  CHECK(expect_error([] { parabolic_nf_1d(poly1(5, {1.0})); }).kind() == ErrorKind::IsIdentityIterate);
  CHECK(expect_error([] { parabolic_nf_1d(poly1(5, {-1.0})); }).kind() == ErrorKind::IsIdentityIterate);
  CHECK(expect_error([] { parabolic_nf_1d(poly1(5, {0.5, 1.0})); }).kind() == ErrorKind::NotParabolic);
  auto rot = poly1(9, {std::polar(1.0, 2 * kPi / 3), 0.0, 0.0, 1.0}).with_exact_angles({Angle{1, 3}});
  auto r = parabolic_nf_1d(rot);
  CHECK(r.p == 3);
  CHECK(r.k == 1);
}

TEST_CASE("parabolic_index examples") {
  for (cplx c : {cplx(0.0), cplx(1.0), cplx(2.0, 1.0)}) {
    auto idx = parabolic_index([c](cplx z) { return z + z * z + c * z * z * z; }, 1.0);
    CHECK(std::abs(idx.b - c) < 1e-8);
    auto nf = parabolic_nf_1d(poly1(4, {1.0, 1.0, c}));
    CHECK(std::abs(nf.b - idx.b) < 1e-6);
  }
  auto z3 = parabolic_index(poly1(6, {1.0, 0.0, 1.0}));
  REQUIRE(z3.resit.has_value());
  CHECK(std::abs(*z3.resit - (1.5 - z3.b)) < 1e-15);
}

TEST_CASE("parabolic_nf_1d agrees with the contour index") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> c{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const int k = 1 + trial % 2;
    c[static_cast<std::size_t>(k)] = 1.0 + 0.5 * oracle::random_cplx(rng);
    for (std::size_t m = static_cast<std::size_t>(k) + 1; m < c.size(); ++m) c[m] = 0.3 * oracle::random_cplx(rng);
    auto f = poly1(7, c);
    auto nf = parabolic_nf_1d(f);
    CHECK(nf.k == k);
    auto idx = parabolic_index([&](cplx z) { return f.component(0).evaluate(std::span<const cplx>(&z, 1)); }, 1.0, 0.05);
    CHECK(std::abs(nf.b - idx.b) < 1e-6);
  }
}

TEST_CASE("one-resonant data is invariant under resonant conjugation") {
  const double t = std::sqrt(2.0) - 1.0;
  const cplx l1 = std::polar(1.0, 2 * kPi * t), l2 = std::conj(l1);
  auto g = germ2(7, {{0, MultiIndex{1, 0}, l1},
                     {1, MultiIndex{0, 1}, l2},
                     {0, MultiIndex{2, 1}, cplx(0.3, 0.1)},
                     {1, MultiIndex{1, 2}, cplx(-0.2, 0.4)}});
  auto base = one_resonant_data(g, MultiIndex{1, 1}, 2);
  REQUIRE(base.has_value());
  CHECK(base->k == 1);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    auto h = germ2(7, {{0, MultiIndex{1, 0}, 1.0},
                       {1, MultiIndex{0, 1}, 1.0},
                       {0, MultiIndex{2, 1}, oracle::random_cplx(rng)},
                       {1, MultiIndex{1, 2}, oracle::random_cplx(rng)},
                       {0, MultiIndex{3, 2}, oracle::random_cplx(rng)}});
    auto g2 = compose(invert(h), compose(g, h));
    auto again = one_resonant_data(g2, MultiIndex{1, 1}, 2);
    REQUIRE(again.has_value());
    CHECK(again->k == base->k);
    const cplx cross = again->a[0] * base->a[1] - again->a[1] * base->a[0];
    CHECK(std::abs(cross) < 1e-12);
  }
}
