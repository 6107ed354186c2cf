#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "holodyn/error.hpp"
#include "holodyn/spectrum.hpp"
#include "support/poly_oracle.hpp"
#include "support/resonance_oracle.hpp"

using namespace holodyn;

namespace {

bool has_entry(const ResonanceTable& t, const MultiIndex& a, std::size_t j) {
  return std::any_of(t.entries.begin(), t.entries.end(),
                     [&](const ResonanceEntry& e) { return e.alpha == a && e.component == j; });
}

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("multipliers ordering and defect flag") {
  std::vector<GermTerm> a{{0, MultiIndex{1, 0}, 0.5}, {1, MultiIndex{0, 1}, 3.0}};
  auto m = multipliers(make_germ(2, 2, a));
  CHECK(m.values[0] == cplx(3.0));
  CHECK(m.values[1] == cplx(0.5));
  CHECK_FALSE(m.defective);

  std::vector<GermTerm> b{{0, MultiIndex{1, 0}, cplx(0, 1)}, {0, MultiIndex{0, 2}, 1.0}, {1, MultiIndex{0, 1}, -1.0}};
  auto mb = multipliers(make_germ(2, 2, b));
  CHECK(mb.values[0] == cplx(-1.0));
  CHECK(mb.values[1] == cplx(0.0, 1.0));

  std::vector<GermTerm> j{{0, MultiIndex{1, 0}, 1.0}, {0, MultiIndex{0, 1}, 1.0}, {1, MultiIndex{0, 1}, 1.0}};
  auto mj = multipliers(make_germ(2, 2, j));
  CHECK(mj.values[0] == cplx(1.0));
  CHECK(mj.values[1] == cplx(1.0));
  CHECK(mj.defective);

  auto id = multipliers(identity_germ(2, 2));
  CHECK_FALSE(id.defective);
}

TEST_CASE("multipliers of a non-triangular linear part") {
  Eigen::MatrixXcd l(2, 2);
  l << 0.0, 1.0, -2.0, 3.0;  // eigenvalues 2 and 1
  auto m = multipliers(linear_germ(l, 2));
  CHECK(std::abs(m.values[0] - 2.0) < 1e-12);
  CHECK(std::abs(m.values[1] - 1.0) < 1e-12);
}

TEST_CASE("exact angles travel with their diagonal entry") {
  auto g = linear_germ(Eigen::Vector2cd(0.5, std::polar(1.0, 2 * kPi / 3)).asDiagonal(), 2)
               .with_exact_angles({std::nullopt, Angle{1, 3}});
  auto m = multipliers(g);
  CHECK(m.exact_angles[0] == Angle{1, 3});
  CHECK_FALSE(m.exact_angles[1].has_value());
  CHECK(std::abs(std::arg(m.values[0]) - 2 * kPi / 3) < 1e-12);
}

TEST_CASE("classify_multiplier examples") {
  CHECK(classify_multiplier(0.0).kind == MultiplierClass::Superattracting);
  CHECK(classify_multiplier(0.5).kind == MultiplierClass::GeometricallyAttracting);
  CHECK(classify_multiplier(cplx(0, 2)).kind == MultiplierClass::Repelling);
  auto c = classify_multiplier(std::polar(1.0, 2 * kPi / 3));
  CHECK(c.kind == MultiplierClass::Parabolic);
  CHECK(c.q == 3);
  auto e = classify_multiplier(std::polar(1.0, 2 * kPi * (std::sqrt(5.0) - 1) / 2));
  CHECK(e.kind == MultiplierClass::Elliptic);
  auto x = classify_multiplier(std::polar(1.0, 0.123), Angle{3, 7});
  CHECK(x.kind == MultiplierClass::Parabolic);
  CHECK(x.q == 7);
}

TEST_CASE("find_resonances examples") {
  auto t = find_resonances(MultiplierTuple::from_values({0.5, 0.25}), 5);
  REQUIRE(t.entries.size() == 1);
  CHECK(t.entries[0].alpha == MultiIndex{2, 0});
  CHECK(t.entries[0].component == 1);
  CHECK(t.entries[0].kind == ResonanceKind::IrregularSingular);
  CHECK(t.generators.empty());

  CHECK(find_resonances(MultiplierTuple::from_values({2.0, 3.0}), 6).entries.empty());

  auto rot = MultiplierTuple::from_angles({Angle{3727, 10000}, Angle{-3727, 10000}});
  auto r = find_resonances(rot, 4);
  REQUIRE(r.generators.size() == 2);
  CHECK(r.generators[0] == MultiIndex{1, 1});
  CHECK(r.generators[1] == MultiIndex{2, 2});
  CHECK(has_entry(r, MultiIndex{2, 1}, 0));
  CHECK(has_entry(r, MultiIndex{1, 2}, 1));
  CHECK(r.entries.size() == 2);
  for (const auto& e : r.entries) CHECK(e.kind == ResonanceKind::Regular);
  CHECK(r.minimal == std::vector<MultiIndex>{MultiIndex{1, 1}});
  CHECK(r.cominimal.empty());
}

TEST_CASE("resonance taxonomy") {
  // λ = (-1, 1): (0,2) is a generator, λ_2 = λ^{(0,2)+e_2}, and λ_1 = λ_2 λ_1.
  auto lam = MultiplierTuple::from_angles({Angle{1, 2}, Angle{0, 1}});
  auto t = find_resonances(lam, 3);
  for (const auto& e : t.entries) {
    if (e.kind == ResonanceKind::Regular) {
      REQUIRE(e.alpha[e.component] >= 1);
      CHECK(std::find(t.generators.begin(), t.generators.end(), e.alpha - MultiIndex::unit(2, e.component)) !=
            t.generators.end());
    }
    if (e.kind == ResonanceKind::IrregularComposite) {
      REQUIRE(e.witness.has_value());
      CHECK((e.witness->first + e.witness->second) == e.alpha);
    }
  }

  // Degenerate: λ_2 = 0 and λ^α = 0.
  auto z = find_resonances(MultiplierTuple::from_values({0.5, 0.0}), 3);
  bool saw_degenerate = false;
  for (const auto& e : z.entries)
    if (e.kind == ResonanceKind::Degenerate) saw_degenerate = true;
  CHECK(saw_degenerate);

  // λ = (λ1, λ1^2 λ3, λ3) with λ1^2 = 1: (2,0,1) -> j=2 is regular-free and
  // composite: (2,0,0) generator plus singular (0,0,1).
  auto c = MultiplierTuple::from_angles({Angle{1, 2}, Angle{1, 5}, Angle{1, 5}});
  auto tc = find_resonances(c, 3);
  bool saw_composite = false;
  for (const auto& e : tc.entries)
    if (e.alpha == MultiIndex{2, 0, 1} && e.component == 1) {
      CHECK(e.kind == ResonanceKind::IrregularComposite);
      saw_composite = true;
      CHECK(e.witness->first == MultiIndex{2, 0, 0});
      CHECK(e.witness->second == MultiIndex{0, 0, 1});
    }
  CHECK(saw_composite);
}

TEST_CASE("minimal_cominimal examples") {
  auto a = minimal_cominimal({MultiIndex{1, 1}, MultiIndex{2, 2}, MultiIndex{3, 3}});
  CHECK(a.minimal == std::vector<MultiIndex>{MultiIndex{1, 1}});
  CHECK(a.cominimal.empty());

  auto b = minimal_cominimal({MultiIndex{2, 0}, MultiIndex{0, 2}, MultiIndex{1, 1}});
  CHECK(b.minimal == std::vector<MultiIndex>{MultiIndex{2, 0}, MultiIndex{0, 2}});
  CHECK(b.cominimal == std::vector<MultiIndex>{MultiIndex{1, 1}});

  auto c = minimal_cominimal({});
  CHECK(c.minimal.empty());
  CHECK(c.cominimal.empty());

  // (1,2,1) needs two cominimal pieces; (1,0,1) is missing from the input.
  try {
    minimal_cominimal({MultiIndex{2, 0, 0}, MultiIndex{0, 2, 0}, MultiIndex{0, 0, 2}, MultiIndex{1, 1, 0},
                       MultiIndex{0, 1, 1}, MultiIndex{1, 2, 1}});
    FAIL("expected DecompositionIncomplete");
  } catch (const DomainError& e) {
    CHECK(e.kind() == ErrorKind::DecompositionIncomplete);
  }
}

TEST_CASE("decomposition verified on closed generator sets") {
  auto lam = MultiplierTuple::from_angles({Angle{1, 2}, Angle{1, 2}});
  auto t = find_resonances(lam, 6);
  CHECK(t.decomposition_complete);
  for (const auto& g : t.generators) {
    bool ok = nonnegative_decomposition(g, t.minimal).has_value();
    for (const auto& c : t.cominimal)
      if (!ok && c.divides(g)) ok = nonnegative_decomposition(g - c, t.minimal).has_value();
    CHECK(ok);
  }
}

TEST_CASE("detect_m_resonance examples") {
  auto rot = MultiplierTuple::from_angles({Angle{3727, 10000}, Angle{-3727, 10000}});
  auto m = detect_m_resonance(rot, 2, 6);
  REQUIRE(m.has_value());
  CHECK(m->m == 1);
  CHECK(m->generators == std::vector<MultiIndex>{MultiIndex{1, 1}});
  auto dec = minimal_cominimal(find_resonances(rot, 6).generators);
  CHECK(dec.minimal.size() == 1);
  CHECK(dec.minimal[0] == m->generators[0]);

  CHECK_FALSE(detect_m_resonance(MultiplierTuple::from_values({0.5, 0.25}), 2, 6).has_value());
  CHECK_FALSE(detect_m_resonance(MultiplierTuple::from_values({2.0, 3.0}), 2, 6).has_value());

  // Two independent rotations with inverse partners: m = 2.
  auto two = MultiplierTuple::from_angles({Angle{1, 7}, Angle{-1, 7}, Angle{3, 11}, Angle{-3, 11}});
  auto m2 = detect_m_resonance(two, 4, 4);
  REQUIRE(m2.has_value());
  CHECK(m2->m == 2);
}

TEST_CASE("invariant_splitting examples") {
  auto s = invariant_splitting(Eigen::Vector3cd(0.5, 1.0, 3.0).asDiagonal());
  REQUIRE(s.stable.size() == 1);
  REQUIRE(s.centre.size() == 1);
  REQUIRE(s.unstable.size() == 1);
  CHECK(std::abs(std::abs(s.stable[0](0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(s.centre[0](1)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(s.unstable[0](2)) - 1.0) < 1e-12);

  auto t = invariant_splitting(Eigen::Vector2cd(cplx(0, 1), 2.0).asDiagonal());
  CHECK(t.stable.empty());
  CHECK(t.centre.size() == 1);
  CHECK(t.unstable.size() == 1);

  Eigen::MatrixXcd j(2, 2);
  j << 1.0, 1.0, 0.0, 1.0;
  auto u = invariant_splitting(j);
  CHECK(u.centre.size() == 2);
}

TEST_CASE("invariant_splitting bases form an invertible matrix") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(d, d);
    std::uniform_real_distribution<double> rad(0.2, 2.5), ang(0.0, 2 * kPi);
    for (Eigen::Index i = 0; i < d; ++i) diag(i, i) = std::polar(i == 0 ? 1.0 : rad(rng), ang(rng));
    Eigen::MatrixXcd p = oracle::random_matrix(rng, static_cast<std::size_t>(d));
    Eigen::MatrixXcd l = p * diag * p.inverse();
    auto s = invariant_splitting(l);
    Eigen::MatrixXcd basis(d, d);
    Eigen::Index c = 0;
    for (const auto* group : {&s.stable, &s.centre, &s.unstable})
      for (const auto& v : *group) basis.col(c++) = v;
    REQUIRE(c == d);
    CHECK(std::abs(basis.determinant()) > 1e-10);
    // Each stable vector stays in the span of stable vectors.
    for (const auto& v : s.stable) {
      Eigen::MatrixXcd sb(d, static_cast<Eigen::Index>(s.stable.size()));
      for (std::size_t k = 0; k < s.stable.size(); ++k) sb.col(static_cast<Eigen::Index>(k)) = s.stable[k];
      Eigen::VectorXcd lv = l * v;
      Eigen::VectorXcd coef = sb.colPivHouseholderQr().solve(lv);
      CHECK((sb * coef - lv).norm() < 1e-8);
    }
  }
}

TEST_CASE("resonances are symmetric under permutation") {
  auto lam = MultiplierTuple::from_angles({Angle{1, 4}, Angle{3, 4}, Angle{1, 2}});
  auto t = find_resonances(lam, 4);
  const std::vector<std::size_t> perm{2, 0, 1};  // new i holds old perm[i]
  MultiplierTuple p;
  for (auto k : perm) {
    p.values.push_back(lam.values[k]);
    p.exact_angles.push_back(lam.exact_angles[k]);
  }
  auto tp = find_resonances(p, 4);
  CHECK(t.entries.size() == tp.entries.size());
  for (const auto& e : t.entries) {
    std::vector<int> a(3);
    std::size_t jn = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      a[i] = e.alpha[perm[i]];
      if (perm[i] == e.component) jn = i;
    }
    CHECK(has_entry(tp, MultiIndex(a), jn));
  }
}

TEST_CASE("exact channel agrees with the integer oracle on sampled tuples") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> qd(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    oracle::RationalTuple rt;
    std::vector<Angle> angles;
    for (std::size_t i = 0; i < d; ++i) {
      const int q = qd(rng);
      const int p = std::uniform_int_distribution<int>(0, q - 1)(rng);
      rt.p.push_back(p);
      rt.q.push_back(q);
      angles.push_back(Angle{p, q});
    }
    auto table = find_resonances(MultiplierTuple::from_angles(angles), 6);
    std::set<std::pair<std::vector<int>, int>> got;
    for (const auto& e : table.entries) got.emplace(e.alpha.entries(), static_cast<int>(e.component));
    CHECK(got == oracle::brute_resonances(rt, 6));
    std::set<std::vector<int>> gens;
    for (const auto& g : table.generators) gens.insert(g.entries());
    CHECK(gens == oracle::brute_generators(rt, 6));
  }
}
