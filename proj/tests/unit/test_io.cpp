#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "holodyn/error.hpp"
#include "holodyn/io.hpp"
#include "support/poly_oracle.hpp"

using namespace holodyn;

namespace {

ErrorKind error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    return e.kind();
  }
  FAIL("expected a DomainError");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("germ JSON round-trips bit-exactly through the canonical writer") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> expo(-30.0, 30.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 3;
    auto f = oracle::random_germ(rng, oracle::random_matrix(rng, d), 4, 0.5);
    // Spread magnitudes so the 17-digit path is exercised.
    std::vector<GermTerm> t;
    for (std::size_t j = 0; j < d; ++j)
      for (const auto& [a, c] : f.component(j).terms()) t.push_back({j, a, c * std::pow(10.0, expo(rng))});
    auto g = make_germ(d, 4, t);
    if (trial % 2) {
      std::vector<std::optional<Angle>> angles(d);
      angles[0] = Angle{1, 7};
      g = g.with_exact_angles(angles);
    }
    const auto back = germ_from_json(Json::parse(canonical_dump(germ_to_json(g))));
    REQUIRE(back.dim() == g.dim());
    for (std::size_t j = 0; j < d; ++j) {
      auto a = g.component(j).terms();
      auto b = back.component(j).terms();
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].first == b[k].first);
        CHECK(a[k].second == b[k].second);
      }
    }
    CHECK(back.exact_angles() == g.exact_angles());
  }
}

TEST_CASE("canonical dump sorts keys and spells non-finite floats") {
  Json j{{"zeta", 1}, {"alpha", 0.1}, {"mid", std::numeric_limits<double>::infinity()}, {"n", 2.0}};
  const std::string s = canonical_dump(j);
  CHECK(s.find("\"alpha\"") < s.find("\"mid\""));
  CHECK(s.find("\"mid\"") < s.find("\"zeta\""));
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"inf\"") != std::string::npos);
  CHECK(s.find("2.0") != std::string::npos);
}

TEST_CASE("germ JSON errors") {
  CHECK(error_of([] { germ_from_json(Json::parse(R"({"dim":1,"trunc":3,"components":[[{"alpha":[0],"re":1,"im":0}]]})")); }) ==
        ErrorKind::OrderOutOfRange);
  CHECK(error_of([] { germ_from_json(Json::parse(R"({"dim":1,"trunc":3,"components":[[{"alpha":[4],"re":1}]]})")); }) ==
        ErrorKind::OrderOutOfRange);
  CHECK(error_of([] { germ_from_json(Json::parse(R"({"dim":2,"trunc":3,"components":[[{"alpha":[1],"re":1}],[]]})")); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(error_of([] { germ_from_json(Json::parse(R"({"dim":1,"components":[[]]})")); }) == ErrorKind::ParseError);
  CHECK(error_of([] { read_germ("/nonexistent/germ.json"); }) == ErrorKind::ParseError);
}

TEST_CASE("complex, angle and theta parsing") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0.0));
  CHECK(parse_complex("-2i") == cplx(0.0, -2.0));
  CHECK(parse_complex("0.1-0.3i") == cplx(0.1, -0.3));
  CHECK(parse_complex("i") == cplx(0.0, 1.0));
  CHECK(parse_complex("-i") == cplx(0.0, -1.0));
  CHECK(parse_complex("1e-3+2e+1i") == cplx(1e-3, 20.0));
  CHECK(error_of([] { parse_complex("1x"); }) == ErrorKind::ParseError);
  CHECK(parse_angle("3/7") == Angle{3, 7});
  CHECK(parse_angle("2") == Angle{2, 1});
  CHECK(error_of([] { parse_angle("3/0"); }) == ErrorKind::ParseError);
  // 1/3 in double-double: 3θ - 1 vanishes to about 1e-32.
  const DoubleDouble third = parse_theta("1/3");
  const DoubleDouble r = third * DoubleDouble(3.0) - DoubleDouble(1.0);
  CHECK(std::abs(r.to_double()) < 1e-31);
  CHECK(parse_theta("0.25").to_double() == 0.25);
}

TEST_CASE("multiplier JSON round trip") {
  auto m = MultiplierTuple::from_angles({Angle{1, 5}, Angle{2, 7}});
  auto back = multipliers_from_json(Json::parse(canonical_dump(multipliers_to_json(m))));
  CHECK(back.values == m.values);
  CHECK(back.exact_angles == m.exact_angles);
  auto s = multipliers_from_json(Json::parse(R"({"values":[{"re":0.5,"im":0},2], "exact_angles":[null,"0/1"]})"));
  CHECK(s.values[1] == cplx(2.0));
  CHECK(*s.exact_angles[1] == Angle{0, 1});
}
