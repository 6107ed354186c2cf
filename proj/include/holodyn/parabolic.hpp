#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "holodyn/mvps.hpp"

namespace holodyn {

inline constexpr double kEpsChar = 1e-8;
inline constexpr double kTolAbel = 1e-5;

// Roots of k a v^k = -1 (attracting) and k a v^k = +1 (repelling), sorted by
// argument in [0, 2π).
struct DirectionSet {
  int k = 0;
  cplx a;
  std::vector<cplx> attracting;
  std::vector<cplx> repelling;
};

DirectionSet attracting_directions_1d(const TruncatedGerm& f);

// Petal P_j(R, θ) of a normalized germ z(1 - z^k/k) + O(z^{k+2}).
struct PetalSpec {
  int k = 1;
  int j = 0;
  double radius = 1.0;  // R
  double theta = 1.0;
};

bool petal_membership(cplx z, const PetalSpec& spec);

// R above which H(R, θ) is forward invariant under w -> w + 1 + 1/(w - 1),
// the w = 1/z picture of z - z^2. θ in (0, π/2].
double petal_radius(double theta);

struct FatouValue {
  cplx value;
  double error = 0.0;  // disagreement of two tail extrapolations
  int steps = 0;
};

// ψ(z) = lim (w_n - n - β log w_n) with w = z^{-k}, extrapolated in 1/n.
FatouValue fatou_coordinate(const std::function<cplx(cplx)>& f, cplx z, int k, cplx beta, int n_max = 100000,
                            double tol = kTolAbel);
// β = resit/k from the formal invariants of the germ.
FatouValue fatou_coordinate(const TruncatedGerm& f, cplx z, int n_max = 100000, double tol = kTolAbel);

struct CharacteristicDirection {
  Eigen::VectorXcd v;  // unit, first nonzero entry real positive
  cplx gamma;
  bool degenerate = false;
  int multiplicity = 1;
  std::vector<cplx> directors;  // empty when degenerate
  bool attracting = false;
};

struct CharacteristicReport {
  int k = 0;
  bool dicritical = false;
  std::vector<CharacteristicDirection> directions;
};

// Tangent-to-identity germs in dimension 2.
CharacteristicReport characteristic_directions(const TruncatedGerm& f);

// Eigenvalues of (1/k)(D - I), D the derivative at [v] of the induced map on
// projective space.
std::vector<cplx> directors(const TruncatedGerm& f, const Eigen::VectorXcd& v);

Eigen::VectorXcd normalize_direction(const Eigen::VectorXcd& v);

}  // namespace holodyn
