#include "holodyn/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "holodyn/error.hpp"
#include "holodyn/normalform.hpp"
#include "holodyn/spectrum.hpp"

namespace holodyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double arg_0_2pi(cplx z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  return a;
}

std::vector<cplx> kth_roots(cplx c, int k) {
  const double r = std::pow(std::abs(c), 1.0 / k);
  const double base = std::arg(c) / k;
  std::vector<cplx> out;
  for (int m = 0; m < k; ++m) out.push_back(std::polar(r, base + kTwoPi * m / k));
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) { return arg_0_2pi(x) < arg_0_2pi(y); });
  return out;
}

// Distance between two angles on the circle.
double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

int tangent_order(const TruncatedGerm& f) {
  const std::optional<int> order = germ_order(f);
  if (!order) fail(ErrorKind::InfiniteOrder, "germ agrees with the identity up to the truncation");
  return *order - 1;
}

void require_tangent_1d(const TruncatedGerm& f) {
  if (f.dim() != 1) fail(ErrorKind::DimensionMismatch, "expected a 1-D germ");
  if (std::abs(f.component(0).coeff(MultiIndex{1}) - 1.0) > kEpsRes)
    fail(ErrorKind::NotTangentToIdentity, "multiplier is not 1");
}

Eigen::VectorXcd eval_homogeneous(const std::vector<TruncatedSeries>& p, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(p.size()));
  const std::span<const cplx> pt(v.data(), static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(i)) = p[i].evaluate(pt);
  return out;
}

Eigen::MatrixXcd jacobian(const std::vector<TruncatedSeries>& p, const Eigen::VectorXcd& v) {
  const auto d = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (const auto& [alpha, c] : p[static_cast<std::size_t>(i)].terms()) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const int e = alpha[static_cast<std::size_t>(b)];
        if (e == 0) continue;
        cplx mono = c * static_cast<double>(e);
        for (Eigen::Index l = 0; l < d; ++l) {
          const int pw = alpha[static_cast<std::size_t>(l)] - (l == b ? 1 : 0);
          if (pw > 0) mono *= std::pow(v(l), pw);
        }
        jac(i, b) += mono;
      }
    }
  }
  return jac;
}

std::vector<TruncatedSeries> leading_part(const TruncatedGerm& f, int k) {
  std::vector<TruncatedSeries> p;
  for (const auto& c : f.components()) p.push_back(c.homogeneous_part(k + 1));
  return p;
}

// Distinct roots of sum c[m] u^m with multiplicities; coefficients above deg
// are ignored.
std::vector<std::pair<cplx, int>> clustered_roots(const std::vector<cplx>& c, int deg) {
  std::vector<cplx> roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
  } else if (deg > 1) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int m = 1; m < deg; ++m) comp(m, m - 1) = 1.0;
    for (int m = 0; m < deg; ++m) comp(m, deg - 1) = -c[static_cast<std::size_t>(m)] / c[static_cast<std::size_t>(deg)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.push_back(es.eigenvalues()(i));
  }
  std::vector<std::pair<cplx, int>> out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    cplx sum = roots[i];
    int count = 1;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - roots[i]) < 1e-5 * (1.0 + std::abs(roots[i]))) {
        used[j] = true;
        sum += roots[j];
        ++count;
      }
    }
    out.emplace_back(sum / static_cast<double>(count), count);
  }
  return out;
}

}  // namespace

DirectionSet attracting_directions_1d(const TruncatedGerm& f) {
  require_tangent_1d(f);
  DirectionSet out;
  out.k = tangent_order(f);
  out.a = f.component(0).coeff(MultiIndex{out.k + 1});
  const double ka = out.k;
  out.attracting = kth_roots(-1.0 / (ka * out.a), out.k);
  out.repelling = kth_roots(1.0 / (ka * out.a), out.k);
  return out;
}

bool petal_membership(cplx z, const PetalSpec& spec) {
  if (z == cplx(0.0, 0.0)) fail(ErrorKind::OriginPoint, "the origin is not in any petal");
  if (spec.k < 1) fail(ErrorKind::InvalidArgument, "k must be positive");
  const double centre = kTwoPi * spec.j / spec.k;
  if (angle_gap(std::arg(z), centre) >= std::numbers::pi / spec.k) return false;
  const cplx w = std::pow(z, -spec.k);
  return std::abs(std::arg(w - spec.radius)) < spec.theta;
}

double petal_radius(double theta) {
  if (!(theta > 0.0 && theta <= std::numbers::pi / 2))
    fail(ErrorKind::InvalidArgument, "petal aperture must lie in (0, pi/2]");
  const double s = std::sin(theta);
  return 1.0 + 2.0 / (s * s);
}

FatouValue fatou_coordinate(const std::function<cplx(cplx)>& f, cplx z, int k, cplx beta, int n_max, double tol) {
  if (z == cplx(0.0, 0.0)) fail(ErrorKind::OriginPoint, "the origin has no Fatou coordinate");
  if (k < 1 || n_max < 8) fail(ErrorKind::InvalidArgument, "need k >= 1 and n_max >= 8");
  const int n_half = n_max / 2;
  const int n_three = (3 * n_max) / 4;
  auto psi = [&](cplx zn, int n) {
    const cplx w = std::pow(zn, -k);
    return w - static_cast<double>(n) - beta * std::log(w);
  };
  const double bound = 10.0 * std::max(std::abs(z), 1.0);
  cplx p_half, p_three, p_full;
  cplx zn = z;
  for (int n = 1; n <= n_max; ++n) {
    zn = f(zn);
    if (!std::isfinite(zn.real()) || !std::isfinite(zn.imag()) || std::abs(zn) > bound || zn == cplx(0.0, 0.0))
      fail(ErrorKind::OrbitEscaped, "orbit left the petal at step " + std::to_string(n));
    if (n == n_half) p_half = psi(zn, n);
    if (n == n_three) p_three = psi(zn, n);
  }
  const cplx w_end = std::pow(zn, -k);
  if (std::abs(w_end - static_cast<double>(n_max)) > 0.5 * n_max)
    fail(ErrorKind::OrbitEscaped, "orbit does not follow the attracting drift");
  p_full = psi(zn, n_max);
  // Tail error behaves like C/n; eliminate it from two pairs of samples.
  auto richardson = [](cplx a, int na, cplx b, int nb) {
    return (static_cast<double>(nb) * b - static_cast<double>(na) * a) / static_cast<double>(nb - na);
  };
  FatouValue out;
  out.value = richardson(p_half, n_half, p_full, n_max);
  const cplx other = richardson(p_half, n_half, p_three, n_three);
  out.error = std::abs(out.value - other);
  out.steps = n_max;
  if (out.error > tol) fail(ErrorKind::NotConverged, "tail extrapolations disagree by " + std::to_string(out.error));
  return out;
}

FatouValue fatou_coordinate(const TruncatedGerm& f, cplx z, int n_max, double tol) {
  require_tangent_1d(f);
  const ParabolicNF1D nf = parabolic_nf_1d(f);
  const int k = nf.k;
  const cplx a = f.component(0).coeff(MultiIndex{k + 1});
  if (a == cplx(0.0, 0.0)) fail(ErrorKind::InvalidArgument, "leading coefficient vanishes");
  // ζ = z/μ puts the germ in the form ζ(1 - ζ^k/k) + ...
  const cplx mu = std::pow(-1.0 / (static_cast<double>(k) * a), 1.0 / k);
  const TruncatedSeries& series = f.component(0);
  auto g = [&](cplx zeta) {
    const cplx pt = mu * zeta;
    return series.evaluate(std::span<const cplx>(&pt, 1)) / mu;
  };
  return fatou_coordinate(g, z / mu, k, nf.resit / static_cast<double>(k), n_max, tol);
}

Eigen::VectorXcd normalize_direction(const Eigen::VectorXcd& v) {
  const double n = v.norm();
  if (n == 0.0) fail(ErrorKind::InvalidArgument, "zero direction");
  Eigen::VectorXcd u = v / n;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > 1e-14) {
      u *= std::conj(u(i)) / std::abs(u(i));
      u(i) = std::abs(u(i));
      break;
    }
  }
  return u;
}

std::vector<cplx> directors(const TruncatedGerm& f, const Eigen::VectorXcd& v) {
  if (static_cast<std::size_t>(v.size()) != f.dim()) fail(ErrorKind::DimensionMismatch, "direction size");
  const int k = tangent_order(f);
  const std::vector<TruncatedSeries> p = leading_part(f, k);
  const Eigen::VectorXcd u = normalize_direction(v);
  const Eigen::VectorXcd pv = eval_homogeneous(p, u);
  const cplx gamma = u.dot(pv);
  const double scale = std::max(1.0, f.max_abs());
  if ((pv - gamma * u).norm() > kEpsChar * scale)
    fail(ErrorKind::NotEigendirection, "P(v) is not parallel to v");
  if (std::abs(gamma) < kEpsChar) fail(ErrorKind::DegenerateDirection, "gamma vanishes");
  const auto d = u.size();
  // Unitary frame with first column u.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(u);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
  q.col(0) = u;
  const Eigen::MatrixXcd jt = q.adjoint() * jacobian(p, u) * q;
  const Eigen::MatrixXcd dmat = jt.bottomRightCorner(d - 1, d - 1) / gamma;
  const Eigen::MatrixXcd a =
      (dmat - Eigen::MatrixXcd::Identity(d - 1, d - 1)) / static_cast<double>(k);
  std::vector<cplx> out;
  if (d == 1) return out;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

CharacteristicReport characteristic_directions(const TruncatedGerm& f) {
  if (f.dim() != 2) fail(ErrorKind::UnsupportedDimension, "characteristic directions need d = 2");
  CharacteristicReport out;
  out.k = tangent_order(f);
  const int k = out.k;
  const std::vector<TruncatedSeries> p = leading_part(f, k);
  auto c_of = [&](std::size_t comp, int ez, int ew) -> cplx {
    if (ez < 0 || ew < 0) return 0.0;
    return p[comp].coeff(MultiIndex{ez, ew});
  };
  // r(u) = z P_w - w P_z at (1, u).
  std::vector<cplx> r(static_cast<std::size_t>(k + 3));
  double rmax = 0.0;
  for (int m = 0; m <= k + 2; ++m) {
    r[static_cast<std::size_t>(m)] = c_of(1, k + 1 - m, m) - c_of(0, k + 2 - m, m - 1);
    rmax = std::max(rmax, std::abs(r[static_cast<std::size_t>(m)]));
  }
  double pmax = 0.0;
  for (const auto& s : p) pmax = std::max(pmax, s.max_abs());
  const double tol = 1e-12 * std::max(1.0, pmax);
  if (rmax <= tol) {
    out.dicritical = true;
    return out;
  }
  int deg = k + 2;
  while (std::abs(r[static_cast<std::size_t>(deg)]) <= tol) --deg;

  std::vector<std::pair<Eigen::VectorXcd, int>> found;
  for (const auto& [u, mult] : clustered_roots(r, deg)) {
    Eigen::VectorXcd v(2);
    v << 1.0, u;
    found.emplace_back(normalize_direction(v), mult);
  }
  if (deg < k + 2) {
    Eigen::VectorXcd v(2);
    v << 0.0, 1.0;
    found.emplace_back(v, k + 2 - deg);
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    // Finite chart points by u = w/z, then [0:1].
    const auto key = [](const Eigen::VectorXcd& v) {
      if (std::abs(v(0)) < 1e-14) return std::make_tuple(1, 0.0, 0.0);
      const cplx u = v(1) / v(0);
      return std::make_tuple(0, u.real(), u.imag());
    };
    return key(x.first) < key(y.first);
  });

  for (auto& [v, mult] : found) {
    CharacteristicDirection dir;
    dir.v = v;
    dir.multiplicity = mult;
    dir.gamma = v.dot(eval_homogeneous(p, v));
    dir.degenerate = std::abs(dir.gamma) < kEpsChar;
    if (!dir.degenerate) {
      dir.directors = directors(f, v);
      dir.attracting = std::all_of(dir.directors.begin(), dir.directors.end(),
                                   [](cplx x) { return x.real() > 0.0; });
    }
    out.directions.push_back(std::move(dir));
  }
  return out;
}

}  // namespace holodyn
