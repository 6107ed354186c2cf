#include "holodyn/dynlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "holodyn/error.hpp"

namespace holodyn {

namespace {

// Scaled so that large finite points do not overflow to inf.
double norm(const Point& z) {
  double big = 0.0;
  for (cplx c : z) big = std::max(big, std::abs(c));
  if (big == 0.0 || !std::isfinite(big)) return big;
  double s = 0.0;
  for (cplx c : z) s += std::norm(c / big);
  return big * std::sqrt(s);
}

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

bool finite(const Point& z) {
  return std::all_of(z.begin(), z.end(), [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double angle_gap(double a, double b) {
  const double two_pi = 2.0 * std::numbers::pi;
  double d = std::fmod(std::abs(a - b), two_pi);
  return std::min(d, two_pi - d);
}

unsigned worker_count(unsigned requested) {
  // HOLODYN_THREADS caps the count; 0 or unset leaves it alone.
  unsigned cap = 0;
  if (const char* env = std::getenv("HOLODYN_THREADS")) {
    try {
      cap = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      cap = 0;
    }
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return cap > 0 ? std::min(requested, cap) : requested;
}

}  // namespace

PointMap as_point_map(const TruncatedGerm& f) {
  return [f](const Point& z) { return f.evaluate(std::span<const cplx>(z.data(), z.size())); };
}

const char* orbit_status_name(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::Escaped: return "Escaped";
    case OrbitStatus::Attracted: return "Attracted";
    case OrbitStatus::Undecided: return "Undecided";
  }
  return "?";
}

OrbitRecord iterate_orbit(const PointMap& f, const Point& z0, const OrbitParams& params,
                          const std::vector<Point>& targets_in) {
  const std::vector<Point> targets = targets_in.empty() ? std::vector<Point>{Point(z0.size(), 0.0)} : targets_in;
  OrbitRecord rec;
  rec.params = params;
  rec.last = z0;
  if (params.keep_points) rec.points.push_back(z0);
  std::vector<int> streak(targets.size(), 0);
  rec.steps = params.n_max;
  for (int n = 1; n <= params.n_max; ++n) {
    rec.last = f(rec.last);
    if (params.keep_points) rec.points.push_back(rec.last);
    if (!finite(rec.last)) {
      rec.status = OrbitStatus::Escaped;
      rec.overflow = true;
      rec.steps = n;
      return rec;
    }
    if (norm(rec.last) > params.r_escape) {
      rec.status = OrbitStatus::Escaped;
      rec.steps = n;
      return rec;
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      streak[t] = distance(rec.last, targets[t]) < params.r_attract ? streak[t] + 1 : 0;
      if (streak[t] >= params.s_confirm) {
        rec.status = OrbitStatus::Attracted;
        rec.target = t;
        rec.steps = n;
        return rec;
      }
    }
  }
  return rec;
}

LeauFatouEstimate leau_fatou_asymptotics(const ScalarMap& f, cplx z0, int k, int n_max) {
  if (k < 1 || n_max < 2) fail(ErrorKind::InvalidArgument, "need k >= 1 and n_max >= 2");
  const double bound = 10.0 * std::max(std::abs(z0), 1.0);
  const int n_half = n_max / 2;
  cplx z = z0;
  cplx sum = 0.0;
  std::vector<cplx> tail;
  tail.reserve(static_cast<std::size_t>(n_max - n_half + 1));
  for (int n = 1; n <= n_max; ++n) {
    z = f(z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > bound)
      fail(ErrorKind::OrbitEscaped, "orbit escaped at step " + std::to_string(n));
    if (n >= n_half) {
      const cplx v = std::pow(static_cast<double>(n), 1.0 / k) * z;
      tail.push_back(v);
      sum += v;
    }
  }
  LeauFatouEstimate out;
  out.v_last = tail.back();
  out.v_mean = sum / static_cast<double>(tail.size());
  out.direction = std::abs(out.v_mean) > 0.0 ? out.v_mean / std::abs(out.v_mean) : cplx(0.0, 0.0);
  for (cplx v : tail) out.spread = std::max(out.spread, std::abs(v - out.v_mean));
  return out;
}

cplx BasinGrid::center(int ix, int iy) const {
  const double re = window[0] + (ix + 0.5) * (window[1] - window[0]) / nx;
  const double im = window[3] - (iy + 0.5) * (window[3] - window[2]) / ny;
  return {re, im};
}

BasinGrid basin_grid(const PointMap& f, const std::array<double, 4>& window, int nx, int ny, const SliceSpec& slice,
                     OrbitParams params, const std::vector<Point>& targets, unsigned threads) {
  if (nx < 2 || ny < 2) fail(ErrorKind::InvalidArgument, "resolution must be at least 2x2");
  if (slice.axis >= slice.fixed.size()) fail(ErrorKind::InvalidArgument, "slice axis outside the point");
  params.keep_points = false;
  BasinGrid g;
  g.window = window;
  g.nx = nx;
  g.ny = ny;
  g.slice = slice;
  g.params = params;
  const auto cells = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  g.cells.assign(cells, kCodeUndecided);
  g.steps.assign(cells, 0);
  auto run_row = [&](int iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Point z = slice.fixed;
      z[slice.axis] = g.center(ix, iy);
      const OrbitRecord r = iterate_orbit(f, z, params, targets);
      const auto idx = static_cast<std::size_t>(iy * nx + ix);
      g.steps[idx] = r.steps;
      switch (r.status) {
        case OrbitStatus::Escaped: g.cells[idx] = kCodeEscaped; break;
        case OrbitStatus::Undecided: g.cells[idx] = kCodeUndecided; break;
        case OrbitStatus::Attracted:
          g.cells[idx] = r.target == 0 ? kCodeAttracted : static_cast<std::uint8_t>(2 + std::min<std::size_t>(r.target, 253));
          break;
      }
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(ny));
  if (workers <= 1) {
    for (int iy = 0; iy < ny; ++iy) run_row(iy);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int iy = static_cast<int>(w); iy < ny; iy += static_cast<int>(workers)) run_row(iy);
      });
    for (auto& t : pool) t.join();
  }
  return g;
}

std::optional<int> one_resonant_basin_membership(const Point& z, const MultiIndex& alpha, int k, double radius,
                                                 double theta, double beta) {
  if (alpha.dim() != z.size()) fail(ErrorKind::DimensionMismatch, "generator and point differ in dimension");
  if (k < 1 || radius <= 0.0) fail(ErrorKind::InvalidArgument, "need k >= 1 and R > 0");
  if (!(beta > 0.0 && beta < 1.0 / alpha.order())) fail(ErrorKind::InvalidArgument, "need 0 < beta < 1/|alpha|");
  cplx u = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (alpha[i] > 0) u *= std::pow(z[i], alpha[i]);
  if (u == cplx(0.0, 0.0)) return std::nullopt;
  const double cap = std::pow(std::abs(u), beta);
  for (cplx c : z)
    if (!(std::abs(c) < cap)) return std::nullopt;
  const double c = 1.0 / (2.0 * radius);
  if (!(std::abs(std::pow(u, k) - c) < c)) return std::nullopt;
  for (int h = 0; h < k; ++h)
    if (angle_gap(std::arg(u), 2.0 * std::numbers::pi * h / k) < theta) return h;
  return std::nullopt;
}

std::vector<Point> sample_one_resonant_members(const OneResonantRegion& region, int h, std::size_t count,
                                               std::uint64_t seed) {
  const std::size_t d = region.alpha.dim();
  const int m = region.alpha.order();
  if (m < 1) fail(ErrorKind::InvalidArgument, "generator must be nonzero");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double c = 1.0 / (2.0 * region.radius);
  const double k = region.k;
  std::vector<Point> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * (count + 10)) fail(ErrorKind::InvalidArgument, "region too thin to sample");
    // ζ = u^k in the disc |ζ - c| < c with |arg ζ| < kθ.
    const cplx zeta = c + std::polar(c * std::sqrt(uni(rng)), 2.0 * std::numbers::pi * uni(rng));
    if (std::abs(std::arg(zeta)) >= k * region.theta || zeta == cplx(0.0, 0.0)) continue;
    const cplx u = std::pow(zeta, 1.0 / k) * std::polar(1.0, 2.0 * std::numbers::pi * h / k);
    const double log_u = std::log(std::abs(u));
    const double room = (region.beta - 1.0 / m) * log_u;  // > 0
    // z_j = u^{1/m} e^{t_j} with sum α_j t_j = 0 keeps z^α = u.
    std::vector<cplx> t(d, 0.0);
    double aa = 0.0;
    cplx at = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (region.alpha[j] == 0) continue;
      t[j] = cplx(2.0 * uni(rng) - 1.0, 2.0 * std::numbers::pi * uni(rng));
      aa += region.alpha[j] * region.alpha[j];
      at += static_cast<double>(region.alpha[j]) * t[j];
    }
    double max_re = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (region.alpha[j] == 0) continue;
      t[j] -= at * (region.alpha[j] / aa);
      max_re = std::max(max_re, t[j].real());
    }
    const double shrink = max_re > 0.9 * room ? 0.9 * room / max_re : 1.0;
    const cplx base = std::pow(u, 1.0 / m);
    Point z(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (region.alpha[j] == 0)
        z[j] = std::polar(0.9 * std::pow(std::abs(u), region.beta) * uni(rng), 2.0 * std::numbers::pi * uni(rng));
      else
        z[j] = base * std::exp(cplx(shrink * t[j].real(), t[j].imag()));
    }
    // Rounding can push a boundary sample out; membership decides.
    const auto got = one_resonant_basin_membership(z, region.alpha, region.k, region.radius, region.theta, region.beta);
    if (got && *got == h) out.push_back(std::move(z));
  }
  return out;
}

ProbeReport basin_invariance_probe(const PointMap& f, const Membership& member, int n_steps,
                                   const std::vector<Point>& samples) {
  ProbeReport rep;
  for (const Point& s : samples) {
    if (!member(s)) continue;
    ++rep.members;
    Point p = s;
    for (int n = 0; n < n_steps; ++n) {
      p = f(p);
      if (!member(p)) {
        ++rep.violations;
        break;
      }
    }
  }
  return rep;
}

AbelReport abel_residual_probe(const ScalarMap& f, const ScalarMap& psi, const std::vector<cplx>& samples) {
  AbelReport rep;
  for (cplx z : samples) {
    try {
      const cplx a = psi(z);
      const cplx b = psi(f(z));
      rep.max_residual = std::max(rep.max_residual, std::abs(b - a - 1.0));
      ++rep.used;
    } catch (const DomainError&) {
      ++rep.excluded;
    }
  }
  return rep;
}

}  // namespace holodyn
