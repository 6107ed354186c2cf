#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "holodyn/mvps.hpp"

namespace holodyn {

using Point = std::vector<cplx>;
using PointMap = std::function<Point(const Point&)>;
using ScalarMap = std::function<cplx(cplx)>;

PointMap as_point_map(const TruncatedGerm& f);

struct OrbitParams {
  int n_max = 1000;
  double r_escape = 100.0;
  double r_attract = 1e-8;
  int s_confirm = 3;
  bool keep_points = true;
};

enum class OrbitStatus { Escaped, Attracted, Undecided };
const char* orbit_status_name(OrbitStatus s);

struct OrbitRecord {
  std::vector<Point> points;  // z0 first; empty when keep_points is off
  Point last;
  OrbitStatus status = OrbitStatus::Undecided;
  int steps = 0;              // n at which the status resolved, else n_max
  std::size_t target = 0;     // index into the target list when Attracted
  bool overflow = false;      // non-finite iterate, reported as Escaped
  OrbitParams params;
};

// Targets default to the origin.
OrbitRecord iterate_orbit(const PointMap& f, const Point& z0, const OrbitParams& params,
                          const std::vector<Point>& targets = {});

struct LeauFatouEstimate {
  cplx v_last;        // n^{1/k} z_n at n = n_max
  cplx v_mean;        // mean over n in [n_max/2, n_max]
  cplx direction;     // v_mean / |v_mean|
  double spread = 0;  // max |n^{1/k} z_n - v_mean| over the tail
};

LeauFatouEstimate leau_fatou_asymptotics(const ScalarMap& f, cplx z0, int k, int n_max);

// One sampled complex coordinate; the others are held at `fixed`.
struct SliceSpec {
  std::size_t axis = 0;
  Point fixed{cplx(0.0, 0.0)};  // full point, entry `axis` ignored
};

// Codes: 0 escaped, 1 attracted to targets[0], 2 undecided, 2 + t for targets[t], t >= 1.
inline constexpr std::uint8_t kCodeEscaped = 0;
inline constexpr std::uint8_t kCodeAttracted = 1;
inline constexpr std::uint8_t kCodeUndecided = 2;

struct BasinGrid {
  std::array<double, 4> window{};  // re_min, re_max, im_min, im_max
  int nx = 0;
  int ny = 0;
  SliceSpec slice;
  OrbitParams params;
  std::vector<std::uint8_t> cells;  // row-major, row 0 at im_max
  std::vector<int> steps;

  std::uint8_t code(int ix, int iy) const { return cells[static_cast<std::size_t>(iy * nx + ix)]; }
  cplx center(int ix, int iy) const;
};

// threads = 0 means hardware concurrency; HOLODYN_THREADS > 0 caps the count.
BasinGrid basin_grid(const PointMap& f, const std::array<double, 4>& window, int nx, int ny, const SliceSpec& slice,
                     OrbitParams params, const std::vector<Point>& targets = {}, unsigned threads = 0);

// Sector index h with z in W(β) and z^α in S_h(R, θ).
std::optional<int> one_resonant_basin_membership(const Point& z, const MultiIndex& alpha, int k, double radius,
                                                 double theta, double beta);

struct OneResonantRegion {
  MultiIndex alpha;
  int k = 1;
  double radius = 10.0;
  double theta = 0.5;
  double beta = 0.4;
};

// Uniform-ish samples of B_h; deterministic in the seed.
std::vector<Point> sample_one_resonant_members(const OneResonantRegion& region, int h, std::size_t count,
                                               std::uint64_t seed);

using Membership = std::function<bool(const Point&)>;

struct ProbeReport {
  std::size_t members = 0;     // samples that passed the membership test
  std::size_t violations = 0;  // members whose orbit left the set within n_steps
};

ProbeReport basin_invariance_probe(const PointMap& f, const Membership& member, int n_steps,
                                   const std::vector<Point>& samples);

struct AbelReport {
  double max_residual = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // psi raised a domain error at z or f(z)
};

AbelReport abel_residual_probe(const ScalarMap& f, const ScalarMap& psi, const std::vector<cplx>& samples);

}  // namespace holodyn
