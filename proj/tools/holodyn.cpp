#include <CLI11.hpp>

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holodyn/error.hpp"
#include "report_json.hpp"

namespace fs = std::filesystem;
using namespace holodyn;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

// Flag values go through the library parsers; their failures are usage errors.
template <class Fn>
auto flag_value(const std::string& flag, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw UsageError(flag + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::vector<cplx> complex_list(const std::string& flag, const std::string& s) {
  return flag_value(flag, [&] {
    std::vector<cplx> out;
    for (const auto& t : split(s, ',')) out.push_back(parse_complex(t));
    return out;
  });
}

std::vector<std::size_t> index_list_flag(const std::string& flag, const std::string& s, std::size_t dim) {
  std::vector<std::size_t> out;
  for (const auto& t : split(s, ',')) {
    const long v = flag_value(flag, [&] { return std::stol(t); });
    if (v < 1 || static_cast<std::size_t>(v) > dim) throw UsageError(flag + ": index " + t + " outside 1.." + std::to_string(dim));
    out.push_back(static_cast<std::size_t>(v - 1));
  }
  return out;
}

// z, w for d <= 2; z1..zd always.
std::size_t coordinate_index(const std::string& flag, const std::string& name, std::size_t dim) {
  if (name == "z" && dim <= 2) return 0;
  if (name == "w" && dim == 2) return 1;
  if (name.size() > 1 && name[0] == 'z') {
    const long v = flag_value(flag, [&] { return std::stol(name.substr(1)); });
    if (v >= 1 && static_cast<std::size_t>(v) <= dim) return static_cast<std::size_t>(v - 1);
  }
  throw UsageError(flag + ": unknown coordinate \"" + name + "\"");
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 14> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char h[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::ParseError, "cannot write " + p.string());
  out << text;
}

struct Run {
  std::vector<std::string> args;  // without the program name
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
};

// ---------------------------------------------------------------- normalize

SlotPredicate read_slots(const fs::path& path, std::size_t dim, Run& run) {
  run.inputs.push_back(path);
  const Json j = read_json(path);
  if (!j.is_array()) fail(ErrorKind::ParseError, path.string() + ": expected an array of slots");
  std::vector<Slot> slots;
  std::vector<MultiIndex> indices;
  for (const auto& e : j) {
    const Json& a = e.is_array() ? e : e.at("alpha");
    MultiIndex alpha(a.get<std::vector<int>>());
    if (alpha.dim() != dim) fail(ErrorKind::DimensionMismatch, path.string() + ": slot of the wrong length");
    if (e.is_object() && e.contains("component")) {
      const int c = e.at("component").get<int>();
      if (c < 1 || static_cast<std::size_t>(c) > dim) fail(ErrorKind::ParseError, path.string() + ": component out of range");
      slots.emplace_back(std::move(alpha), static_cast<std::size_t>(c - 1));
    } else {
      indices.push_back(std::move(alpha));
    }
  }
  SlotPredicate by_slot = slot_list(std::move(slots));
  SlotPredicate by_index = index_list(std::move(indices));
  return [by_slot, by_index](const MultiIndex& a, std::size_t j) { return by_slot(a, j) || by_index(a, j); };
}

struct NormalizeOpts {
  std::string input, mode = "pd", a0, a;
  int order = 0;
};

Json run_normalize(const NormalizeOpts& o, Run& run) {
  run.inputs.push_back(o.input);
  TruncatedGerm f = read_germ(o.input);
  if (o.order > 0) {
    if (o.order > f.trunc())
      fail(ErrorKind::OrderOutOfRange, "--order exceeds the germ truncation " + std::to_string(f.trunc()));
    f = f.restricted(o.order);
  }
  Json out{{"mode", o.mode}};
  if (o.mode == "pd") {
    out.update(cli::normalization_to_json(poincare_dulac(f)));
  } else if (o.mode == "linearize") {
    auto r = linearize_formal(f);
    if (auto* h = std::get_if<TruncatedGerm>(&r)) {
      out["linearizable"] = true;
      out["conjugacy"] = germ_to_json(*h);
    } else {
      const auto& ob = std::get<ResonanceObstruction>(r);
      out["linearizable"] = false;
      out["obstruction"] = Json{{"alpha", ob.alpha.entries()}, {"component", ob.component + 1}};
    }
  } else if (o.mode == "selective") {
    if (o.a0.empty() || o.a.empty()) throw UsageError("--a0 and --a are required with --mode selective");
    const auto a0 = read_slots(o.a0, f.dim(), run);
    const auto a = read_slots(o.a, f.dim(), run);
    out.update(cli::normalization_to_json(selective_eliminate(f, a0, a)));
  } else {
    throw UsageError("--mode: expected pd, linearize or selective");
  }
  return out;
}

// --------------------------------------------------------------- resonances

struct ResonanceOpts {
  std::string input, exact_angles;
  int degree = 6;
};

Json run_resonances(const ResonanceOpts& o, Run& run) {
  run.inputs.push_back(o.input);
  TruncatedGerm f = read_germ(o.input);
  if (!o.exact_angles.empty()) {
    std::vector<std::optional<Angle>> angles;
    for (const auto& t : split(o.exact_angles, ','))
      angles.emplace_back(t == "-" ? std::nullopt : std::optional<Angle>(flag_value("--exact-angles", [&] { return parse_angle(t); })));
    if (angles.size() != f.dim()) throw UsageError("--exact-angles: need one entry per coordinate");
    f = f.with_exact_angles(std::move(angles));
  }
  // Triangular linear parts keep coordinate order so that components in the
  // table name germ coordinates; otherwise the sorted spectrum is used.
  const Eigen::MatrixXcd l = linear_part(f);
  const bool triangular = l.isUpperTriangular(0.0);
  const MultiplierTuple m = triangular ? diagonal_multipliers(f) : multipliers(f);
  Json out = cli::resonance_table_to_json(find_resonances(m, o.degree));
  out["multipliers"] = multipliers_to_json(m);
  out["ordering"] = triangular ? "coordinates" : "spectrum";
  out["classification"] = cli::classifications_to_json(m);
  return out;
}

// ------------------------------------------------------------------- brjuno

struct BrjunoOpts {
  std::string theta, lambda_file, kind, subset, set_file;
  int depth = 30;
  std::uint64_t budget = 50'000'000;
};

Json run_brjuno(const BrjunoOpts& o, Run& run) {
  if (o.theta.empty() == o.lambda_file.empty()) throw UsageError("exactly one of --theta and --lambda-file is required");
  if (o.depth < 1) throw UsageError("--depth must be positive");
  if (!o.theta.empty()) {
    const DoubleDouble theta = flag_value("--theta", [&] { return parse_theta(o.theta); });
    if (!o.kind.empty() && o.kind != "cf" && o.kind != "weak") throw UsageError("--kind: use cf or weak with --theta");
    Json out = cli::brjuno_to_json(brjuno_sum_cf(theta, o.depth, o.kind == "weak"));
    out["continued_fraction"] = cli::continued_fraction_to_json(continued_fraction(theta, o.depth));
    out["theta"] = theta.to_double();
    return out;
  }
  run.inputs.push_back(o.lambda_file);
  const MultiplierTuple lam = multipliers_from_json(read_json(o.lambda_file));
  BrjunoSeriesOptions opt;
  opt.budget = o.budget;
  if (o.kind.empty() || o.kind == "classical") {
    opt.kind = BrjunoKind::Classical;
  } else if (o.kind == "partial") {
    opt.kind = BrjunoKind::Partial;
    if (o.subset.empty()) throw UsageError("--subset is required with --kind partial");
    opt.subset = index_list_flag("--subset", o.subset, lam.dim());
  } else if (o.kind == "reduced") {
    opt.kind = BrjunoKind::Reduced;
  } else if (o.kind == "set") {
    opt.kind = BrjunoKind::SetBased;
    if (o.set_file.empty()) throw UsageError("--set is required with --kind set");
    run.inputs.push_back(o.set_file);
    for (const auto& a : read_json(o.set_file)) opt.set.emplace_back(a.get<std::vector<int>>());
  } else {
    throw UsageError("--kind: use classical, partial, reduced or set with --lambda-file");
  }
  return cli::brjuno_to_json(brjuno_series(lam, o.depth, opt));
}

// ------------------------------------------------------------------- petals

struct PetalOpts {
  std::string input;
  double radius = 5.0, theta = 1.0;
  int sample = 1000, steps = 50, abel_samples = 20, nmax = 100000;
  std::uint64_t seed = 0;
};

Json run_petals(const PetalOpts& o, Run& run) {
  run.inputs.push_back(o.input);
  const TruncatedGerm f = read_germ(o.input);
  if (f.dim() != 1) fail(ErrorKind::DimensionMismatch, "petals needs a 1-D germ");
  const DirectionSet ds = attracting_directions_1d(f);
  const int k = ds.k;
  const cplx mu = std::pow(-1.0 / (static_cast<double>(k) * ds.a), 1.0 / k);
  const TruncatedSeries& s = f.component(0);
  const ScalarMap fz = [&s](cplx z) { return s.evaluate(std::span<const cplx>(&z, 1)); };
  const PointMap g = [&](const Point& p) { return Point{fz(mu * p[0]) / mu}; };
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Json petals = Json::array();
  for (int j = 0; j < k; ++j) {
    const PetalSpec spec{k, j, o.radius, o.theta};
    std::vector<Point> pts;
    for (int i = 0; i < o.sample; ++i) {
      const double rho = std::exp(std::log(1e-2) + uni(rng) * std::log(1e5));
      const cplx w = o.radius + std::polar(rho, (2.0 * uni(rng) - 1.0) * o.theta);
      pts.push_back({std::pow(w, -1.0 / k) * std::polar(1.0, 2.0 * std::numbers::pi * j / k)});
    }
    const auto member = [&spec](const Point& p) { return p[0] != cplx(0.0, 0.0) && petal_membership(p[0], spec); };
    const ProbeReport inv = basin_invariance_probe(g, member, o.steps, pts);
    std::vector<cplx> abel_pts;
    for (int i = 0; i < o.abel_samples && i < static_cast<int>(pts.size()); ++i) abel_pts.push_back(mu * pts[static_cast<std::size_t>(i)][0]);
    const ScalarMap psi = [&](cplx z) { return fatou_coordinate(f, z, o.nmax).value; };
    const AbelReport abel = abel_residual_probe(fz, psi, abel_pts);
    petals.push_back(Json{{"j", j},
                          {"direction", complex_to_json(mu * std::polar(1.0, 2.0 * std::numbers::pi * j / k))},
                          {"members", inv.members},
                          {"invariance_violations", inv.violations},
                          {"abel", Json{{"max_residual", abel.max_residual}, {"used", abel.used}, {"excluded", abel.excluded}}}});
  }
  return Json{{"k", k},
              {"a", complex_to_json(ds.a)},
              {"attracting", cli::vector_to_json(ds.attracting)},
              {"repelling", cli::vector_to_json(ds.repelling)},
              {"R", o.radius},
              {"theta", o.theta},
              {"petals", std::move(petals)}};
}

// ------------------------------------------------------------------ chardir

Json run_chardir(const std::string& input, Run& run) {
  run.inputs.push_back(input);
  return cli::chardir_to_json(characteristic_directions(read_germ(input)));
}

// ------------------------------------------------------------------- blowup

struct BlowupOpts {
  std::string input, center;
  int chart = 0;
};

Json run_blowup(const BlowupOpts& o, Run& run) {
  run.inputs.push_back(o.input);
  const TruncatedGerm f = read_germ(o.input);
  const std::size_t d = f.dim();
  if (o.chart < 1 || static_cast<std::size_t>(o.chart) > d) throw UsageError("--chart: index outside 1.." + std::to_string(d));
  const auto center = index_list_flag("--center", o.center, d);
  const BlowupChart chart =
      flag_value("--chart", [&] { return make_chart(d, center, static_cast<std::size_t>(o.chart - 1)); });
  const NondegeneracyReport nd = nondegeneracy_check(f, chart.splitting);
  Json out{{"center", Json::array()}, {"chart", o.chart}, {"nondegenerate", nd.nondegenerate}};
  for (std::size_t i : chart.splitting) out["center"].push_back(i + 1);
  if (!nd.nondegenerate) {
    out["witness"] = Json{{"component", nd.witness->first + 1}, {"alpha", nd.witness->second.entries()}};
    fail(ErrorKind::DegenerateAlongCenter, "component " + std::to_string(nd.witness->first + 1) + " contains " +
                                               nd.witness->second.to_string());
  }
  const TruncatedGerm lifted = lift_germ(f, chart);
  const MultiplierTuple base = diagonal_multipliers(f);
  out["lifted"] = germ_to_json(lifted);
  out["multipliers"] = Json{{"base", multipliers_to_json(base)}, {"lifted", multipliers_to_json(lifted_multipliers(base, chart))}};
  return out;
}

// -------------------------------------------------------------------- basin

struct BasinOpts {
  std::string input, window = "-1,1,-1,1", res = "256x256", slice, axis, out, csv;
  std::vector<std::string> targets;
  int nmax = 2000, confirm = 3;
  double escape = 100.0, attract = 1e-8;
  unsigned threads = 0;
};

std::uint8_t gray_level(std::uint8_t code) {
  switch (code) {
    case kCodeEscaped: return 0;
    case kCodeAttracted: return 255;
    case kCodeUndecided: return 128;
    default: return static_cast<std::uint8_t>(32 + ((code - 3) * 53) % 96);
  }
}

Json run_basin(const BasinOpts& o, Run& run) {
  run.inputs.push_back(o.input);
  const TruncatedGerm f = read_germ(o.input);
  const std::size_t d = f.dim();
  const auto w = flag_value("--window", [&] {
    std::vector<double> v;
    for (const auto& t : split(o.window, ',')) v.push_back(std::stod(t));
    return v;
  });
  if (w.size() != 4 || !(w[0] < w[1]) || !(w[2] < w[3])) throw UsageError("--window: expected re_min,re_max,im_min,im_max");
  const auto x = o.res.find('x');
  if (x == std::string::npos) throw UsageError("--res: expected NXxNY");
  const int nx = flag_value("--res", [&] { return std::stoi(o.res.substr(0, x)); });
  const int ny = flag_value("--res", [&] { return std::stoi(o.res.substr(x + 1)); });
  if (nx < 2 || ny < 2) throw UsageError("--res: resolution must be at least 2x2");

  SliceSpec slice;
  slice.fixed.assign(d, 0.0);
  std::vector<bool> fixed(d, false);
  for (const auto& item : split(o.slice, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--slice: expected name=value");
    const std::size_t i = coordinate_index("--slice", item.substr(0, eq), d);
    slice.fixed[i] = flag_value("--slice", [&] { return parse_complex(item.substr(eq + 1)); });
    fixed[i] = true;
  }
  if (!o.axis.empty()) {
    slice.axis = coordinate_index("--axis", o.axis, d);
    if (fixed[slice.axis]) throw UsageError("--axis: coordinate is also fixed by --slice");
  } else {
    slice.axis = d;
    for (std::size_t i = 0; i < d && slice.axis == d; ++i)
      if (!fixed[i]) slice.axis = i;
    if (slice.axis == d) throw UsageError("--slice: every coordinate is fixed");
  }
  std::vector<Point> targets;
  for (const auto& t : o.targets) {
    auto p = complex_list("--target", t);
    if (p.size() != d) throw UsageError("--target: need " + std::to_string(d) + " coordinates");
    targets.push_back(std::move(p));
  }
  if (!targets.empty()) targets.insert(targets.begin(), Point(d, 0.0));

  OrbitParams params;
  params.n_max = o.nmax;
  params.r_escape = o.escape;
  params.r_attract = o.attract;
  params.s_confirm = o.confirm;
  const BasinGrid g = basin_grid(as_point_map(f), {w[0], w[1], w[2], w[3]}, nx, ny, slice, params, targets, o.threads);

  std::map<int, std::size_t> counts;
  for (auto c : g.cells) ++counts[c];
  Json counts_json = Json::object();
  for (const auto& [c, n] : counts) counts_json[std::to_string(c)] = n;

  if (!o.out.empty()) {
    std::string pgm = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
    for (auto c : g.cells) pgm.push_back(static_cast<char>(gray_level(c)));
    write_text(o.out, pgm);
    run.outputs.push_back(o.out);
  }
  if (!o.csv.empty()) {
    std::string csv = "re,im,code,steps\n";
    char line[128];
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const cplx c = g.center(ix, iy);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%d,%d\n", c.real(), c.imag(), g.code(ix, iy),
                      g.steps[static_cast<std::size_t>(iy * nx + ix)]);
        csv += line;
      }
    write_text(o.csv, csv);
    run.outputs.push_back(o.csv);
  }
  return Json{{"nx", nx},
              {"ny", ny},
              {"window", w},
              {"axis", slice.axis + 1},
              {"slice", cli::vector_to_json(slice.fixed)},
              {"counts", std::move(counts_json)},
              {"params", Json{{"n_max", o.nmax}, {"r_escape", o.escape}, {"r_attract", o.attract}, {"s_confirm", o.confirm}}}};
}

// -------------------------------------------------------------------- orbit

struct OrbitOpts {
  std::string input, z0;
  int nmax = 1000, confirm = 3;
  double escape = 100.0, attract = 1e-8;
  bool points = false;
};

Json run_orbit(const OrbitOpts& o, Run& run) {
  run.inputs.push_back(o.input);
  const TruncatedGerm f = read_germ(o.input);
  const auto z0 = complex_list("--z0", o.z0);
  if (z0.size() != f.dim()) throw UsageError("--z0: need " + std::to_string(f.dim()) + " coordinates");
  OrbitParams p;
  p.n_max = o.nmax;
  p.r_escape = o.escape;
  p.r_attract = o.attract;
  p.s_confirm = o.confirm;
  p.keep_points = o.points;
  return cli::orbit_to_json(iterate_orbit(as_point_map(f), z0, p), o.points);
}

// ----------------------------------------------------------------- dispatch

Json manifest_for(const CLI::App* sub, const Run& run, double seconds) {
  Json params = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
    const auto& res = opt->results();
    std::string value;
    if (!res.empty()) {
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? ";" : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_type_size() == 0 && value.empty()) value = "false";
    params[opt->get_name()] = value;
  }
  Json hashes = Json::object();
  for (const auto& p : run.inputs) hashes[p.string()] = sha256_file(p);
  Json outputs = Json::array();
  for (const auto& p : run.outputs) outputs.push_back(p.string());
  return Json{{"subcommand", sub->get_name()},
              {"argv", run.args},
              {"parameters", std::move(params)},
              {"input_hashes", std::move(hashes)},
              {"outputs", std::move(outputs)},
              {"tool_version", HOLODYN_VERSION},
              {"wall_time_seconds", seconds}};
}

int dispatch(const std::vector<std::string>& args);

int dispatch_checked(const std::vector<std::string>& args) {
  CLI::App app{"Local holomorphic dynamics near fixed points: normal forms, small divisors, parabolic and blow-up tools"};
  app.set_version_flag("--version", HOLODYN_VERSION);
  app.require_subcommand(1);
  std::string manifest;
  app.add_option("--manifest", manifest, "Write a run manifest to this path");

  NormalizeOpts no;
  auto* normalize = app.add_subcommand("normalize", "Poincare-Dulac, formal linearization or selective elimination");
  normalize->add_option("--input", no.input, "Germ JSON")->required();
  normalize->add_option("--order", no.order, "Work with the truncation at this order (default: the germ's)");
  normalize->add_option("--mode", no.mode, "pd | linearize | selective")->capture_default_str();
  normalize->add_option("--a0", no.a0, "Slot file for A0 (selective)");
  normalize->add_option("--a", no.a, "Slot file for A (selective)");

  ResonanceOpts ro;
  auto* resonances = app.add_subcommand("resonances", "Resonance table of the linear part");
  resonances->add_option("--input", ro.input, "Germ JSON")->required();
  resonances->add_option("--degree", ro.degree, "Degree bound")->capture_default_str();
  resonances->add_option("--exact-angles", ro.exact_angles, "p1/q1,p2/q2,... ('-' for none) overriding the germ's");

  BrjunoOpts bo;
  auto* brjuno = app.add_subcommand("brjuno", "Brjuno sums from a rotation number or a multiplier tuple");
  brjuno->add_option("--theta", bo.theta, "Rotation number, decimal or p/q");
  brjuno->add_option("--lambda-file", bo.lambda_file, "Multiplier JSON");
  brjuno->add_option("--depth", bo.depth, "Continued-fraction depth or number of dyadic levels")->capture_default_str();
  brjuno->add_option("--kind", bo.kind, "cf | weak (with --theta, default cf); classical | partial | reduced | set (with --lambda-file, default classical)");
  brjuno->add_option("--subset", bo.subset, "Components S for --kind partial, 1-based");
  brjuno->add_option("--set", bo.set_file, "JSON list of multi-indices for --kind set");
  brjuno->add_option("--budget", bo.budget, "Cap on scanned (alpha, j) pairs")->capture_default_str();

  PetalOpts po;
  auto* petals = app.add_subcommand("petals", "Attracting directions, petal invariance and Abel residuals of a 1-D germ");
  petals->add_option("--input", po.input, "1-D germ JSON")->required();
  petals->add_option("--R", po.radius, "Petal radius R")->capture_default_str();
  petals->add_option("--theta", po.theta, "Petal aperture")->capture_default_str();
  petals->add_option("--sample", po.sample, "Sample points per petal")->capture_default_str();
  petals->add_option("--steps", po.steps, "Forward steps in the invariance probe")->capture_default_str();
  petals->add_option("--abel-samples", po.abel_samples, "Points per petal for the Abel residual")->capture_default_str();
  petals->add_option("--nmax", po.nmax, "Orbit length for Fatou coordinates")->capture_default_str();
  petals->add_option("--seed", po.seed, "Sampling seed")->capture_default_str();

  std::string chardir_input;
  auto* chardir = app.add_subcommand("chardir", "Characteristic directions and directors (d = 2)");
  chardir->add_option("--input", chardir_input, "Germ JSON")->required();

  BlowupOpts bl;
  auto* blowup = app.add_subcommand("blowup", "Lift a germ to a blow-up chart");
  blowup->add_option("--input", bl.input, "Germ JSON")->required();
  blowup->add_option("--center", bl.center, "Splitting I, 1-based, comma separated (empty: the origin)");
  blowup->add_option("--chart", bl.chart, "Chart index j, 1-based")->required();

  BasinOpts ba;
  auto* basin = app.add_subcommand("basin", "Escape/attraction grid on a complex line");
  basin->add_option("--input", ba.input, "Germ JSON")->required();
  basin->add_option("--window", ba.window, "re_min,re_max,im_min,im_max")->capture_default_str();
  basin->add_option("--res", ba.res, "NXxNY")->capture_default_str();
  basin->add_option("--slice", ba.slice, "Fixed coordinates, e.g. w=0.01 or z2=0.1+0.2i");
  basin->add_option("--axis", ba.axis, "Sampled coordinate (default: first one not fixed)");
  basin->add_option("--target", ba.targets, "Extra attracting point, comma separated coordinates");
  basin->add_option("--nmax", ba.nmax, "Maximum orbit length")->capture_default_str();
  basin->add_option("--escape", ba.escape, "Escape radius")->capture_default_str();
  basin->add_option("--attract", ba.attract, "Attraction radius")->capture_default_str();
  basin->add_option("--confirm", ba.confirm, "Consecutive steps inside the attraction radius")->capture_default_str();
  basin->add_option("--out", ba.out, "PGM output");
  basin->add_option("--csv", ba.csv, "CSV output re,im,code,steps");
  basin->add_option("--threads", ba.threads, "Worker threads (0: all cores; HOLODYN_THREADS caps the count)")->capture_default_str();

  OrbitOpts oo;
  auto* orbit = app.add_subcommand("orbit", "Iterate one orbit and classify it");
  orbit->add_option("--input", oo.input, "Germ JSON")->required();
  orbit->add_option("--z0", oo.z0, "Start point, comma separated coordinates")->required();
  orbit->add_option("--nmax", oo.nmax, "Maximum orbit length")->capture_default_str();
  orbit->add_option("--escape", oo.escape, "Escape radius")->capture_default_str();
  orbit->add_option("--attract", oo.attract, "Attraction radius")->capture_default_str();
  orbit->add_option("--confirm", oo.confirm, "Consecutive steps inside the attraction radius")->capture_default_str();
  orbit->add_flag("--points", oo.points, "Include every iterate in the output");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "Manifest JSON")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (replay->parsed()) {
    const Json m = read_json(replay_path);
    if (!m.contains("argv") || !m.at("argv").is_array()) fail(ErrorKind::ParseError, "manifest has no argv");
    return dispatch(m.at("argv").get<std::vector<std::string>>());
  }

  Run run{args, {}, {}};
  const auto t0 = std::chrono::steady_clock::now();
  Json result;
  CLI::App* sub = app.get_subcommands().front();
  if (normalize->parsed()) result = run_normalize(no, run);
  else if (resonances->parsed()) result = run_resonances(ro, run);
  else if (brjuno->parsed()) result = run_brjuno(bo, run);
  else if (petals->parsed()) result = run_petals(po, run);
  else if (chardir->parsed()) result = run_chardir(chardir_input, run);
  else if (blowup->parsed()) result = run_blowup(bl, run);
  else if (basin->parsed()) result = run_basin(ba, run);
  else if (orbit->parsed()) result = run_orbit(oo, run);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << canonical_dump(result);

  const Json m = manifest_for(sub, run, seconds);
  if (!manifest.empty()) write_text(manifest, canonical_dump(m));
  for (const auto& p : run.outputs) write_text(p.string() + ".manifest.json", canonical_dump(m));
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  try {
    return dispatch_checked(args);
  } catch (const UsageError& e) {
    std::cerr << "holodyn: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << Json{{"error", std::string(error_kind_name(e.kind()))}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return dispatch(std::vector<std::string>(argv + 1, argv + argc)); }
