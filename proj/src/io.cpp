#include "holodyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "holodyn/error.hpp"

namespace holodyn {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { fail(ErrorKind::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) parse_fail(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep floats recognizable as floats after a round trip.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool is_scalar_array(const Json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void dump(const Json& j, std::ostringstream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(k).dump() << ": ";
        dump(v, out, indent + 2);
      }
      out << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      if (is_scalar_array(j)) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          dump(j[i], out, indent);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        dump(j[i], out, indent + 2);
      }
      out << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float: out << format_double(j.get<double>()); return;
    default: out << j.dump(); return;
  }
}

}  // namespace

Json complex_to_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {number(field(j, "re"), "re"), number(field(j, "im"), "im")};
}

Json germ_to_json(const TruncatedGerm& f) {
  Json comps = Json::array();
  for (const auto& c : f.components()) {
    Json terms = Json::array();
    for (const auto& [alpha, v] : c.terms())
      terms.push_back(Json{{"alpha", alpha.entries()}, {"re", v.real()}, {"im", v.imag()}});
    comps.push_back(std::move(terms));
  }
  Json out{{"dim", f.dim()}, {"trunc", f.trunc()}, {"components", std::move(comps)}};
  if (const auto& angles = f.exact_angles()) {
    Json a = Json::array();
    for (const auto& x : *angles) a.push_back(x ? Json{x->p, x->q} : Json(nullptr));
    out["exact_angles"] = std::move(a);
  }
  return out;
}

TruncatedGerm germ_from_json(const Json& j) {
  const std::int64_t dim = integer(field(j, "dim"), "dim");
  const std::int64_t trunc = integer(field(j, "trunc"), "trunc");
  if (dim < 1) parse_fail("dim must be positive");
  if (trunc < 1) fail(ErrorKind::OrderOutOfRange, "trunc must be at least 1");
  const Json& comps = field(j, "components");
  if (!comps.is_array() || comps.size() != static_cast<std::size_t>(dim))
    parse_fail("components must be an array of length dim");
  std::vector<GermTerm> terms;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (!comps[i].is_array()) parse_fail("each component must be an array of terms");
    for (const auto& t : comps[i]) {
      const Json& a = field(t, "alpha");
      if (!a.is_array()) parse_fail("alpha must be an array");
      std::vector<int> e;
      for (const auto& x : a) {
        const std::int64_t v = integer(x, "alpha entry");
        if (v < 0) parse_fail("alpha entries must be non-negative");
        e.push_back(static_cast<int>(v));
      }
      if (e.size() != static_cast<std::size_t>(dim))
        fail(ErrorKind::DimensionMismatch, "alpha of length " + std::to_string(e.size()) + " in a germ of dim " + std::to_string(dim));
      const double re = t.contains("re") ? number(t.at("re"), "re") : 0.0;
      const double im = t.contains("im") ? number(t.at("im"), "im") : 0.0;
      terms.push_back({i, MultiIndex(std::move(e)), cplx(re, im)});
    }
  }
  TruncatedGerm f = make_germ(static_cast<std::size_t>(dim), static_cast<int>(trunc), terms);
  if (j.contains("exact_angles") && !j.at("exact_angles").is_null()) {
    const Json& a = j.at("exact_angles");
    if (!a.is_array() || a.size() != static_cast<std::size_t>(dim)) parse_fail("exact_angles must have length dim");
    std::vector<std::optional<Angle>> angles;
    for (const auto& x : a) {
      if (x.is_null()) {
        angles.emplace_back();
      } else if (x.is_string()) {
        angles.emplace_back(parse_angle(x.get<std::string>()));
      } else if (x.is_array() && x.size() == 2) {
        angles.emplace_back(Angle{integer(x[0], "angle p"), integer(x[1], "angle q")});
      } else {
        parse_fail("exact angle must be null, \"p/q\" or [p, q]");
      }
    }
    f = f.with_exact_angles(std::move(angles));
  }
  return f;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

TruncatedGerm read_germ(const std::filesystem::path& path) { return germ_from_json(read_json(path)); }

Json multipliers_to_json(const MultiplierTuple& m) {
  Json vals = Json::array();
  for (cplx v : m.values) vals.push_back(complex_to_json(v));
  Json angles = Json::array();
  for (const auto& a : m.exact_angles) angles.push_back(a ? Json{a->p, a->q} : Json(nullptr));
  return Json{{"values", std::move(vals)}, {"exact_angles", std::move(angles)}, {"defective", m.defective}};
}

MultiplierTuple multipliers_from_json(const Json& j) {
  MultiplierTuple m;
  const Json& vals = field(j, "values");
  if (!vals.is_array() || vals.empty()) parse_fail("values must be a non-empty array");
  for (const auto& v : vals) m.values.push_back(complex_from_json(v));
  m.exact_angles.assign(m.values.size(), std::nullopt);
  if (j.contains("exact_angles")) {
    const Json& a = j.at("exact_angles");
    if (!a.is_array() || a.size() != m.values.size()) parse_fail("exact_angles must match values");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].is_null()) continue;
      if (a[i].is_string())
        m.exact_angles[i] = parse_angle(a[i].get<std::string>());
      else if (a[i].is_array() && a[i].size() == 2)
        m.exact_angles[i] = Angle{integer(a[i][0], "angle p"), integer(a[i][1], "angle q")};
      else
        parse_fail("exact angle must be null, \"p/q\" or [p, q]");
    }
  }
  return m;
}

std::string canonical_dump(const Json& j) {
  std::ostringstream out;
  dump(j, out, 0);
  out << "\n";
  return out.str();
}

Angle parse_angle(std::string_view s) {
  const std::string str(s);
  const auto slash = str.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long p = std::stoll(str, &used);
      if (used != str.size()) parse_fail("bad angle \"" + str + "\"");
      return Angle{p, 1};
    }
    const std::string ps = str.substr(0, slash), qs = str.substr(slash + 1);
    const long long p = std::stoll(ps, &used);
    if (used != ps.size()) parse_fail("bad angle \"" + str + "\"");
    const long long q = std::stoll(qs, &used);
    if (used != qs.size() || q <= 0) parse_fail("bad angle \"" + str + "\"");
    return Angle{p, q};
  } catch (const std::logic_error&) {
    parse_fail("bad angle \"" + str + "\"");
  }
}

cplx parse_complex(std::string_view sv) {
  std::string s;
  for (char c : sv)
    if (c != ' ') s += c;
  if (s.empty()) parse_fail("empty complex number");
  auto to_double = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) parse_fail("bad complex number \"" + s + "\"");
    return v;
  };
  if (s.back() != 'i' && s.back() != 'j') return {to_double(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  if (cut == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, cut)), to_double(body.substr(cut))};
}

DoubleDouble parse_theta(std::string_view sv) {
  const std::string s(sv);
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const Angle a = parse_angle(s);
    return DoubleDouble(static_cast<double>(a.p)) / DoubleDouble(static_cast<double>(a.q));
  }
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) parse_fail("bad angle value \"" + s + "\"");
  const double hi = static_cast<double>(v);
  return DoubleDouble(hi, static_cast<double>(v - static_cast<long double>(hi)));
}

}  // namespace holodyn
