#include "report_json.hpp"

namespace holodyn::cli {

Json vector_to_json(const std::vector<cplx>& v) {
  Json out = Json::array();
  for (cplx c : v) out.push_back(complex_to_json(c));
  return out;
}

Json slots_to_json(const std::vector<Slot>& slots) {
  Json out = Json::array();
  for (const auto& [alpha, j] : slots) out.push_back(Json{{"alpha", alpha.entries()}, {"component", j + 1}});
  return out;
}

Json normalization_to_json(const NormalizationResult& r) {
  return Json{{"normal_form", germ_to_json(r.normal_form)},
              {"conjugacy", germ_to_json(r.conjugacy)},
              {"residual", r.residual},
              {"resonant_support", slots_to_json(r.resonant_support)}};
}

Json resonance_table_to_json(const ResonanceTable& t) {
  auto indices = [](const std::vector<MultiIndex>& v) {
    Json out = Json::array();
    for (const auto& a : v) out.push_back(a.entries());
    return out;
  };
  Json entries = Json::array();
  for (const auto& e : t.entries) {
    Json x{{"alpha", e.alpha.entries()}, {"component", e.component + 1}, {"kind", resonance_kind_name(e.kind)}};
    if (e.witness) x["witness"] = Json{{"generator", e.witness->first.entries()}, {"singular", e.witness->second.entries()}};
    entries.push_back(std::move(x));
  }
  return Json{{"degree_bound", t.degree_bound},
              {"entries", std::move(entries)},
              {"generators", indices(t.generators)},
              {"minimal", indices(t.minimal)},
              {"cominimal", indices(t.cominimal)},
              {"decomposition_complete", t.decomposition_complete}};
}

Json classifications_to_json(const MultiplierTuple& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const auto c = classify_multiplier(m.values[i], i < m.exact_angles.size() ? m.exact_angles[i] : std::nullopt);
    Json x{{"class", multiplier_class_name(c.kind)}};
    if (c.kind == MultiplierClass::Parabolic) x["q"] = c.q;
    out.push_back(std::move(x));
  }
  return out;
}

Json brjuno_to_json(const BrjunoReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.per_level) levels.push_back(Json{{"level", l.level}, {"omega", l.omega}, {"term", l.term}});
  return Json{{"kind", brjuno_kind_name(r.kind)},
              {"depth", r.depth},
              {"per_level", std::move(levels)},
              {"partial_sum", r.partial_sum},
              {"verdict", verdict_name(r.verdict)},
              {"rational", r.rational},
              {"zero_divisor", r.zero_divisor},
              {"truncated", r.truncated},
              {"precision_exhausted", r.precision_exhausted}};
}

Json continued_fraction_to_json(const ContinuedFraction& cf) {
  Json conv = Json::array();
  for (const auto& c : cf.convergents) conv.push_back(Json{c.p, c.q});
  return Json{{"partial_quotients", cf.partial_quotients},
              {"convergents", std::move(conv)},
              {"rational", cf.rational},
              {"precision_exhausted", cf.precision_exhausted}};
}

Json chardir_to_json(const CharacteristicReport& r) {
  Json dirs = Json::array();
  for (const auto& d : r.directions) {
    dirs.push_back(Json{{"v", vector_to_json(std::vector<cplx>(d.v.data(), d.v.data() + d.v.size()))},
                        {"gamma", complex_to_json(d.gamma)},
                        {"degenerate", d.degenerate},
                        {"multiplicity", d.multiplicity},
                        {"directors", vector_to_json(d.directors)},
                        {"attracting", d.attracting}});
  }
  return Json{{"k", r.k}, {"dicritical", r.dicritical}, {"directions", std::move(dirs)}};
}

Json orbit_to_json(const OrbitRecord& r, bool with_points) {
  Json out{{"status", orbit_status_name(r.status)},
           {"steps", r.steps},
           {"overflow", r.overflow},
           {"last", vector_to_json(r.last)},
           {"params", Json{{"n_max", r.params.n_max},
                           {"r_escape", r.params.r_escape},
                           {"r_attract", r.params.r_attract},
                           {"s_confirm", r.params.s_confirm}}}};
  if (r.status == OrbitStatus::Attracted) out["target"] = r.target + 1;
  if (with_points) {
    Json pts = Json::array();
    for (const auto& p : r.points) pts.push_back(vector_to_json(p));
    out["points"] = std::move(pts);
  }
  return out;
}

}  // namespace holodyn::cli
