#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bandbraid/braid_algebra.hpp"
#include "bandbraid/pipeline.hpp"

namespace bandbraid {

using json = nlohmann::json;

namespace detail {

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx from_cjson(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::LambdaDominant: return "lambda_dominant";
    case Regime::MuDominant: return "mu_dominant";
    case Regime::NotApplicable: return "not_applicable";
  }
  return "?";
}

inline json alexander_json(const LaurentPolynomial& p) {
  json coeffs = json::object();
  for (const auto& [e, c] : p.coefficients()) coeffs[std::to_string(e)] = c;
  return coeffs;
}

inline LaurentPolynomial alexander_from_json(const json& j) {
  LaurentPolynomial p;
  for (const auto& [key, value] : j.items()) p.add(std::stoi(key), value.get<std::int64_t>());
  return p;
}

}  // namespace detail

/// Report as JSON; keys are sorted, so equal reports serialize to identical bytes.
inline json to_json(const RunReport& r) {
  using detail::cjson;
  json j;
  const auto& c = r.config;
  json h = json::array();
  for (const auto& m : c.h) h.push_back({{"coeff", cjson(m.coeff)}, {"deg_w", m.deg_w}, {"deg_conj", m.deg_conj}});
  j["input"] = {{"n", c.n},       {"r0", c.r0},       {"h", h},           {"lambda", cjson(c.lambda)},
                {"mu", cjson(c.mu)}, {"gamma", cjson(c.gamma)}, {"seed", c.seed}, {"config_text", serialize_config(c)}};
  j["status"] = {{"exit_code", r.exit_code}, {"stage", r.stage}, {"error", r.error}};
  j["gamma"] = {{"used", cjson(r.gamma_used)}, {"attempts", r.gamma_attempts}};

  json dps = json::array();
  for (const auto& dp : r.double_points)
    dps.push_back({{"w1", cjson(dp.w1)},
                   {"w2", cjson(dp.w2)},
                   {"k", dp.pairing.k},
                   {"image", json::array({dp.image.z1.real(), dp.image.z1.imag(), dp.image.z2.real(),
                                          dp.image.z2.imag()})},
                   {"base_image", cjson(dp.image.z1)},
                   {"sign", dp.sign},
                   {"residual", dp.residual},
                   {"margin", dp.transversality_margin}});
  j["double_points"] = dps;
  if (r.genericity) {
    const auto& g = *r.genericity;
    auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["genericity"] = {{"passed", g.passed()},
                       {"transverse", g.transverse},
                       {"distinct_images", g.distinct_images},
                       {"avoids_triple_coincidences", g.avoids_triple_coincidences},
                       {"min_margin", finite(g.min_margin)},
                       {"min_image_separation", finite(g.min_image_separation)},
                       {"min_triple_distance", finite(g.min_triple_distance)},
                       {"failures", g.failures}};
  } else {
    j["genericity"] = nullptr;
  }
  json triples = json::array();
  for (const auto& t : r.triples) triples.push_back({{"z", cjson(t.image_z)}, {"w", cjson(t.w)}, {"k", t.k}, {"l", t.l}});
  j["triple_coincidences"] = triples;

  if (r.loop) {
    const auto& L = *r.loop;
    json detours = json::array();
    for (const auto& d : L.detours)
      detours.push_back({{"center", cjson(d.center)},
                         {"radius", d.radius},
                         {"tube_half_width", d.tube_half_width},
                         {"junction_angle", d.junction_angle},
                         {"mouth_angle", d.mouth_angle},
                         {"double_point", d.double_point}});
    json segs = json::array();
    for (const auto& s : L.segments) {
      json sj = {{"kind", to_string(s.kind)}, {"from", cjson(s.from)}, {"to", cjson(s.to)}, {"detour", s.detour}};
      if (s.is_arc) {
        sj["center"] = cjson(s.center);
        sj["radius"] = s.radius;
        sj["start_angle"] = s.start_angle;
        sj["sweep"] = s.sweep;
      }
      segs.push_back(sj);
    }
    j["loop"] = {{"rho", L.rho},
                 {"base_point", cjson(L.base_point)},
                 {"rho_attempts", r.rho_attempts},
                 {"failures", r.loop_failures},
                 {"detours", detours},
                 {"segments", segs}};
    if (r.loop_report)
      j["loop"]["validation"] = {{"passed", r.loop_report->passed()},
                                 {"hits", r.loop_report->transversal_hits.size()},
                                 {"failures", r.loop_report->failures}};
  } else {
    j["loop"] = nullptr;
  }

  if (r.traced) {
    const auto& t = *r.traced;
    json events = json::array();
    for (const auto& e : t.events)
      events.push_back({{"theta", e.theta_star},
                        {"k", e.k},
                        {"sign", e.sign},
                        {"provenance", to_string(e.provenance)},
                        {"detour", e.detour},
                        {"outbound", e.outbound},
                        {"im_gap", e.im_gap},
                        {"slope_gap", e.slope_gap}});
    j["braid"] = {{"strand_count", t.strand_count},
                  {"word", t.word.to_string()},
                  {"canonical_word", canonical_cyclic_form(t.word).to_string()},
                  {"events", events},
                  {"permutation", t.permutation},
                  {"fiber_permutation", t.fiber_permutation}};
  } else {
    j["braid"] = nullptr;
  }
  j["regime"] = detail::regime_name(r.regime);

  if (r.match) {
    const auto& rep = r.match->representation;
    json bands = json::array();
    for (const auto& b : rep.bands)
      bands.push_back({{"conjugator", b.conjugator.to_string()}, {"k", b.k}, {"epsilon", b.epsilon}});
    j["band_representation"] = {{"even_block", rep.even_block.to_string()},
                                {"odd_block", rep.odd_block.to_string()},
                                {"bands", bands},
                                {"expansion", r.match->expansion.to_string()}};
  } else {
    j["band_representation"] = nullptr;
  }

  if (r.invariants) {
    const auto& inv = *r.invariants;
    json ij = {{"exponent_sum", inv.exponent_sum}, {"components", inv.components}};
    ij["alexander"] = inv.alexander ? detail::alexander_json(*inv.alexander) : json(nullptr);
    ij["alexander_text"] = inv.alexander ? json(inv.alexander->to_string() + " (up to units)") : json(nullptr);
    if (inv.band_surface) {
      ij["euler_characteristic"] = inv.band_surface->euler_characteristic;
      ij["genus"] = inv.band_surface->genus
                        ? json::array({inv.band_surface->genus->num, inv.band_surface->genus->den})
                        : json(nullptr);
    } else {
      ij["euler_characteristic"] = nullptr;
      ij["genus"] = nullptr;
    }
    j["invariants"] = ij;
  } else {
    j["invariants"] = nullptr;
  }

  json checks = json::array();
  for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  j["checks"] = checks;
  return j;
}

inline std::string report_text(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

/**
 * Recomputes the invariant suite from a stored report: word permutation and
 * monodromy, exponent sum and writhe identity, Alexander polynomial and its
 * symmetry, and the band expansion against the word.
 */
inline std::vector<CheckResult> verify_report(const json& j) {
  std::vector<CheckResult> out;
  if (!j.contains("braid") || j["braid"].is_null()) throw MissingData("report has no traced braid");
  const auto& b = j["braid"];
  const int n = b.at("strand_count").get<int>();
  const BraidWord word = BraidWord::parse(b.at("word").get<std::string>(), n);

  const auto perm = permutation(word);
  const auto stored = b.at("permutation").get<std::vector<int>>();
  const auto fiber = b.at("fiber_permutation").get<std::vector<int>>();
  out.push_back({"permutation", perm == stored, "word permutation matches the stored one"});
  out.push_back({"monodromy", perm == fiber && cycle_count(perm) == 1, "fiber permutation is the word's N-cycle"});

  const auto& inv = j.at("invariants");
  const int es = exponent_sum(word);
  out.push_back({"exponent_sum", inv.at("exponent_sum").get<int>() == es, "stored exponent sum " +
                                                                               inv.at("exponent_sum").dump() +
                                                                               ", recomputed " + std::to_string(es)});
  out.push_back({"components", inv.at("components").get<int>() == closure_components(word), "closure components"});

  const std::string regime = j.at("regime").get<std::string>();
  if (regime != "not_applicable") {
    const int s = regime == "lambda_dominant" ? 1 : -1;
    int eps = 0;
    for (const auto& dp : j.at("double_points")) eps += dp.at("sign").get<int>();
    out.push_back({"writhe_identity", es == s * (n - 1) + 2 * eps,
                   "exponent sum " + std::to_string(es) + " vs " + std::to_string(s * (n - 1) + 2 * eps)});
  }

  if (closure_components(word) == 1) {
    const LaurentPolynomial delta = alexander_of_closure(word);
    const bool stored_ok = !inv.at("alexander").is_null() && detail::alexander_from_json(inv.at("alexander")) == delta;
    out.push_back({"alexander", stored_ok, "recomputed " + delta.to_string()});
    out.push_back({"alexander_symmetric", delta.is_symmetric(), "Delta(t) = Delta(1/t)"});
  }

  if (j.contains("band_representation") && !j["band_representation"].is_null()) {
    const auto& br = j["band_representation"];
    const BraidWord expansion = BraidWord::parse(br.at("expansion").get<std::string>(), n);
    out.push_back({"band_expansion", cyclically_equal(expansion, word),
                   "band expansion equals the word up to rotation, reduction and commutation"});
    BandRepresentation rep;
    rep.strand_count = n;
    rep.even_block = BraidWord::parse(br.at("even_block").get<std::string>(), n);
    rep.odd_block = BraidWord::parse(br.at("odd_block").get<std::string>(), n);
    for (const auto& band : br.at("bands"))
      rep.bands.push_back({BraidWord::parse(band.at("conjugator").get<std::string>(), n), band.at("k").get<int>(),
                           band.at("epsilon").get<int>()});
    const auto surface = band_euler_characteristic(rep);
    out.push_back({"euler_characteristic",
                   !inv.at("euler_characteristic").is_null() &&
                       inv.at("euler_characteristic").get<int>() == surface.euler_characteristic,
                   "chi = " + std::to_string(surface.euler_characteristic)});
  }
  return out;
}

}  // namespace bandbraid
