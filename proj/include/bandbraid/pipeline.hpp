#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bandbraid/braid_algebra.hpp"
#include "bandbraid/braid_trace.hpp"
#include "bandbraid/config.hpp"
#include "bandbraid/crossing_locus.hpp"
#include "bandbraid/double_points.hpp"
#include "bandbraid/loop_gamma.hpp"

namespace bandbraid {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitGenericity = 2,
  kExitLoop = 3,
  kExitTemplate = 4,
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Invariants {
  int exponent_sum = 0;
  int components = 0;
  std::optional<LaurentPolynomial> alexander;
  std::optional<BandSurface> band_surface;
};

struct RunReport {
  RunConfig config;
  int exit_code = kExitOk;
  std::string stage;  // last stage reached, or the failing one
  std::string error;

  cplx gamma_used;
  int gamma_attempts = 0;
  std::vector<DoublePoint> double_points;
  std::optional<GenericityReport> genericity;
  std::vector<TripleCoincidence> triples;
  std::optional<LocusSample> locus;

  std::vector<double> rho_attempts;
  std::vector<std::string> loop_failures;
  std::optional<LoopGamma> loop;
  std::optional<LoopValidationReport> loop_report;
  std::optional<TracedBraid> traced;
  std::optional<EventClassification> classification;

  Regime regime = Regime::NotApplicable;
  std::optional<TemplateMatch> match;
  std::optional<Invariants> invariants;
  std::vector<CheckResult> checks;

  bool ok() const { return exit_code == kExitOk; }
};

/// User gamma first, then gamma_j = 0.01 max(|lambda|, |mu|) e^{2 pi i j / 7} 2^{-j}.
inline std::vector<cplx> gamma_schedule(const RunConfig& cfg) {
  std::vector<cplx> out{cfg.gamma};
  const double scale = 0.01 * std::max(std::abs(cfg.lambda), std::abs(cfg.mu));
  for (int j = 0; j < cfg.gamma_retries; ++j)
    out.push_back(std::polar(scale * std::ldexp(1.0, -j), kTwoPi * j / 7.0));
  return out;
}

namespace detail {

inline std::vector<cplx> triple_images(const std::vector<TripleCoincidence>& t) {
  std::vector<cplx> out;
  for (const auto& x : t) out.push_back(x.image_z);
  return out;
}

inline void run_checks(RunReport& r) {
  const int n = r.config.n;
  const auto& t = *r.traced;
  r.checks.push_back({"monodromy", monodromy_consistent(t),
                      "word and fiber permutations agree and form an N-cycle"});
  if (r.regime != Regime::NotApplicable) {
    int eps = 0;
    for (const auto& dp : r.double_points) eps += dp.sign;
    const int expected = regime_sign(r.regime) * (n - 1) + 2 * eps;
    r.checks.push_back({"writhe_identity", r.invariants->exponent_sum == expected,
                        "exponent sum " + std::to_string(r.invariants->exponent_sum) + ", expected " +
                            std::to_string(expected)});
  }
  if (r.classification) {
    bool signs = true;
    for (std::size_t d = 0; d < r.classification->detours.size(); ++d) {
      const int dp = r.loop->detours[d].double_point;
      for (std::size_t i : r.classification->detours[d].arc)
        signs = signs && t.events[i].sign == r.double_points[static_cast<std::size_t>(dp)].sign;
    }
    r.checks.push_back({"detour_signs", signs, "detour crossing signs equal double-point signs"});
  }
  if (r.invariants->alexander)
    r.checks.push_back({"alexander_symmetric", r.invariants->alexander->is_symmetric(), "Delta(t) = Delta(1/t)"});
}

}  // namespace detail

/**
 * Runs every stage on one configuration. Failures are caught and recorded with
 * the stage name and exit code; whatever was computed before stays in the report.
 */
inline RunReport run_pipeline(const RunConfig& cfg) {
  RunReport r;
  r.config = cfg;
  try {
    r.stage = "validate";
    cfg.validate();
    const BranchedDiskModel model = cfg.model();
    PerturbationParams params = cfg.params();

    r.stage = "double_points";
    bool generic = false;
    std::string last_error;
    for (cplx g : gamma_schedule(cfg)) {
      ++r.gamma_attempts;
      params.gamma = g;
      r.gamma_used = g;
      try {
        r.double_points = find_double_points(model, params, cfg.solver).points;
        r.triples = find_triple_coincidences(model, params, cfg.solver);
        const auto triples = detail::triple_images(r.triples);
        r.genericity = check_genericity(r.double_points, triples, cfg.solver);
        if (r.genericity->passed()) {
          generic = true;
          break;
        }
        last_error = r.genericity->failures.empty() ? "not generic" : r.genericity->failures.front();
      } catch (const GenericityFailure& e) {
        last_error = e.what();
      }
    }
    if (!generic) {
      r.exit_code = kExitGenericity;
      r.error = "genericity failure after " + std::to_string(r.gamma_attempts) + " attempts: " + last_error;
      return r;
    }

    r.stage = "locus";
    r.locus = sample_locus(model, params, cfg.locus_resolution, cfg.locus);
    const auto triples = detail::triple_images(r.triples);
    r.regime = classify_regime(params, cfg.regime);

    r.stage = "loop";
    double rho = default_rho(model, r.double_points, cfg.loop);
    bool traced = false;
    for (int attempt = 0; attempt <= cfg.loop.max_shrinks && !traced; ++attempt, rho *= cfg.loop.shrink_factor) {
      r.rho_attempts.push_back(rho);
      try {
        r.stage = "loop";
        LoopGamma loop = build_loop(model, params, r.double_points, triples, r.locus->singular_candidates, rho,
                                    cfg.loop, cfg.locus);
        auto rep = validate_loop(model, params, loop, r.double_points, triples, r.locus->singular_candidates,
                                 cfg.loop, cfg.locus);
        r.loop = loop;
        r.loop_report = rep;
        if (!rep.passed()) throw ConstructionFailure("loop validation failed: " + rep.failures.front());
        r.stage = "trace";
        TracedBraid t = trace_braid(model, params, loop, cfg.trace);
        r.traced = t;
        if (!monodromy_consistent(t)) throw LiftAmbiguity("word permutation disagrees with the fiber monodromy");
        r.stage = "classify";
        r.classification.reset();
        try {
          r.classification = classify_events(t, loop);
        } catch (const BlockStructureFailure&) {
          if (r.regime != Regime::NotApplicable) throw;
        }
        traced = true;
      } catch (const Error& e) {
        r.loop_failures.push_back("rho = " + detail::format_double(rho) + " [" + r.stage + "]: " + e.what());
      }
    }
    if (!traced) {
      r.exit_code = kExitLoop;
      r.error = r.loop_failures.back();
      return r;
    }

    r.stage = "invariants";
    Invariants inv;
    inv.exponent_sum = exponent_sum(r.traced->word);
    inv.components = closure_components(r.traced->word);
    if (inv.components == 1) inv.alexander = alexander_of_closure(r.traced->word);
    r.invariants = inv;

    if (r.regime != Regime::NotApplicable) {
      r.stage = "template";
      try {
        r.match = match_band_template(*r.traced, *r.classification, r.double_points, *r.loop, regime_sign(r.regime));
        r.invariants->band_surface = band_euler_characteristic(r.match->representation);
      } catch (const TemplateMismatch& e) {
        r.exit_code = kExitTemplate;
        r.error = e.what();
      }
    }

    detail::run_checks(r);
    if (r.exit_code == kExitOk) {
      for (const auto& c : r.checks)
        if (!c.passed) {
          r.exit_code = kExitTemplate;
          r.error = "check failed: " + c.name + " (" + c.detail + ")";
          break;
        }
    }
    if (r.exit_code == kExitOk) r.stage = "done";
  } catch (const ValidationError& e) {
    r.exit_code = kExitUsage;
    r.error = e.what();
  } catch (const Error& e) {
    r.exit_code = kExitLoop;
    r.error = e.what();
  }
  return r;
}

}  // namespace bandbraid
