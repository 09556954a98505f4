#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bandbraid/config.hpp"
#include "bandbraid/pipeline.hpp"
#include "bandbraid/report_json.hpp"
#include "bandbraid/svg.hpp"

using namespace bandbraid;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

int cmd_double_points(const std::string& path, const std::string& out) {
  const RunConfig cfg = load_config(path);
  RunReport r;
  r.config = cfg;
  const auto model = cfg.model();
  PerturbationParams params = cfg.params();
  json j;
  j["gamma_attempts"] = json::array();
  int code = kExitGenericity;
  for (cplx g : gamma_schedule(cfg)) {
    params.gamma = g;
    json attempt = {{"gamma", detail::cjson(g)}};
    try {
      const auto dps = find_double_points(model, params, cfg.solver).points;
      const auto triples = find_triple_coincidences(model, params, cfg.solver);
      std::vector<cplx> images;
      for (const auto& t : triples) images.push_back(t.image_z);
      const auto gen = check_genericity(dps, images, cfg.solver);
      r.double_points = dps;
      r.genericity = gen;
      r.triples = triples;
      r.gamma_used = g;
      attempt["generic"] = gen.passed();
      attempt["failures"] = gen.failures;
      j["gamma_attempts"].push_back(attempt);
      if (gen.passed()) {
        code = kExitOk;
        break;
      }
    } catch (const GenericityFailure& e) {
      attempt["generic"] = false;
      attempt["failures"] = json::array({e.what()});
      j["gamma_attempts"].push_back(attempt);
    }
  }
  const json full = to_json(r);
  j["double_points"] = full["double_points"];
  j["genericity"] = full["genericity"];
  j["triple_coincidences"] = full["triple_coincidences"];
  j["gamma_used"] = detail::cjson(r.gamma_used);
  j["exit_code"] = code;
  write_output(out, j.dump(2) + "\n");
  return code;
}

int cmd_trace(const std::string& path) {
  const RunReport r = run_pipeline(load_config(path));
  if (r.traced) {
    std::cout << "word: " << r.traced->word.to_string() << "\n";
    std::cout << "canonical: " << canonical_cyclic_form(r.traced->word).to_string() << "\n";
  }
  std::cout << "double points: " << r.double_points.size() << "\n";
  if (r.invariants) {
    std::cout << "exponent sum: " << r.invariants->exponent_sum << "\n";
    std::cout << "components: " << r.invariants->components << "\n";
    if (r.invariants->alexander) std::cout << "alexander: " << r.invariants->alexander->to_string() << "\n";
    if (r.invariants->band_surface && r.invariants->band_surface->genus) {
      const Rational g = *r.invariants->band_surface->genus;
      std::cout << "genus: " << g.num;
      if (g.den != 1) std::cout << "/" << g.den;
      std::cout << "\n";
    }
  }
  if (!r.ok()) std::cerr << "error [" << r.stage << "]: " << r.error << "\n";
  return r.exit_code;
}

int cmd_report(const std::string& path, const std::string& out) {
  const RunReport r = run_pipeline(load_config(path));
  write_output(out, report_text(r));
  if (!r.ok()) std::cerr << "error [" << r.stage << "]: " << r.error << "\n";
  return r.exit_code;
}

int cmd_verify(const std::string& path) {
  const json j = json::parse(read_file(path));
  bool all = true;
  for (const auto& c : verify_report(j)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.passed;
  }
  return all ? kExitOk : kExitTemplate;
}

int cmd_plot(const std::string& path, const std::string& view, const std::string& out) {
  const RunReport r = run_pipeline(load_config(path));
  if (!r.ok()) std::cerr << "error [" << r.stage << "]: " << r.error << "\n";
  write_output(out, render_svg(r, view == "disk" ? SvgView::Disk : SvgView::Braid));
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Braid of a perturbed branched disk: double points, loop tracing, band representation"};
  app.require_subcommand(1);
  std::string config, output, view = "braid", report;

  auto* dp = app.add_subcommand("double-points", "Solve for double points and check genericity");
  dp->add_option("config", config, "Config file")->required();
  dp->add_option("-o,--output", output, "Output JSON file (default stdout)");

  auto* tr = app.add_subcommand("trace", "Run the pipeline and print the braid word and invariants");
  tr->add_option("config", config, "Config file")->required();

  auto* rp = app.add_subcommand("report", "Run the pipeline and write the JSON report");
  rp->add_option("config", config, "Config file")->required();
  rp->add_option("-o,--output", output, "Output JSON file (default stdout)");

  auto* vf = app.add_subcommand("verify", "Recheck the invariants of a stored JSON report");
  vf->add_option("report", report, "Report JSON file")->required();

  auto* pl = app.add_subcommand("plot", "Render an SVG of the base disk or of the braid");
  pl->add_option("config", config, "Config file")->required();
  pl->add_option("--view", view, "disk or braid")->check(CLI::IsMember({"disk", "braid"}));
  pl->add_option("-o,--output", output, "Output SVG file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*dp) return cmd_double_points(config, output);
    if (*tr) return cmd_trace(config);
    if (*rp) return cmd_report(config, output);
    if (*vf) return cmd_verify(report);
    if (*pl) return cmd_plot(config, view, output);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "malformed report: " << e.what() << "\n";
    return kExitUsage;
  } catch (const MissingData& e) {
    std::cerr << "missing data: " << e.what() << "\n";
    return kExitLoop;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoop;
  }
  return kExitUsage;
}
