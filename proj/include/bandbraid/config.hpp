#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bandbraid/braid_trace.hpp"
#include "bandbraid/crossing_locus.hpp"
#include "bandbraid/double_points.hpp"
#include "bandbraid/errors.hpp"
#include "bandbraid/loop_gamma.hpp"
#include "bandbraid/surface_model.hpp"

namespace bandbraid {

struct OutputConfig {
  bool json = true;
  bool svg_disk = false;
  bool svg_braid = false;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/**
 * Everything one run needs. Config text is flat `key = value` lines; `#`
 * starts a comment; `h` may repeat, one monomial `c * w^a * cw^b` per line.
 */
struct RunConfig {
  int n = 0;
  double r0 = 1.0;
  std::vector<Monomial> h;
  cplx lambda;
  cplx mu;
  cplx gamma;
  int gamma_retries = 7;
  SolverConfig solver;
  int locus_resolution = 64;
  LocusConfig locus;
  LoopConfig loop;
  TraceConfig trace;
  RegimeConfig regime;
  OutputConfig output;
  long long seed = 0;

  BranchedDiskModel model() const { return BranchedDiskModel(n, h, r0); }
  PerturbationParams params() const { return {lambda, mu, gamma}; }

  void validate() const {
    model();
    params().validate();
    solver.validate(r0);
    loop.validate();
    trace.validate();
    if (locus_resolution < 32) throw ValidationError("locus.resolution must be at least 32");
    if (!(locus.tol_locus > 0 && locus.tol_grad > 0 && locus.tol_theta > 0 && locus.path_samples >= 2))
      throw ValidationError("locus tolerances must be positive");
    if (!(regime.small_ratio > 0 && regime.large_ratio > regime.small_ratio))
      throw ValidationError("regime ratios must satisfy 0 < small_ratio < large_ratio");
    if (gamma_retries < 0) throw ValidationError("gamma_retries must be nonnegative");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// Cursor over one value with error positions relative to the config line.
struct ValueReader {
  std::string_view text;
  std::size_t pos = 0;
  int line = 0;
  int column0 = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, column0 + static_cast<int>(pos) + 1, msg); }
  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= text.size();
  }
  bool accept(std::string_view tok) {
    skip_space();
    if (text.substr(pos, tok.size()) == tok) {
      pos += tok.size();
      return true;
    }
    return false;
  }

  double number() {
    skip_space();
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    if (first < last && *first == '+') ++first;  // from_chars rejects a leading '+'
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) fail("expected a number");
    if (!std::isfinite(v)) fail("number must be finite");
    pos = static_cast<std::size_t>(ptr - text.data());
    return v;
  }

  long long integer() {
    skip_space();
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    long long v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) fail("expected an integer");
    pos = static_cast<std::size_t>(ptr - text.data());
    return v;
  }

  /// `a`, `bi`, `a+bi` or `a-bi`.
  cplx complex() {
    const double a = number();
    if (pos < text.size() && text[pos] == 'i') {
      ++pos;
      return {0.0, a};
    }
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      const bool neg = text[pos] == '-';
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) fail("unexpected sign");
      const double b = number();
      if (pos >= text.size() || text[pos] != 'i') fail("expected 'i' after the imaginary part");
      ++pos;
      return {a, neg ? -b : b};
    }
    return {a, 0.0};
  }

  Monomial monomial() {
    Monomial m;
    m.coeff = complex();
    bool saw_w = false, saw_c = false;
    while (!done()) {
      if (!accept("*")) fail("expected '*'");
      skip_space();
      if (accept("cw")) {
        if (saw_c) fail("repeated cw factor");
        saw_c = true;
        m.deg_conj = accept("^") ? static_cast<int>(integer()) : 1;
      } else if (accept("w")) {
        if (saw_w) fail("repeated w factor");
        saw_w = true;
        m.deg_w = accept("^") ? static_cast<int>(integer()) : 1;
      } else {
        fail("expected w or cw");
      }
    }
    return m;
  }

  void finish() {
    if (!done()) fail("trailing characters");
  }
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_complex(cplx z) {
  std::string s = format_double(z.real());
  const double im = z.imag();
  s += std::signbit(im) ? '-' : '+';
  s += format_double(std::abs(im));
  s += 'i';
  return s;
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string> seen;
  bool have_lambda = false, have_mu = false, have_n = false;

  using Setter = std::function<void(detail::ValueReader&)>;
  auto dbl = [](double& field) { return Setter([&field](detail::ValueReader& r) { field = r.number(); }); };
  auto integer = [](int& field) {
    return Setter([&field](detail::ValueReader& r) {
      const long long v = r.integer();
      if (v < -1'000'000'000LL || v > 1'000'000'000LL) r.fail("integer out of range");
      field = static_cast<int>(v);
    });
  };
  auto boolean = [](bool& field) {
    return Setter([&field](detail::ValueReader& r) {
      if (r.accept("true"))
        field = true;
      else if (r.accept("false"))
        field = false;
      else
        r.fail("expected true or false");
    });
  };
  auto complex = [](cplx& field, bool& flag) {
    return Setter([&field, &flag](detail::ValueReader& r) {
      field = r.complex();
      flag = true;
    });
  };
  bool have_gamma = false;
  const std::map<std::string, Setter> keys = {
      {"n", Setter([&](detail::ValueReader& r) {
         const long long v = r.integer();
         if (v < 0 || v > 1000) r.fail("n out of range");
         cfg.n = static_cast<int>(v);
         have_n = true;
       })},
      {"r0", dbl(cfg.r0)},
      {"lambda", complex(cfg.lambda, have_lambda)},
      {"mu", complex(cfg.mu, have_mu)},
      {"gamma", complex(cfg.gamma, have_gamma)},
      {"gamma_retries", integer(cfg.gamma_retries)},
      {"seed", Setter([&](detail::ValueReader& r) { cfg.seed = r.integer(); })},
      {"solver.grid_radii", integer(cfg.solver.grid_radii)},
      {"solver.grid_angles", integer(cfg.solver.grid_angles)},
      {"solver.newton_max_iter", integer(cfg.solver.newton_max_iter)},
      {"solver.tol_residual", dbl(cfg.solver.tol_residual)},
      {"solver.tol_dedupe", dbl(cfg.solver.tol_dedupe)},
      {"solver.tol_transverse", dbl(cfg.solver.tol_transverse)},
      {"solver.exclusion_radius", dbl(cfg.solver.exclusion_radius)},
      {"locus.resolution", integer(cfg.locus_resolution)},
      {"locus.tol_locus", dbl(cfg.locus.tol_locus)},
      {"locus.tol_grad", dbl(cfg.locus.tol_grad)},
      {"locus.tol_theta", dbl(cfg.locus.tol_theta)},
      {"locus.path_samples", integer(cfg.locus.path_samples)},
      {"loop.default_rho", dbl(cfg.loop.default_rho)},
      {"loop.rho", dbl(cfg.loop.rho)},
      {"loop.angle_step", dbl(cfg.loop.angle_step)},
      {"loop.max_retries", integer(cfg.loop.max_retries)},
      {"loop.max_detour_radius", dbl(cfg.loop.max_detour_radius)},
      {"loop.shrink_factor", dbl(cfg.loop.shrink_factor)},
      {"loop.max_shrinks", integer(cfg.loop.max_shrinks)},
      {"loop.path_samples", integer(cfg.loop.path_samples)},
      {"trace.min_steps", integer(cfg.trace.min_steps)},
      {"trace.tol_gap", dbl(cfg.trace.tol_gap)},
      {"trace.guard_band", dbl(cfg.trace.guard_band)},
      {"trace.tol_theta", dbl(cfg.trace.tol_theta)},
      {"trace.tol_grad", dbl(cfg.trace.tol_grad)},
      {"trace.fd_step", dbl(cfg.trace.fd_step)},
      {"trace.max_refine_depth", integer(cfg.trace.max_refine_depth)},
      {"regime.small_ratio", dbl(cfg.regime.small_ratio)},
      {"regime.large_ratio", dbl(cfg.regime.large_ratio)},
      {"output.json", boolean(cfg.output.json)},
      {"output.svg_disk", boolean(cfg.output.svg_disk)},
      {"output.svg_braid", boolean(cfg.output.svg_braid)},
  };

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (detail::trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 1, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, 1, "missing key");
    detail::ValueReader reader{line.substr(eq + 1), 0, line_no, static_cast<int>(eq + 1)};
    if (key == "h") {
      cfg.h.push_back(reader.monomial());
    } else {
      auto it = keys.find(key);
      if (it == keys.end()) throw ParseError(line_no, 1, "unknown key '" + key + "'");
      if (!seen.insert(key).second) throw ParseError(line_no, 1, "duplicate key '" + key + "'");
      it->second(reader);
      reader.finish();
    }
    if (end == text.size()) break;
  }
  if (!have_n) throw ValidationError("missing required key 'n'");
  if (!have_lambda && !have_mu) throw ValidationError("at least one of 'lambda' and 'mu' is required");
  cfg.validate();
  return cfg;
}

inline std::string serialize_config(const RunConfig& c) {
  using detail::format_complex;
  using detail::format_double;
  std::ostringstream os;
  os << "n = " << c.n << '\n';
  os << "r0 = " << format_double(c.r0) << '\n';
  for (const auto& m : c.h) {
    os << "h = " << format_complex(m.coeff);
    if (m.deg_w) os << " * w^" << m.deg_w;
    if (m.deg_conj) os << " * cw^" << m.deg_conj;
    os << '\n';
  }
  os << "lambda = " << format_complex(c.lambda) << '\n';
  os << "mu = " << format_complex(c.mu) << '\n';
  os << "gamma = " << format_complex(c.gamma) << '\n';
  os << "gamma_retries = " << c.gamma_retries << '\n';
  os << "seed = " << c.seed << '\n';
  os << "solver.grid_radii = " << c.solver.grid_radii << '\n';
  os << "solver.grid_angles = " << c.solver.grid_angles << '\n';
  os << "solver.newton_max_iter = " << c.solver.newton_max_iter << '\n';
  os << "solver.tol_residual = " << format_double(c.solver.tol_residual) << '\n';
  os << "solver.tol_dedupe = " << format_double(c.solver.tol_dedupe) << '\n';
  os << "solver.tol_transverse = " << format_double(c.solver.tol_transverse) << '\n';
  os << "solver.exclusion_radius = " << format_double(c.solver.exclusion_radius) << '\n';
  os << "locus.resolution = " << c.locus_resolution << '\n';
  os << "locus.tol_locus = " << format_double(c.locus.tol_locus) << '\n';
  os << "locus.tol_grad = " << format_double(c.locus.tol_grad) << '\n';
  os << "locus.tol_theta = " << format_double(c.locus.tol_theta) << '\n';
  os << "locus.path_samples = " << c.locus.path_samples << '\n';
  os << "loop.default_rho = " << format_double(c.loop.default_rho) << '\n';
  os << "loop.rho = " << format_double(c.loop.rho) << '\n';
  os << "loop.angle_step = " << format_double(c.loop.angle_step) << '\n';
  os << "loop.max_retries = " << c.loop.max_retries << '\n';
  os << "loop.max_detour_radius = " << format_double(c.loop.max_detour_radius) << '\n';
  os << "loop.shrink_factor = " << format_double(c.loop.shrink_factor) << '\n';
  os << "loop.max_shrinks = " << c.loop.max_shrinks << '\n';
  os << "loop.path_samples = " << c.loop.path_samples << '\n';
  os << "trace.min_steps = " << c.trace.min_steps << '\n';
  os << "trace.tol_gap = " << format_double(c.trace.tol_gap) << '\n';
  os << "trace.guard_band = " << format_double(c.trace.guard_band) << '\n';
  os << "trace.tol_theta = " << format_double(c.trace.tol_theta) << '\n';
  os << "trace.tol_grad = " << format_double(c.trace.tol_grad) << '\n';
  os << "trace.fd_step = " << format_double(c.trace.fd_step) << '\n';
  os << "trace.max_refine_depth = " << c.trace.max_refine_depth << '\n';
  os << "regime.small_ratio = " << format_double(c.regime.small_ratio) << '\n';
  os << "regime.large_ratio = " << format_double(c.regime.large_ratio) << '\n';
  os << "output.json = " << (c.output.json ? "true" : "false") << '\n';
  os << "output.svg_disk = " << (c.output.svg_disk ? "true" : "false") << '\n';
  os << "output.svg_braid = " << (c.output.svg_braid ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace bandbraid
