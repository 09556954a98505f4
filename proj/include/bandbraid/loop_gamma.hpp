#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandbraid/crossing_locus.hpp"
#include "bandbraid/double_points.hpp"
#include "bandbraid/errors.hpp"
#include "bandbraid/numerics.hpp"
#include "bandbraid/surface_model.hpp"

namespace bandbraid {

enum class SegmentKind { BaseArc, TubeSide, DetourArc };

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::BaseArc: return "base_arc";
    case SegmentKind::TubeSide: return "tube_side";
    case SegmentKind::DetourArc: return "detour_arc";
  }
  return "?";
}

/// Circular arc (counterclockwise when sweep > 0) or straight segment, parametrized by u in [0, 1].
struct LoopSegment {
  SegmentKind kind = SegmentKind::BaseArc;
  bool is_arc = true;
  cplx center;
  double radius = 0.0;
  double start_angle = 0.0;
  double sweep = 0.0;
  cplx from, to;
  int detour = -1;
  bool outbound = false;

  static LoopSegment arc(SegmentKind kind, cplx center, double radius, double start, double sweep, int detour = -1) {
    LoopSegment s;
    s.kind = kind;
    s.is_arc = true;
    s.center = center;
    s.radius = radius;
    s.start_angle = start;
    s.sweep = sweep;
    s.from = center + std::polar(radius, start);
    s.to = center + std::polar(radius, start + sweep);
    s.detour = detour;
    return s;
  }

  static LoopSegment line(cplx from, cplx to, int detour, bool outbound) {
    LoopSegment s;
    s.kind = SegmentKind::TubeSide;
    s.is_arc = false;
    s.from = from;
    s.to = to;
    s.detour = detour;
    s.outbound = outbound;
    return s;
  }

  cplx point(double u) const {
    if (is_arc) return center + std::polar(radius, start_angle + sweep * u);
    return from + u * (to - from);
  }
  cplx tangent(double u) const {
    if (is_arc) return cplx{0.0, 1.0} * sweep * std::polar(radius, start_angle + sweep * u);
    return to - from;
  }
  double length() const { return is_arc ? radius * std::abs(sweep) : std::abs(to - from); }

  /// Continuous change of arg(z) from u = 0 to u (the segment never meets the origin).
  double arg_change(double u) const {
    if (is_arc && center == cplx{}) return sweep * u;
    return std::arg(point(u) / point(0.0));
  }
};

struct Detour {
  cplx center;
  double radius = 0.0;
  double tube_half_width = 0.0;
  double junction_angle = 0.0;  // angle on C_rho of the tube centerline
  double mouth_angle = 0.0;     // angle around the center of the tube mouth
  int double_point = -1;        // index into the double-point list
  double junction_start = 0.0;  // C_rho angles where the tube sides leave the circle
  double junction_sweep = 0.0;
  double entry_right = 0.0;     // angles around the center where the sides meet the detour circle
  double entry_left = 0.0;
  cplx side_right_from, side_right_to, side_left_from, side_left_to;
};

struct LoopGamma {
  std::vector<LoopSegment> segments;
  double rho = 0.0;
  double base_angle = 0.0;
  cplx base_point;
  std::vector<Detour> detours;  // sorted by decreasing arg of the center
};

struct LoopConfig {
  double default_rho = 0.3;
  double rho = 0.0;  // > 0 overrides the automatic choice
  double angle_step = 0.02;
  int max_retries = 25;
  double max_detour_radius = 0.05;
  double shrink_factor = 0.7;
  int max_shrinks = 8;
  int path_samples = 256;

  void validate() const {
    if (!(default_rho > 0 && angle_step > 0 && max_detour_radius > 0 && shrink_factor > 0 && shrink_factor < 1))
      throw ValidationError("loop configuration values must be positive (shrink factor in (0, 1))");
    if (max_retries < 0 || max_shrinks < 0 || path_samples < 2) throw ValidationError("invalid loop retry counts");
  }

  friend bool operator==(const LoopConfig&, const LoopConfig&) = default;
};

inline double wrap_positive(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

/// rho = min(0.4 min|p_i|, 0.3 r0^N), or default_rho * min(1, r0^N) without double points.
inline double default_rho(const BranchedDiskModel& model, std::span<const DoublePoint> dps, const LoopConfig& cfg) {
  if (cfg.rho > 0) return cfg.rho;
  const double disk = std::pow(model.domain_radius(), model.branch_order());
  if (dps.empty()) return cfg.default_rho * std::min(1.0, disk);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& dp : dps) m = std::min(m, std::abs(dp.image.z1));
  return std::min(0.4 * m, 0.3 * disk);
}

/// Parameter view of a loop: theta in [0, 2 pi] proportional to arc length.
class LoopParametrization {
public:
  explicit LoopParametrization(const LoopGamma& loop) : loop_(&loop) {
    double total = 0.0;
    starts_.push_back(0.0);
    for (const auto& s : loop.segments) {
      total += s.length();
      starts_.push_back(total);
    }
    length_ = total;
    for (double& s : starts_) s = kTwoPi * s / total;
    starts_.back() = kTwoPi;
  }

  std::size_t segment_count() const { return loop_->segments.size(); }
  const LoopSegment& segment(std::size_t i) const { return loop_->segments[i]; }
  double segment_start(std::size_t i) const { return starts_[i]; }
  double segment_end(std::size_t i) const { return starts_[i + 1]; }
  double total_length() const { return length_; }

  std::size_t segment_index(double theta) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), theta);
    std::size_t idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - starts_.begin()) - 1));
    return std::min(idx, segment_count() - 1);
  }

  double local(std::size_t seg, double theta) const {
    return (theta - starts_[seg]) / (starts_[seg + 1] - starts_[seg]);
  }

  cplx point(std::size_t seg, double theta) const { return segment(seg).point(local(seg, theta)); }
  cplx derivative(std::size_t seg, double theta) const {
    return segment(seg).tangent(local(seg, theta)) / (starts_[seg + 1] - starts_[seg]);
  }
  cplx point(double theta) const { return point(segment_index(theta), theta); }
  cplx derivative(double theta) const { return derivative(segment_index(theta), theta); }

  /// Parameters where consecutive segments meet (the derivative may jump there).
  std::vector<double> corners() const { return {starts_.begin() + 1, starts_.end() - 1}; }

private:
  const LoopGamma* loop_;
  std::vector<double> starts_;
  double length_ = 0.0;
};

namespace detail {

/// Continuous lift of sheet j along a segment, u in [0, 1] -> (w, dw/du).
inline LiftedPath segment_lift(const LoopSegment& seg, int n, int j) {
  const cplx rot = unit_root(j, n);
  const double a0 = std::arg(seg.point(0.0));
  return [seg, n, rot, a0](double u) {
    const cplx z = seg.point(u);
    const double a = a0 + seg.arg_change(u);
    const cplx w = std::polar(std::pow(std::abs(z), 1.0 / n), a / n);
    const cplx dw = seg.tangent(u) / (static_cast<double>(n) * ipow(w, n - 1));
    return std::pair{rot * w, rot * dw};
  };
}

struct PairHit {
  double u = 0.0;
  int sheet = 0;
  int k = 0;
  double slope = 0.0;
};

/// All crossing-locus hits along a segment, one per unordered sheet pair (sheet, sheet + k).
inline std::vector<PairHit> segment_locus_hits(const std::vector<CoincidenceFunction>& coincidence,
                                               const LoopSegment& seg, int n, int samples, const LocusConfig& lcfg) {
  std::vector<PairHit> out;
  LocusConfig cfg = lcfg;
  cfg.path_samples = samples;
  for (int j = 0; j < n; ++j) {
    const LiftedPath lift = segment_lift(seg, n, j);
    for (int k = 1; j + k < n; ++k)
      for (const auto& h : path_locus_intersections(coincidence[k - 1], lift, 0.0, 1.0, cfg))
        out.push_back({h.theta, j, k, h.slope});
  }
  std::sort(out.begin(), out.end(), [](const PairHit& a, const PairHit& b) { return a.u < b.u; });
  return out;
}

inline std::vector<CoincidenceFunction> coincidence_functions(const BranchedDiskModel& model,
                                                              const PerturbationParams& params) {
  std::vector<CoincidenceFunction> out;
  for (int k = 1; k < model.branch_order(); ++k) out.emplace_back(model, params, k);
  return out;
}

/// Parameters t of the line p + t d (|d| = 1) on the circle |z - c| = r, ascending.
inline std::optional<std::pair<double, double>> line_circle(cplx p, cplx d, cplx c, double r) {
  const double b = (std::conj(d) * (p - c)).real();
  const double cc = std::norm(p - c) - r * r;
  const double disc = b * b - cc;
  if (disc <= 0) return std::nullopt;
  const double s = std::sqrt(disc);
  return std::pair{-b - s, -b + s};
}

inline double point_segment_distance(cplx z, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  double t = len2 > 0 ? ((z - a) * std::conj(ab)).real() / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

inline double segment_segment_distance(cplx a, cplx b, cplx c, cplx d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

/// Strict containment in a convex polygon given in either orientation.
inline bool in_convex_polygon(cplx z, std::span<const cplx> poly) {
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double c = cross(poly[(i + 1) % poly.size()] - poly[i], z - poly[i]);
    if (c > 0) ++pos;
    if (c < 0) ++neg;
  }
  return pos == 0 || neg == 0;
}

/// Whether angle a lies on the counterclockwise arc starting at start with the given sweep (margin shrinks it).
inline bool angle_in_arc(double a, double start, double sweep, double margin = 0.0) {
  const double rel = wrap_positive(a - start);
  return rel > margin && rel < sweep - margin;
}

}  // namespace detail

/// Winding number of the loop around z (z must not lie on the loop).
inline int winding_number(const LoopGamma& loop, cplx z) {
  double total = 0.0;
  for (const auto& seg : loop.segments) {
    const int pieces = seg.is_arc ? std::max(64, static_cast<int>(std::ceil(std::abs(seg.sweep) / 0.005))) : 1;
    cplx prev = seg.point(0.0) - z;
    for (int i = 1; i <= pieces; ++i) {
      const cplx cur = seg.point(static_cast<double>(i) / pieces) - z;
      total += std::arg(cur / prev);
      prev = cur;
    }
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

/// Geometry of one detour before assembly.
struct DetourPlacement {
  cplx center;
  double radius = 0.0;
  double tube_half_width = 0.0;
  double mouth_angle = 0.0;
  double junction_angle = 0.0;
  int double_point = -1;
};

/**
 * Straight tube from C_rho toward the mouth point center + r e^{i mouth}; each
 * side is the centerline offset by +-half_width, clipped between the point where
 * it leaves C_rho and the point where it first meets the detour circle.
 * Returns nothing if the geometry is not realizable.
 */
inline std::optional<Detour> resolve_detour(double rho, const DetourPlacement& pl) {
  const cplx u = pl.center + std::polar(pl.radius, pl.mouth_angle);
  const cplx j = std::polar(rho, pl.junction_angle);
  const cplx dir_raw = u - j;
  if (std::abs(dir_raw) == 0.0) return std::nullopt;
  const cplx d = dir_raw / std::abs(dir_raw);
  const cplx normal = cplx{0.0, 1.0} * d;  // left of the direction of travel
  Detour out;
  out.center = pl.center;
  out.radius = pl.radius;
  out.tube_half_width = pl.tube_half_width;
  out.junction_angle = pl.junction_angle;
  out.mouth_angle = pl.mouth_angle;
  out.double_point = pl.double_point;
  for (int side : {-1, 1}) {
    const cplx base = j + static_cast<double>(side) * pl.tube_half_width * normal;
    const auto on_base = detail::line_circle(base, d, cplx{}, rho);
    const auto on_detour = detail::line_circle(base, d, pl.center, pl.radius);
    if (!on_base || !on_detour) return std::nullopt;
    const double t0 = on_base->second;
    const double t1 = on_detour->first;
    if (!(t1 > t0)) return std::nullopt;
    const cplx from = base + t0 * d, to = base + t1 * d;
    if (side < 0) {
      out.side_right_from = from;
      out.side_right_to = to;
      out.entry_right = std::arg(to - pl.center);
    } else {
      out.side_left_from = from;
      out.side_left_to = to;
      out.entry_left = std::arg(to - pl.center);
    }
  }
  out.junction_start = std::arg(out.side_right_from);
  out.junction_sweep = wrap_positive(std::arg(out.side_left_from) - out.junction_start);
  if (!(out.junction_sweep > 0 && out.junction_sweep < 1.0)) return std::nullopt;
  const double detour_sweep = wrap_positive(out.entry_left - out.entry_right);
  if (!(detour_sweep > std::numbers::pi)) return std::nullopt;
  return out;
}

/**
 * Loop from explicit geometry: C_rho counterclockwise from base_angle, leaving
 * along the right side of each tube, around the detour circle counterclockwise
 * and back along the left side.
 */
inline LoopGamma assemble_loop(double rho, double base_angle, std::vector<Detour> detours) {
  LoopGamma loop;
  loop.rho = rho;
  loop.base_angle = base_angle;
  loop.base_point = std::polar(rho, base_angle);
  std::vector<std::size_t> order(detours.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return wrap_positive(detours[a].junction_start - base_angle) < wrap_positive(detours[b].junction_start - base_angle);
  });
  double cur = base_angle;
  for (std::size_t idx : order) {
    const Detour& d = detours[idx];
    const int di = static_cast<int>(idx);
    loop.segments.push_back(
        LoopSegment::arc(SegmentKind::BaseArc, {}, rho, cur, wrap_positive(d.junction_start - cur)));
    loop.segments.push_back(LoopSegment::line(d.side_right_from, d.side_right_to, di, true));
    loop.segments.push_back(LoopSegment::arc(SegmentKind::DetourArc, d.center, d.radius, d.entry_right,
                                             wrap_positive(d.entry_left - d.entry_right), di));
    loop.segments.push_back(LoopSegment::line(d.side_left_to, d.side_left_from, di, false));
    cur = d.junction_start + d.junction_sweep;
  }
  double last = wrap_positive(base_angle - cur);
  if (detours.empty() || last == 0.0) last = detours.empty() ? kTwoPi : last;
  loop.segments.push_back(LoopSegment::arc(SegmentKind::BaseArc, {}, rho, cur, last));
  loop.detours = std::move(detours);
  return loop;
}

struct TubeCheck {
  bool circle_meets_locus_twice = false;  // Gamma_i meets A in exactly two points
  bool mouth_clear = false;               // neither point lies in the tube mouth
  bool junction_clear = false;            // the junction arc of C_rho misses A
  bool tube_empty = false;                // no double-point image or singular candidate inside the tube
  bool sides_transverse = false;          // tube sides meet A transversally
};

struct TransversalHit {
  std::size_t segment = 0;
  double theta = 0.0;
  int k = 0;
  double slope = 0.0;
};

struct LoopValidationReport {
  bool closed = false;
  bool transverse = false;
  bool origin_enclosed = false;
  bool double_points_enclosed = false;  // all p_i in U0
  bool triples_excluded = false;        // all triple coincidences in U1
  bool tubes_disjoint = false;
  std::vector<TransversalHit> transversal_hits;
  std::vector<TubeCheck> tube_checks;
  std::vector<std::string> failures;

  bool passed() const {
    bool ok = closed && transverse && origin_enclosed && double_points_enclosed && triples_excluded && tubes_disjoint;
    for (const auto& t : tube_checks)
      ok = ok && t.circle_meets_locus_twice && t.mouth_clear && t.junction_clear && t.tube_empty && t.sides_transverse;
    return ok;
  }
};

namespace detail {

inline std::array<cplx, 4> tube_quad(const Detour& d) {
  return {d.side_right_from, d.side_right_to, d.side_left_to, d.side_left_from};
}

/// Angles (around the circle's center) where a full circle meets the crossing locus.
inline std::vector<double> circle_hit_angles(const std::vector<CoincidenceFunction>& coincidence, cplx center,
                                             double radius, double start, int n, int samples,
                                             const LocusConfig& lcfg) {
  const LoopSegment circle = LoopSegment::arc(SegmentKind::DetourArc, center, radius, start, kTwoPi);
  std::vector<double> out;
  for (const auto& h : segment_locus_hits(coincidence, circle, n, samples, lcfg))
    out.push_back(start + kTwoPi * h.u);
  return out;
}

}  // namespace detail

inline LoopValidationReport validate_loop(const BranchedDiskModel& model, const PerturbationParams& params,
                                          const LoopGamma& loop, std::span<const DoublePoint> dps,
                                          std::span<const cplx> triple_images,
                                          std::span<const cplx> singular_candidates, const LoopConfig& cfg = {},
                                          const LocusConfig& lcfg = {}) {
  const int n = model.branch_order();
  const auto coincidence = detail::coincidence_functions(model, params);
  LoopValidationReport rep;

  rep.closed = !loop.segments.empty();
  for (std::size_t i = 0; i < loop.segments.size(); ++i) {
    const cplx end = loop.segments[i].point(1.0);
    const cplx next = loop.segments[(i + 1) % loop.segments.size()].point(0.0);
    if (std::abs(end - next) > 1e-12 * std::max(1.0, std::abs(end))) rep.closed = false;
  }
  if (!rep.closed) rep.failures.push_back("loop is not closed");

  const LoopParametrization param(loop);
  rep.transverse = true;
  for (std::size_t s = 0; s < loop.segments.size(); ++s) {
    try {
      for (const auto& h : detail::segment_locus_hits(coincidence, loop.segments[s], n, cfg.path_samples, lcfg)) {
        const double dtheta = param.segment_end(s) - param.segment_start(s);
        rep.transversal_hits.push_back({s, param.segment_start(s) + h.u * dtheta, h.k, h.slope / dtheta});
      }
    } catch (const TangencyDetected& e) {
      rep.transverse = false;
      rep.failures.push_back(std::string("segment ") + std::to_string(s) + ": " + e.what());
    }
  }

  rep.origin_enclosed = winding_number(loop, {}) == 1;
  if (!rep.origin_enclosed) rep.failures.push_back("loop does not wind once around the branch point");
  rep.double_points_enclosed = true;
  for (const auto& dp : dps)
    if (winding_number(loop, dp.image.z1) != 1) rep.double_points_enclosed = false;
  if (!rep.double_points_enclosed) rep.failures.push_back("a double-point image lies outside the loop");
  rep.triples_excluded = true;
  for (cplx x : triple_images)
    if (winding_number(loop, x) != 0) rep.triples_excluded = false;
  if (!rep.triples_excluded) rep.failures.push_back("a triple coincidence lies inside the loop");

  rep.tubes_disjoint = true;
  for (std::size_t i = 0; i < loop.detours.size(); ++i)
    for (std::size_t j = i + 1; j < loop.detours.size(); ++j) {
      const auto& a = loop.detours[i];
      const auto& b = loop.detours[j];
      const std::array<std::pair<cplx, cplx>, 2> sa{{{a.side_right_from, a.side_right_to},
                                                      {a.side_left_from, a.side_left_to}}};
      const std::array<std::pair<cplx, cplx>, 2> sb{{{b.side_right_from, b.side_right_to},
                                                      {b.side_left_from, b.side_left_to}}};
      for (const auto& x : sa)
        for (const auto& y : sb)
          if (detail::segment_segment_distance(x.first, x.second, y.first, y.second) == 0.0)
            rep.tubes_disjoint = false;
      if (std::abs(a.center - b.center) <= a.radius + b.radius) rep.tubes_disjoint = false;
    }
  if (!rep.tubes_disjoint) rep.failures.push_back("tubes or detour disks overlap");

  std::vector<double> base_hits;
  try {
    base_hits = detail::circle_hit_angles(coincidence, {}, loop.rho, 0.0, n, 4 * cfg.path_samples, lcfg);
  } catch (const TangencyDetected&) {
  }

  for (std::size_t i = 0; i < loop.detours.size(); ++i) {
    const Detour& d = loop.detours[i];
    TubeCheck tc;
    try {
      const auto angles = detail::circle_hit_angles(coincidence, d.center, d.radius, d.entry_right, n,
                                                    cfg.path_samples, lcfg);
      tc.circle_meets_locus_twice = angles.size() == 2;
      const double sweep = wrap_positive(d.entry_left - d.entry_right);
      tc.mouth_clear = std::all_of(angles.begin(), angles.end(),
                                   [&](double a) { return detail::angle_in_arc(a, d.entry_right, sweep); });
    } catch (const TangencyDetected&) {
    }
    tc.junction_clear = std::none_of(base_hits.begin(), base_hits.end(), [&](double a) {
      return detail::angle_in_arc(a, d.junction_start, d.junction_sweep, -1e-9);
    });
    const auto quad = detail::tube_quad(d);
    tc.tube_empty = true;
    for (const auto& other : dps)
      if (detail::in_convex_polygon(other.image.z1, quad)) tc.tube_empty = false;
    for (cplx s : singular_candidates)
      if (detail::in_convex_polygon(s, quad)) tc.tube_empty = false;
    tc.sides_transverse = true;
    for (const auto& seg : loop.segments)
      if (seg.kind == SegmentKind::TubeSide && seg.detour == static_cast<int>(i)) {
        try {
          detail::segment_locus_hits(coincidence, seg, n, cfg.path_samples, lcfg);
        } catch (const TangencyDetected&) {
          tc.sides_transverse = false;
        }
      }
    if (!tc.circle_meets_locus_twice) rep.failures.push_back("detour " + std::to_string(i) + ": circle does not meet A twice");
    if (!tc.mouth_clear) rep.failures.push_back("detour " + std::to_string(i) + ": crossing point inside tube mouth");
    if (!tc.junction_clear) rep.failures.push_back("detour " + std::to_string(i) + ": junction arc meets A");
    if (!tc.tube_empty) rep.failures.push_back("detour " + std::to_string(i) + ": tube contains a special point");
    if (!tc.sides_transverse) rep.failures.push_back("detour " + std::to_string(i) + ": tube side tangent to A");
    rep.tube_checks.push_back(tc);
  }
  return rep;
}

/**
 * Builds Gamma for a given rho. Detours are indexed by decreasing arg of the
 * projected double points; for each one the radius is a quarter of the gap to
 * the nearest other feature, the mouth is placed on an arc of the detour circle
 * between its two locus crossings, and the junction angle on C_rho is tried at
 * arg(mouth) +- j * angle_step until every local condition holds.
 */
inline LoopGamma build_loop(const BranchedDiskModel& model, const PerturbationParams& params,
                            std::span<const DoublePoint> dps, std::span<const cplx> triple_images,
                            std::span<const cplx> singular_candidates, double rho, const LoopConfig& cfg = {},
                            const LocusConfig& lcfg = {}) {
  const int n = model.branch_order();
  const auto coincidence = detail::coincidence_functions(model, params);

  std::vector<std::size_t> order(dps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return numerics::arg_positive(dps[a].image.z1) > numerics::arg_positive(dps[b].image.z1);
  });
  for (std::size_t i = 0; i < dps.size(); ++i)
    if (!(std::abs(dps[i].image.z1) > 2.0 * rho))
      throw ConstructionFailure("rho must be below half the smallest double-point modulus");

  std::vector<double> base_hits;
  try {
    base_hits = detail::circle_hit_angles(coincidence, {}, rho, 0.0, n, 4 * cfg.path_samples, lcfg);
  } catch (const TangencyDetected& e) {
    throw ConstructionFailure(std::string("C_rho is tangent to the crossing locus: ") + e.what());
  }

  // radii first, so every placement can keep clear of every disk
  std::vector<double> radii(order.size());
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const cplx p = dps[order[oi]].image.z1;
    double gap = std::abs(p) - rho;
    for (const auto& other : dps)
      if (&other != &dps[order[oi]]) gap = std::min(gap, std::abs(other.image.z1 - p));
    for (cplx x : triple_images) gap = std::min(gap, std::abs(x - p));
    for (cplx s : singular_candidates) gap = std::min(gap, std::abs(s - p));
    radii[oi] = std::min({0.25 * gap, 0.25 * (std::abs(p) - rho), cfg.max_detour_radius});
  }

  std::vector<Detour> placed;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const cplx p = dps[order[oi]].image.z1;
    std::optional<Detour> chosen;
    for (int shrink = 0; shrink < 6 && !chosen; ++shrink) {
      const double r = radii[oi] * std::pow(0.5, shrink);
      const double hw = 0.25 * r;
      std::vector<double> hits;
      try {
        hits = detail::circle_hit_angles(coincidence, p, r, 0.0, n, cfg.path_samples, lcfg);
      } catch (const TangencyDetected&) {
        continue;
      }
      if (hits.size() != 2) continue;

      // mouth candidates on both arcs between the two crossings, most origin-facing first
      std::vector<double> mouths;
      const double a1 = hits[0], a2 = hits[1];
      const double arc1 = wrap_positive(a2 - a1), arc2 = kTwoPi - arc1;
      for (double frac : {0.5, 0.35, 0.65, 0.2, 0.8}) {
        mouths.push_back(a1 + frac * arc1);
        mouths.push_back(a2 + frac * arc2);
      }
      const double toward_origin = std::arg(-p);
      std::stable_sort(mouths.begin(), mouths.end(), [&](double x, double y) {
        return std::cos(x - toward_origin) > std::cos(y - toward_origin);
      });

      for (double mouth : mouths) {
        if (chosen) break;
        if (std::cos(mouth - toward_origin) < -0.2) continue;
        const cplx u = p + std::polar(r, mouth);
        const double phi0 = std::arg(u);
        for (int attempt = 0; attempt <= 2 * cfg.max_retries && !chosen; ++attempt) {
          const int j = (attempt + 1) / 2 * (attempt % 2 == 1 ? 1 : -1);
          const double phi = phi0 + j * cfg.angle_step;
          DetourPlacement pl{p, r, hw, mouth, phi, static_cast<int>(order[oi])};
          const auto det = resolve_detour(rho, pl);
          if (!det) continue;
          const cplx jpt = std::polar(rho, phi);
          const cplx dir = (u - jpt) / std::abs(u - jpt);
          if ((std::conj(jpt) * dir).real() < 0.2 * rho) continue;          // leaves C_rho outward
          if ((std::conj(dir) * (p - u)).real() < 0.6 * r) continue;        // enters the circle head-on
          // crossing points outside the mouth
          const double sweep = wrap_positive(det->entry_left - det->entry_right);
          const double margin = 0.05;
          if (!detail::angle_in_arc(a1, det->entry_right, sweep, margin) ||
              !detail::angle_in_arc(a2, det->entry_right, sweep, margin))
            continue;
          // junction arc clear of A
          if (std::any_of(base_hits.begin(), base_hits.end(), [&](double a) {
                return detail::angle_in_arc(a, det->junction_start, det->junction_sweep, -cfg.angle_step * 0.25);
              }))
            continue;
          // clear of other features and earlier tubes
          const auto quad = detail::tube_quad(*det);
          bool ok = true;
          for (std::size_t q = 0; q < order.size() && ok; ++q) {
            if (q == oi) continue;
            const cplx pq = dps[order[q]].image.z1;
            const double clearance = radii[q] + hw;
            if (detail::point_segment_distance(pq, det->side_right_from, det->side_right_to) <= clearance ||
                detail::point_segment_distance(pq, det->side_left_from, det->side_left_to) <= clearance ||
                detail::in_convex_polygon(pq, quad))
              ok = false;
          }
          auto too_close = [&](cplx x) {
            return detail::in_convex_polygon(x, quad) ||
                   detail::point_segment_distance(x, det->side_right_from, det->side_right_to) <= hw ||
                   detail::point_segment_distance(x, det->side_left_from, det->side_left_to) <= hw;
          };
          for (cplx x : triple_images) ok = ok && !too_close(x);
          for (cplx s : singular_candidates) ok = ok && !too_close(s);
          for (const auto& other : placed) {
            if (!ok) break;
            const std::array<std::pair<cplx, cplx>, 2> mine{{{det->side_right_from, det->side_right_to},
                                                              {det->side_left_from, det->side_left_to}}};
            const std::array<std::pair<cplx, cplx>, 2> theirs{{{other.side_right_from, other.side_right_to},
                                                                {other.side_left_from, other.side_left_to}}};
            for (const auto& a : mine)
              for (const auto& b : theirs)
                if (detail::segment_segment_distance(a.first, a.second, b.first, b.second) <=
                    std::max(hw, other.tube_half_width))
                  ok = false;
            const double sep = wrap_positive(other.junction_start - det->junction_start);
            if (sep < det->junction_sweep + cfg.angle_step * 0.25 ||
                kTwoPi - sep < other.junction_sweep + cfg.angle_step * 0.25)
              ok = false;
          }
          if (!ok) continue;
          // sides must meet A transversally
          try {
            detail::segment_locus_hits(coincidence, LoopSegment::line(det->side_right_from, det->side_right_to, 0, true),
                                       n, cfg.path_samples, lcfg);
            detail::segment_locus_hits(coincidence, LoopSegment::line(det->side_left_from, det->side_left_to, 0, true),
                                       n, cfg.path_samples, lcfg);
          } catch (const TangencyDetected&) {
            continue;
          }
          chosen = det;
        }
      }
    }
    if (!chosen)
      throw ConstructionFailure("no admissible tube found for the double point at base image (" +
                                std::to_string(p.real()) + ", " + std::to_string(p.imag()) + ")");
    placed.push_back(*chosen);
  }

  // base point: middle of the widest stretch of C_rho free of A and of tube junctions
  std::vector<std::pair<double, double>> blocked;  // (start, sweep)
  for (double a : base_hits) blocked.emplace_back(wrap_positive(a), 0.0);
  for (const auto& d : placed) blocked.emplace_back(wrap_positive(d.junction_start), d.junction_sweep);
  double base_angle = 0.0;
  if (!blocked.empty()) {
    std::sort(blocked.begin(), blocked.end());
    double best = -1.0;
    for (std::size_t i = 0; i < blocked.size(); ++i) {
      const double end = blocked[i].first + blocked[i].second;
      const double next = i + 1 < blocked.size() ? blocked[i + 1].first : blocked[0].first + kTwoPi;
      if (next - end > best) {
        best = next - end;
        base_angle = wrap_positive(end + 0.5 * (next - end));
      }
    }
  }
  return assemble_loop(rho, base_angle, std::move(placed));
}

}  // namespace bandbraid
