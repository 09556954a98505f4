#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bandbraid/braid_algebra.hpp"
#include "bandbraid/errors.hpp"
#include "bandbraid/loop_gamma.hpp"
#include "bandbraid/numerics.hpp"
#include "bandbraid/surface_model.hpp"

namespace bandbraid {

/// The N-th roots of z sorted by argument in [0, 2 pi).
inline std::vector<cplx> lift_fiber(cplx z, int n) {
  if (z == cplx{}) throw ZeroFiber("the fiber over the branch point is degenerate");
  if (n < 1) throw ValidationError("strand count must be positive");
  const double mod = std::pow(std::abs(z), 1.0 / n);
  const double a = numerics::arg_positive(z) / n;
  std::vector<cplx> roots;
  for (int j = 0; j < n; ++j) roots.push_back(std::polar(mod, a + kTwoPi * j / n));
  std::sort(roots.begin(), roots.end(),
            [](cplx x, cplx y) { return numerics::arg_positive(x) < numerics::arg_positive(y); });
  return roots;
}

struct TraceConfig {
  int min_steps = 4096;
  double tol_gap = 1e-9;
  double guard_band = 1e-8;
  double tol_theta = 1e-10;
  double tol_grad = 1e-6;
  double fd_step = 1e-5;
  int max_refine_depth = 40;
  double simultaneous = 1e-8;

  void validate() const {
    if (min_steps < 16) throw ValidationError("trace.min_steps must be at least 16");
    if (!(tol_gap > 0 && guard_band >= 0 && tol_theta > 0 && tol_grad > 0 && fd_step > 0 && simultaneous >= 0))
      throw ValidationError("trace tolerances must be positive");
    if (max_refine_depth < 1) throw ValidationError("trace.max_refine_depth must be positive");
  }

  TraceConfig halved() const {
    TraceConfig c = *this;
    c.min_steps *= 2;
    c.tol_theta *= 0.5;
    c.guard_band *= 0.5;
    c.fd_step *= 0.5;
    return c;
  }

  friend bool operator==(const TraceConfig&, const TraceConfig&) = default;
};

struct StrandState {
  double theta = 0.0;
  std::vector<cplx> lifts;
  std::vector<double> heights;
  std::vector<double> depths;
  std::vector<int> order;  // strand indices by decreasing height
};

struct CrossingEvent {
  double theta_star = 0.0;
  int k = 0;  // 1-based height position of the upper strand
  int sign = 0;
  SegmentKind provenance = SegmentKind::BaseArc;
  int detour = -1;
  bool outbound = false;
  std::size_t segment = 0;
  int upper_strand = 0;  // strand above before the crossing
  int lower_strand = 0;
  double im_gap = 0.0;
  double slope_gap = 0.0;
};

struct TracedBraid {
  int strand_count = 0;
  BraidWord word;
  std::vector<CrossingEvent> events;
  std::vector<int> permutation;        // from the word, on height positions
  std::vector<int> fiber_permutation;  // from matching lifts at the end of the loop, on height positions
  std::vector<int> initial_order;      // strand indices by decreasing height at theta = 0
  std::size_t evaluations = 0;
};

namespace detail {

/// Evaluates the N continuous strands of the lifted loop at any parameter.
class StrandField {
public:
  StrandField(const BranchedDiskModel& model, const PerturbationParams& params, const LoopParametrization& param)
      : n_(model.branch_order()), fiber_(fiber_polynomial(model, params)), param_(param) {
    double a = std::arg(param.segment(0).point(0.0));
    for (std::size_t s = 0; s < param.segment_count(); ++s) {
      arg_start_.push_back(a);
      a += param.segment(s).arg_change(1.0);
    }
    arg_end_ = a;
    const auto roots = lift_fiber(param.segment(0).point(0.0), n_);
    base_.assign(roots.begin(), roots.end());
    // base_[j] = root with initial argument arg_start_[0]/n + 2 pi j/n, in arg order
    offsets_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const double rel = numerics::arg_positive(roots[j] / std::polar(1.0, arg_start_[0] / n_));
      offsets_[j] = std::round(rel / (kTwoPi / n_)) * (kTwoPi / n_);
    }
  }

  int strands() const { return n_; }
  double total_arg_change() const { return arg_end_ - arg_start_[0]; }

  cplx lift(std::size_t seg, double theta, int j) const {
    const auto& s = param_.segment(seg);
    const double u = std::clamp(param_.local(seg, theta), 0.0, 1.0);
    const cplx z = s.point(u);
    const double a = arg_start_[seg] + s.arg_change(u);
    return std::polar(std::pow(std::abs(z), 1.0 / n_), a / n_ + offsets_[j]);
  }

  void heights(std::size_t seg, double theta, std::vector<double>& h, std::vector<double>* d = nullptr) const {
    h.resize(n_);
    if (d) d->resize(n_);
    for (int j = 0; j < n_; ++j) {
      const cplx v = fiber_.value(lift(seg, theta, j));
      h[j] = v.real();
      if (d) (*d)[j] = v.imag();
    }
    ++evaluations;
  }

  mutable std::size_t evaluations = 0;

private:
  int n_;
  DifferentiablePolynomial fiber_;
  const LoopParametrization& param_;
  std::vector<double> arg_start_;
  double arg_end_ = 0.0;
  std::vector<cplx> base_;
  std::vector<double> offsets_;
};

inline std::vector<int> height_order(const std::vector<double>& h) {
  std::vector<int> idx(h.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return h[a] > h[b]; });
  return idx;
}

struct Bracket {
  double lo, hi;
  int a, b;  // strand pair with d = h[a] - h[b] changing sign
};

}  // namespace detail

inline StrandState strand_state(const BranchedDiskModel& model, const PerturbationParams& params,
                                const LoopGamma& loop, double theta) {
  const LoopParametrization param(loop);
  const detail::StrandField field(model, params, param);
  const std::size_t seg = param.segment_index(theta);
  StrandState st;
  st.theta = theta;
  for (int j = 0; j < field.strands(); ++j) st.lifts.push_back(field.lift(seg, theta, j));
  field.heights(seg, theta, st.heights, &st.depths);
  st.order = detail::height_order(st.heights);
  return st;
}

/**
 * Follows the N strands over the loop, locating every height exchange of
 * strands adjacent in the height order and recording the generator with sign
 * sign(depth of the falling strand - depth of the rising strand).
 */
inline TracedBraid trace_braid(const BranchedDiskModel& model, const PerturbationParams& params, const LoopGamma& loop,
                               const TraceConfig& cfg = {}) {
  cfg.validate();
  const LoopParametrization param(loop);
  const detail::StrandField field(model, params, param);
  const int n = field.strands();
  std::vector<CrossingEvent> events;

  std::vector<double> ha, hb, hm;
  auto refine = [&](auto&& self, std::size_t seg, double lo, double hi, const std::vector<double>& h_lo,
                    const std::vector<double>& h_hi, int depth, std::vector<detail::Bracket>& out) -> void {
    std::vector<double> h_mid;
    const double mid = 0.5 * (lo + hi);
    field.heights(seg, mid, h_mid);
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      for (int b = a + 1; b < n && ok; ++b) {
        const double d0 = h_lo[a] - h_lo[b], d1 = h_hi[a] - h_hi[b], dm = h_mid[a] - h_mid[b];
        const double bend = std::abs(dm - 0.5 * (d0 + d1));
        const bool change = (d0 > 0) != (d1 > 0);
        if (!change) {
          const double m = std::min({std::abs(d0), std::abs(d1), std::abs(dm)});
          if (!(m > 4.0 * bend + cfg.guard_band)) ok = false;
          if ((dm > 0) != (d0 > 0)) ok = false;
        } else {
          if (bend > 0.25 * std::max(std::abs(d0), std::abs(d1))) ok = false;
        }
      }
    if (!ok && depth < cfg.max_refine_depth && hi - lo > cfg.tol_theta) {
      self(self, seg, lo, mid, h_lo, h_mid, depth + 1, out);
      self(self, seg, mid, hi, h_mid, h_hi, depth + 1, out);
      return;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const double d0 = h_lo[a] - h_lo[b], d1 = h_hi[a] - h_hi[b];
        if ((d0 > 0) != (d1 > 0)) {
          if (!ok) {
            // unresolved even at the finest step: strands are touching, not crossing
            throw TangencyDetected("height exchange could not be isolated near theta = " + std::to_string(lo));
          }
          out.push_back({lo, hi, a, b});
        }
      }
  };

  for (std::size_t seg = 0; seg < param.segment_count(); ++seg) {
    const double t0 = param.segment_start(seg), t1 = param.segment_end(seg);
    const int steps =
        std::max(16, static_cast<int>(std::ceil((t1 - t0) / (kTwoPi / static_cast<double>(cfg.min_steps)))));
    std::vector<detail::Bracket> brackets;
    field.heights(seg, t0, ha);
    for (int i = 1; i <= steps; ++i) {
      const double lo = t0 + (t1 - t0) * (i - 1) / steps;
      const double hi = i == steps ? t1 : t0 + (t1 - t0) * i / steps;
      field.heights(seg, hi, hb);
      refine(refine, seg, lo, hi, ha, hb, 0, brackets);
      std::swap(ha, hb);
    }

    const LoopSegment& s = param.segment(seg);
    for (const auto& br : brackets) {
      double lo = br.lo, hi = br.hi;
      auto gap = [&](double th) {
        field.heights(seg, th, hm);
        return hm[br.a] - hm[br.b];
      };
      const bool lo_positive = gap(lo) > 0;
      while (hi - lo > cfg.tol_theta) {
        const double mid = 0.5 * (lo + hi);
        if ((gap(mid) > 0) == lo_positive)
          lo = mid;
        else
          hi = mid;
      }
      const double th = 0.5 * (lo + hi);
      std::vector<double> h, dep;
      field.heights(seg, th, h, &dep);
      const int upper = lo_positive ? br.a : br.b;
      const int lower = lo_positive ? br.b : br.a;

      const double delta_lo = std::min(cfg.fd_step, th - t0), delta_hi = std::min(cfg.fd_step, t1 - th);
      std::vector<double> hp, hq;
      field.heights(seg, th + delta_hi, hp);
      field.heights(seg, th - delta_lo, hq);
      const double span = delta_hi + delta_lo;
      const double slope_upper = (hp[upper] - hq[upper]) / span;
      const double slope_lower = (hp[lower] - hq[lower]) / span;

      CrossingEvent ev;
      ev.theta_star = th;
      ev.segment = seg;
      ev.provenance = s.kind;
      ev.detour = s.detour;
      ev.outbound = s.outbound;
      ev.upper_strand = upper;
      ev.lower_strand = lower;
      ev.im_gap = dep[upper] - dep[lower];
      ev.slope_gap = slope_upper - slope_lower;
      if (std::abs(ev.im_gap) <= cfg.tol_gap)
        throw DoublePointOnLoop("the loop passes through a double point near theta = " + std::to_string(th));
      if (std::abs(ev.slope_gap) <= cfg.tol_grad)
        throw TangencyDetected("strands touch without crossing near theta = " + std::to_string(th));
      const double level = 0.5 * (h[upper] + h[lower]);
      int above = 0;
      for (int c = 0; c < n; ++c) {
        if (c == upper || c == lower) continue;
        if (std::abs(h[c] - level) <= cfg.guard_band + std::abs(h[upper] - h[lower]))
          throw TripleCoincidenceOnLoop("three strands share a height near theta = " + std::to_string(th));
        if (h[c] > level) ++above;
      }
      ev.k = above + 1;
      ev.sign = ev.im_gap > 0 ? 1 : -1;
      events.push_back(ev);
    }
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const CrossingEvent& a, const CrossingEvent& b) { return a.theta_star < b.theta_star; });
  for (std::size_t i = 0; i + 1 < events.size();) {
    std::size_t j = i + 1;
    while (j < events.size() && events[j].theta_star - events[i].theta_star <= cfg.simultaneous) ++j;
    if (j - i > 1) {
      std::sort(events.begin() + static_cast<std::ptrdiff_t>(i), events.begin() + static_cast<std::ptrdiff_t>(j),
                [](const CrossingEvent& a, const CrossingEvent& b) { return a.k < b.k; });
      for (std::size_t m = i + 1; m < j; ++m)
        if (events[m].k - events[m - 1].k < 2)
          throw TripleCoincidenceOnLoop("simultaneous crossings at adjacent positions near theta = " +
                                        std::to_string(events[i].theta_star));
    }
    i = j;
  }

  TracedBraid out;
  out.strand_count = n;
  out.word = BraidWord(n);
  for (const auto& e : events) out.word.push_back({e.k, e.sign});
  out.events = std::move(events);
  out.permutation = permutation(out.word);

  std::vector<double> h0;
  field.heights(0, 0.0, h0);
  out.initial_order = detail::height_order(h0);
  std::vector<int> pos0(n);
  for (int p = 0; p < n; ++p) pos0[out.initial_order[p]] = p;
  // strand j ends on the initial lift nearest to its continuation
  const std::size_t last = param.segment_count() - 1;
  std::vector<cplx> start(n);
  for (int j = 0; j < n; ++j) start[j] = field.lift(0, 0.0, j);
  out.fiber_permutation.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    const cplx end = field.lift(last, kTwoPi, j);
    int best = 0;
    for (int c = 1; c < n; ++c)
      if (std::abs(end - start[c]) < std::abs(end - start[best])) best = c;
    out.fiber_permutation[pos0[j]] = pos0[best];
  }
  out.evaluations = field.evaluations;
  return out;
}

inline bool monodromy_consistent(const TracedBraid& t) {
  return t.permutation == t.fiber_permutation && cycle_count(t.permutation) == 1;
}

struct DetourEvents {
  std::vector<std::size_t> arc;
  std::vector<std::size_t> outbound;
  std::vector<std::size_t> inbound;
};

struct EventClassification {
  std::vector<std::size_t> base;        // base-arc events in loop order
  std::vector<std::size_t> even_block;  // base events forming the even cluster
  std::vector<std::size_t> odd_block;
  std::vector<DetourEvents> detours;
  int block_sign = 0;
};

/**
 * Checks the block and band structure of a traced word: the base-arc events
 * form one cluster of even and one of odd generators (each generator once, all
 * of one sign), each detour arc contributes two equal letters and each tube's
 * return letters undo its outbound letters.
 */
inline EventClassification classify_events(const TracedBraid& traced, const LoopGamma& loop) {
  const int n = traced.strand_count;
  EventClassification c;
  c.detours.resize(loop.detours.size());
  for (std::size_t i = 0; i < traced.events.size(); ++i) {
    const auto& e = traced.events[i];
    switch (e.provenance) {
      case SegmentKind::BaseArc: c.base.push_back(i); break;
      case SegmentKind::DetourArc: c.detours.at(static_cast<std::size_t>(e.detour)).arc.push_back(i); break;
      case SegmentKind::TubeSide: {
        auto& d = c.detours.at(static_cast<std::size_t>(e.detour));
        (e.outbound ? d.outbound : d.inbound).push_back(i);
        break;
      }
    }
  }

  const std::size_t n_even = static_cast<std::size_t>((n - 1) / 2);
  const std::size_t n_odd = static_cast<std::size_t>(n / 2);
  if (c.base.size() != n_even + n_odd)
    throw BlockStructureFailure("expected " + std::to_string(n - 1) + " crossings on C_rho, found " +
                                std::to_string(c.base.size()));
  if (!c.base.empty()) {
    c.block_sign = traced.events[c.base[0]].sign;
    for (std::size_t i : c.base)
      if (traced.events[i].sign != c.block_sign) throw BlockStructureFailure("C_rho crossings have mixed signs");
  }
  auto is_even = [&](std::size_t i) { return traced.events[c.base[i]].k % 2 == 0; };
  bool found = c.base.empty();
  for (std::size_t r = 0; r < c.base.size() && !found; ++r) {
    bool ok = true;
    for (std::size_t m = 0; m < c.base.size() && ok; ++m) ok = is_even((r + m) % c.base.size()) == (m < n_even);
    if (!ok) continue;
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (std::size_t i : c.base) ++seen[static_cast<std::size_t>(traced.events[i].k)];
    if (!std::all_of(seen.begin() + 1, seen.end(), [](int s) { return s == 1; })) break;
    for (std::size_t m = 0; m < c.base.size(); ++m)
      (m < n_even ? c.even_block : c.odd_block).push_back(c.base[(r + m) % c.base.size()]);
    found = true;
  }
  if (!found) throw BlockStructureFailure("C_rho crossings do not split into an even and an odd cluster");

  for (std::size_t d = 0; d < c.detours.size(); ++d) {
    const auto& de = c.detours[d];
    if (de.arc.size() != 2)
      throw BlockStructureFailure("detour " + std::to_string(d) + " has " + std::to_string(de.arc.size()) +
                                  " crossings instead of 2");
    const auto& e0 = traced.events[de.arc[0]];
    const auto& e1 = traced.events[de.arc[1]];
    if (e0.k != e1.k || e0.sign != e1.sign)
      throw BlockStructureFailure("detour " + std::to_string(d) + " crossings differ");
    BraidWord tube(n);
    for (std::size_t i : de.outbound) tube.push_back({traced.events[i].k, traced.events[i].sign});
    for (std::size_t i : de.inbound) tube.push_back({traced.events[i].k, traced.events[i].sign});
    if (!free_reduce(tube).empty())
      throw BlockStructureFailure("tube " + std::to_string(d) + " letters do not cancel: " + tube.to_string());
  }
  return c;
}

enum class Regime { LambdaDominant, MuDominant, NotApplicable };

struct RegimeConfig {
  double small_ratio = 0.1;
  double large_ratio = 10.0;

  friend bool operator==(const RegimeConfig&, const RegimeConfig&) = default;
};

inline Regime classify_regime(const PerturbationParams& p, const RegimeConfig& cfg = {}) {
  if (std::abs(p.lambda) == 0.0) return Regime::MuDominant;
  const double ratio = std::abs(p.mu) / std::abs(p.lambda);
  if (ratio <= cfg.small_ratio) return Regime::LambdaDominant;
  if (ratio >= cfg.large_ratio) return Regime::MuDominant;
  return Regime::NotApplicable;
}

inline int regime_sign(Regime r) { return r == Regime::LambdaDominant ? 1 : r == Regime::MuDominant ? -1 : 0; }

/**
 * Band representation read off a classified trace. Pieces keep their loop
 * order in `layout`; `expand()` follows it so the expansion can be compared
 * with the traced word directly.
 */
struct TemplateMatch {
  BandRepresentation representation;
  BraidWord expansion;
  bool cyclically_equal = false;
};

inline TemplateMatch match_band_template(const TracedBraid& traced, const EventClassification& cls,
                                         std::span<const DoublePoint> dps, const LoopGamma& loop,
                                         int expected_sign) {
  const int n = traced.strand_count;
  if (cls.block_sign != 0 && cls.block_sign != expected_sign)
    throw TemplateMismatch("block sign " + std::to_string(cls.block_sign) + " differs from the regime sign " +
                           std::to_string(expected_sign));
  TemplateMatch m;
  BandRepresentation& rep = m.representation;
  rep.strand_count = n;
  rep.even_block = BraidWord(n);
  rep.odd_block = BraidWord(n);
  for (std::size_t i : cls.even_block) rep.even_block.push_back({traced.events[i].k, traced.events[i].sign});
  for (std::size_t i : cls.odd_block) rep.odd_block.push_back({traced.events[i].k, traced.events[i].sign});

  // pieces in loop order
  struct Item {
    double theta;
    bool band;
    std::size_t index;
  };
  std::vector<Item> items;
  for (std::size_t i : cls.base) items.push_back({traced.events[i].theta_star, false, i});
  for (std::size_t d = 0; d < cls.detours.size(); ++d) {
    const auto& de = cls.detours[d];
    const auto& e = traced.events[de.arc[0]];
    Band b;
    b.conjugator = BraidWord(n);
    for (std::size_t i : de.outbound) b.conjugator.push_back({traced.events[i].k, traced.events[i].sign});
    b.k = e.k;
    b.epsilon = e.sign;
    const int dp = loop.detours[d].double_point;
    if (dp >= 0 && static_cast<std::size_t>(dp) < dps.size() && dps[static_cast<std::size_t>(dp)].sign != b.epsilon)
      throw TemplateMismatch("detour " + std::to_string(d) + " crossing sign " + std::to_string(b.epsilon) +
                             " differs from the double-point sign " +
                             std::to_string(dps[static_cast<std::size_t>(dp)].sign));
    // the band sits where the loop leaves C_rho for this detour
    double theta = e.theta_star;
    if (!de.outbound.empty()) theta = traced.events[de.outbound.front()].theta_star;
    items.push_back({theta, true, rep.bands.size()});
    rep.bands.push_back(std::move(b));
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.theta < b.theta; });

  m.expansion = BraidWord(n);
  for (const auto& it : items) {
    if (!it.band) {
      m.expansion.push_back({traced.events[it.index].k, traced.events[it.index].sign});
      continue;
    }
    const Band& b = rep.bands[it.index];
    m.expansion = multiply(m.expansion, b.conjugator);
    m.expansion.push_back({b.k, b.epsilon});
    m.expansion.push_back({b.k, b.epsilon});
    m.expansion = multiply(m.expansion, inverse(b.conjugator));
  }
  m.cyclically_equal = cyclically_equal(m.expansion, traced.word);
  if (!m.cyclically_equal)
    throw TemplateMismatch("template " + canonical_cyclic_form(m.expansion).to_string() + " vs traced " +
                           canonical_cyclic_form(traced.word).to_string());
  return m;
}

}  // namespace bandbraid
