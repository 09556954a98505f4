#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "bandbraid/double_points.hpp"
#include "bandbraid/errors.hpp"
#include "bandbraid/numerics.hpp"
#include "bandbraid/surface_model.hpp"

namespace bandbraid {

struct LocusConfig {
  double tol_locus = 1e-8;
  double tol_grad = 1e-6;
  double tol_theta = 1e-10;
  int path_samples = 256;

  friend bool operator==(const LocusConfig&, const LocusConfig&) = default;
};

/// a_k(w) = Re G_k(w): vanishes where sheets w and nu^k w share the first three coordinates.
class CoincidenceFunction {
public:
  CoincidenceFunction(const BranchedDiskModel& model, const PerturbationParams& params, int k)
      : k_(k), g_(mismatch_polynomial(model, params, k)) {}

  int k() const noexcept { return k_; }
  double operator()(cplx w) const { return g_.value(w).real(); }
  std::array<double, 2> gradient(cplx w) const { return g_.real_gradient(w); }
  std::array<double, 3> hessian(cplx w) const { return g_.real_hessian(w); }

  /// d/dtheta a_k(w(theta)) given dw/dtheta.
  double directional(cplx w, cplx dw) const {
    const auto g = gradient(w);
    return g[0] * dw.real() + g[1] * dw.imag();
  }

private:
  int k_;
  DifferentiablePolynomial g_;
};

inline double eval_coincidence(const BranchedDiskModel& model, const PerturbationParams& params, int k, cplx w) {
  return CoincidenceFunction(model, params, k)(w);
}

struct TripleCoincidence {
  cplx w;
  int k = 0;
  int l = 0;
  cplx image_z;
};

/// Points where three sheets share a height: a_k(w) = a_l(w) = 0 for some k < l, deduplicated by base image.
inline std::vector<TripleCoincidence> find_triple_coincidences(const BranchedDiskModel& model,
                                                               const PerturbationParams& params,
                                                               const SolverConfig& cfg = {}) {
  const int n = model.branch_order();
  std::vector<TripleCoincidence> out;
  if (n < 3) return out;
  const double r0 = model.domain_radius();
  const double eps0 = cfg.exclusion_for(r0);
  for (int k = 1; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const CoincidenceFunction ak(model, params, k), al(model, params, l);
      auto system = [&](cplx w) {
        const auto gk = ak.gradient(w), gl = al.gradient(w);
        return numerics::Linearization{{ak(w), al(w)}, {{{gk[0], gk[1]}, {gl[0], gl[1]}}}};
      };
      DoublePointDiagnostics diag;
      for (cplx w : detail::multistart_roots(system, r0, cfg, diag)) {
        if (std::abs(w) <= eps0 || std::abs(w) >= r0) continue;
        const cplx z = ipow(w, n);
        const bool dup = std::any_of(out.begin(), out.end(), [&](const TripleCoincidence& t) {
          return std::abs(t.image_z - z) < cfg.tol_dedupe;
        });
        if (!dup) out.push_back({w, k, l, z});
      }
    }
  std::sort(out.begin(), out.end(), [](const TripleCoincidence& a, const TripleCoincidence& b) {
    const double aa = numerics::arg_positive(a.image_z), ab = numerics::arg_positive(b.image_z);
    if (aa != ab) return aa < ab;
    return std::abs(a.image_z) < std::abs(b.image_z);
  });
  return out;
}

struct LocusPolyline {
  int k = 1;
  std::vector<cplx> points;  // base-plane (z) coordinates
};

struct LocusSample {
  std::vector<LocusPolyline> polylines;
  std::vector<cplx> singular_candidates;  // z coordinates
  std::vector<cplx> singular_preimages;   // matching w coordinates
  double cell_size = 0.0;                 // bound on a grid cell's diameter in the z plane

  /// Distance from z to the nearest sampled locus segment.
  double distance_to(cplx z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pl : polylines) {
      for (std::size_t i = 0; i + 1 < pl.points.size(); ++i) {
        const cplx a = pl.points[i], b = pl.points[i + 1];
        const cplx ab = b - a;
        const double len2 = std::norm(ab);
        double t = len2 > 0 ? ((z - a) * std::conj(ab)).real() / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::abs(z - (a + t * ab)));
      }
      if (pl.points.size() == 1) best = std::min(best, std::abs(z - pl.points[0]));
    }
    return best;
  }
};

namespace detail {

struct GridEdge {
  // Horizontal edges join (i, j)-(i+1, j); vertical edges join (i, j)-(i, j+1).
  bool radial;
  int i, j;
  auto operator<=>(const GridEdge&) const = default;
};

}  // namespace detail

/**
 * Zero contours of every a_k (k <= N/2; the rest are rotations) by marching
 * squares over a polar grid in w, mapped to the base plane by w -> w^N.
 * Singular-point candidates are critical points of a_k found by Newton on the
 * gradient from each contour cell, kept when a_k also vanishes there.
 */
inline LocusSample sample_locus(const BranchedDiskModel& model, const PerturbationParams& params,
                                int grid_resolution, const LocusConfig& lcfg = {}) {
  if (grid_resolution < 32) throw PreconditionViolated("locus grid resolution must be at least 32");
  const int n = model.branch_order();
  const double r0 = model.domain_radius();
  const int nr = grid_resolution;
  const int na = 4 * grid_resolution;
  const double dr = r0 / nr;
  const double da = kTwoPi / na;

  LocusSample out;
  out.cell_size = n * std::pow(r0, n - 1) * std::hypot(dr, r0 * da);

  auto node_w = [&](double fi, double fj) { return std::polar(fi * dr, fj * da); };

  for (int k = 1; 2 * k <= n; ++k) {
    const CoincidenceFunction ak(model, params, k);
    std::vector<double> v((nr + 1) * na);
    auto at = [&](int i, int j) -> double& { return v[i * na + ((j % na) + na) % na]; };
    for (int i = 0; i <= nr; ++i)
      for (int j = 0; j < na; ++j) at(i, j) = ak(node_w(i, j));

    // Each contour vertex lives on a grid edge; segments are pairs of edges.
    std::map<detail::GridEdge, cplx> edge_point;
    std::vector<std::pair<detail::GridEdge, detail::GridEdge>> segments;
    auto crossing = [&](const detail::GridEdge& e) {
      auto it = edge_point.find(e);
      if (it != edge_point.end()) return;
      double fi0 = e.i, fj0 = e.j, fi1 = e.radial ? e.i + 1 : e.i, fj1 = e.radial ? e.j : e.j + 1;
      const double a = at(e.i, e.j);
      const double b = e.radial ? at(e.i + 1, e.j) : at(e.i, e.j + 1);
      const double t = a / (a - b);
      const cplx w = node_w(fi0 + t * (fi1 - fi0), fj0 + t * (fj1 - fj0));
      edge_point.emplace(e, ipow(w, n));
    };

    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < na; ++j) {
        const double c0 = at(i, j), c1 = at(i + 1, j), c2 = at(i + 1, j + 1), c3 = at(i, j + 1);
        const int mask = (c0 >= 0) | ((c1 >= 0) << 1) | ((c2 >= 0) << 2) | ((c3 >= 0) << 3);
        if (mask == 0 || mask == 15) continue;
        const int jn = (j + 1) % na;
        // Cell edges in corner order: e0 = c0-c1, e1 = c1-c2, e2 = c3-c2, e3 = c0-c3.
        const detail::GridEdge e0{true, i, j}, e1{false, i + 1, j}, e2{true, i, jn}, e3{false, i, j};
        auto add = [&](const detail::GridEdge& a, const detail::GridEdge& b) {
          crossing(a);
          crossing(b);
          segments.emplace_back(a, b);
        };
        const bool center_pos = (c0 + c1 + c2 + c3) >= 0;
        switch (mask) {
          case 1: case 14: add(e3, e0); break;
          case 2: case 13: add(e0, e1); break;
          case 3: case 12: add(e3, e1); break;
          case 4: case 11: add(e1, e2); break;
          case 6: case 9: add(e0, e2); break;
          case 7: case 8: add(e3, e2); break;
          case 5:
            if (center_pos) { add(e3, e2); add(e0, e1); } else { add(e3, e0); add(e1, e2); }
            break;
          case 10:
            if (center_pos) { add(e3, e0); add(e1, e2); } else { add(e3, e2); add(e0, e1); }
            break;
          default: break;
        }

        // critical points of a_k near this contour cell
        const cplx wc = node_w(i + 0.5, j + 0.5);
        auto grad_system = [&](cplx w) {
          const auto g = ak.gradient(w);
          const auto h = ak.hessian(w);
          return numerics::Linearization{{g[0], g[1]}, {{{h[0], h[1]}, {h[1], h[2]}}}};
        };
        const double cell_w = std::hypot(dr, (i + 1) * dr * da);
        auto crit = numerics::newton2(grad_system, wc, 30, 1e-12, 2.0 * r0, cell_w);
        if (crit && std::abs(crit->root - wc) < 2.0 * cell_w && std::abs(crit->root) > dr &&
            std::abs(crit->root) < r0 && std::abs(ak(crit->root)) < lcfg.tol_locus) {
          const cplx z = ipow(crit->root, n);
          const bool dup = std::any_of(out.singular_candidates.begin(), out.singular_candidates.end(),
                                       [&](cplx s) { return std::abs(s - z) < 1e-9; });
          if (!dup) {
            out.singular_candidates.push_back(z);
            out.singular_preimages.push_back(crit->root);
          }
        }
      }

    // Chain segments into polylines through shared edges.
    std::map<detail::GridEdge, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      incident[segments[s].first].push_back(s);
      incident[segments[s].second].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    auto extend = [&](std::vector<detail::GridEdge>& chain) {
      for (;;) {
        const auto& tail = chain.back();
        bool grown = false;
        for (std::size_t s : incident[tail]) {
          if (used[s]) continue;
          used[s] = true;
          chain.push_back(segments[s].first == tail ? segments[s].second : segments[s].first);
          grown = true;
          break;
        }
        if (!grown) return;
      }
    };
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (used[s]) continue;
      used[s] = true;
      std::vector<detail::GridEdge> forward{segments[s].first, segments[s].second};
      extend(forward);
      std::vector<detail::GridEdge> backward{segments[s].first};
      extend(backward);
      LocusPolyline pl;
      pl.k = k;
      for (auto it = backward.rbegin(); it != backward.rend(); ++it) pl.points.push_back(edge_point[*it]);
      for (std::size_t q = 1; q < forward.size(); ++q) pl.points.push_back(edge_point[forward[q]]);
      out.polylines.push_back(std::move(pl));
    }
  }
  return out;
}

/// Symmetric Hausdorff distance between the vertex sets of two samples.
inline double hausdorff_distance(const LocusSample& a, const LocusSample& b) {
  double h = 0.0;
  for (const auto& pl : a.polylines)
    for (cplx z : pl.points) h = std::max(h, b.distance_to(z));
  for (const auto& pl : b.polylines)
    for (cplx z : pl.points) h = std::max(h, a.distance_to(z));
  return h;
}

struct LocusHit {
  double theta = 0.0;
  double slope = 0.0;
};

/// Base-plane path with a continuous lift: returns (w(theta), dw/dtheta).
using LiftedPath = std::function<std::pair<cplx, cplx>(double)>;

/**
 * Parameters in [theta0, theta1] where a_k changes sign along the lifted path,
 * bisected to tol_theta, each with the slope d/dtheta a_k(w(theta)) as a
 * transversality certificate. Sample intervals that look curved enough to
 * hide a pair of crossings are subdivided before being trusted.
 */
inline std::vector<LocusHit> path_locus_intersections(const CoincidenceFunction& ak, const LiftedPath& path,
                                                      double theta0, double theta1, const LocusConfig& cfg = {}) {
  std::vector<LocusHit> hits;
  auto f = [&](double t) { return ak(path(t).first); };

  std::function<void(double, double, double, double, int)> scan = [&](double a, double b, double fa, double fb,
                                                                      int depth) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double bend = std::abs(fm - 0.5 * (fa + fb));
    const bool change_a = (fa >= 0) != (fm >= 0);
    const bool change_b = (fm >= 0) != (fb >= 0);
    const double smallest = std::min({std::abs(fa), std::abs(fm), std::abs(fb)});
    const bool safe = (!change_a && !change_b && smallest > 4.0 * bend) ||
                      ((change_a != change_b) && bend <= 0.25 * std::max(std::abs(fa), std::abs(fb)));
    if (!safe && depth < 40 && (b - a) > cfg.tol_theta) {
      scan(a, m, fa, fm, depth + 1);
      scan(m, b, fm, fb, depth + 1);
      return;
    }
    auto bisect = [&](double lo, double hi, double flo) {
      while (hi - lo > cfg.tol_theta) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((fmid >= 0) == (flo >= 0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      const double t = 0.5 * (lo + hi);
      const auto [w, dw] = path(t);
      const double slope = ak.directional(w, dw);
      if (std::abs(slope) < cfg.tol_grad)
        throw TangencyDetected("path meets the crossing locus tangentially at theta = " + std::to_string(t));
      hits.push_back({t, slope});
    };
    if (change_a) bisect(a, m, fa);
    if (change_b) bisect(m, b, fm);
  };

  const int samples = std::max(cfg.path_samples, 2);
  double prev_t = theta0, prev_f = f(theta0);
  for (int s = 1; s <= samples; ++s) {
    const double t = theta0 + (theta1 - theta0) * s / samples;
    const double ft = f(t);
    scan(prev_t, t, prev_f, ft, 0);
    prev_t = t;
    prev_f = ft;
  }
  std::sort(hits.begin(), hits.end(), [](const LocusHit& a, const LocusHit& b) { return a.theta < b.theta; });
  return hits;
}

}  // namespace bandbraid
