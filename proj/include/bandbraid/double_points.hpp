#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bandbraid/errors.hpp"
#include "bandbraid/numerics.hpp"
#include "bandbraid/surface_model.hpp"

namespace bandbraid {

/// Pairing of sheet w with sheet nu^k w, nu = exp(2 pi i / N).
struct SheetPairing {
  int k = 1;
  cplx nu;  // nu^k, stored for convenience

  static SheetPairing make(int k, int n) { return {k, unit_root(k, n)}; }
};

struct DoublePoint {
  cplx w1;
  cplx w2;
  SheetPairing pairing;
  Point4 image;
  int sign = 0;
  double residual = 0.0;
  double transversality_margin = 0.0;

  cplx base_image() const { return image.z1; }
};

struct SolverConfig {
  int grid_radii = 24;
  int grid_angles = 48;
  int newton_max_iter = 50;
  double tol_residual = 1e-10;
  double tol_dedupe = 1e-6;
  double tol_transverse = 1e-12;
  /// Non-positive means "1e-4 * r0".
  double exclusion_radius = 0.0;

  double exclusion_for(double r0) const { return exclusion_radius > 0.0 ? exclusion_radius : 1e-4 * r0; }

  void validate(double r0) const {
    if (grid_radii <= 0 || grid_angles <= 0 || newton_max_iter <= 0)
      throw ValidationError("solver grid sizes and iteration count must be positive");
    if (!(tol_residual > 0 && tol_dedupe > 0 && tol_transverse > 0))
      throw ValidationError("solver tolerances must be positive");
    if (!(exclusion_for(r0) < r0)) throw ValidationError("exclusion radius must be smaller than r0");
  }

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// The polynomial G_k(w) = F(w)_2 - F(nu^k w)_2; its zeros are double-point preimage pairs.
inline WPolynomial mismatch_polynomial(const BranchedDiskModel& model, const PerturbationParams& params, int k) {
  const WPolynomial p = fiber_polynomial(model, params);
  return p - p.composed_with_scale(unit_root(k, model.branch_order()));
}

inline cplx pair_mismatch(const BranchedDiskModel& model, const PerturbationParams& params, int k, cplx w) {
  return mismatch_polynomial(model, params, k)(w);
}

/// Signed determinant of the two stacked tangent frames [J1 | J2].
inline double stacked_determinant(const Jacobian4x2& j1, const Jacobian4x2& j2) {
  std::array<std::array<double, 4>, 4> m{};
  for (int r = 0; r < 4; ++r) m[r] = {j1[r][0], j1[r][1], j2[r][0], j2[r][1]};
  return numerics::det4(m);
}

/// Intersection sign of two oriented tangent planes; throws if they are not transverse.
inline int intersection_sign(const Jacobian4x2& j1, const Jacobian4x2& j2, double tol_transverse,
                             double* margin = nullptr) {
  const double det = stacked_determinant(j1, j2);
  if (margin) *margin = std::abs(det);
  if (!(std::abs(det) > tol_transverse))
    throw GenericityFailure("tangent planes are not transverse (|det| = " + std::to_string(std::abs(det)) + ")");
  return det > 0 ? 1 : -1;
}

inline int double_point_sign(const BranchedDiskModel& model, const PerturbationParams& params, DoublePoint& dp,
                             double tol_transverse = SolverConfig{}.tol_transverse) {
  const SurfaceMap f(model, params);
  dp.sign = intersection_sign(f.jacobian(dp.w1), f.jacobian(dp.w2), tol_transverse, &dp.transversality_margin);
  return dp.sign;
}

/**
 * Intersection sign recomputed from the base-plane frame (u, v, e3, e4), where u
 * spans the direction along which the two sheets keep equal third coordinate
 * (the tangent of the crossing locus) and v = i u. In that frame the lifted
 * frames are (1,0,a,g), (0,1,b,d) and (1,0,a,g'), (0,1,b',d'), and the
 * determinant collapses to -(b - b')(g - g').
 */
inline int sign_via_tangent_basis(const BranchedDiskModel& model, const PerturbationParams& params,
                                  const DoublePoint& dp) {
  const SurfaceMap f(model, params);
  struct Lifted {
    Eigen::RowVector2d third, fourth;
  };
  auto lift_rows = [&](cplx w) {
    const Jacobian4x2 j = f.jacobian(w);
    Eigen::Matrix2d base;
    base << j[0][0], j[0][1], j[1][0], j[1][1];
    const Eigen::Matrix2d inv = base.inverse();
    Lifted out;
    out.third = Eigen::RowVector2d(j[2][0], j[2][1]) * inv;
    out.fourth = Eigen::RowVector2d(j[3][0], j[3][1]) * inv;
    return out;
  };
  const Lifted s0 = lift_rows(dp.w1);
  const Lifted s1 = lift_rows(dp.w2);
  const Eigen::RowVector2d diff = s0.third - s1.third;
  if (diff.norm() == 0.0) throw GenericityFailure("projected tangent planes coincide");
  const Eigen::Vector2d u = Eigen::Vector2d(-diff[1], diff[0]).normalized();
  const Eigen::Vector2d v(-u[1], u[0]);
  const double beta0 = s0.third * v, beta1 = s1.third * v;
  const double gamma0 = s0.fourth * u, gamma1 = s1.fourth * u;
  const double det = -(beta0 - beta1) * (gamma0 - gamma1);
  if (det == 0.0) throw GenericityFailure("degenerate frame determinant");
  return det > 0 ? 1 : -1;
}

struct DoublePointDiagnostics {
  int seeds = 0;
  int converged = 0;
  int nonconverged = 0;
  int branch_point_hits = 0;
  int outside_domain = 0;
};

struct DoublePointSet {
  std::vector<DoublePoint> points;
  DoublePointDiagnostics diagnostics;
};

namespace detail {

/// Canonical unordered representative: k <= N - k, ties broken by smaller arg(w1) in [0, 2pi).
inline std::pair<cplx, int> canonical_pair(cplx w1, int k, int n) {
  const int kk = ((k % n) + n) % n;
  const cplx w2 = unit_root(kk, n) * w1;
  if (kk < n - kk) return {w1, kk};
  if (kk > n - kk) return {w2, n - kk};
  return numerics::arg_positive(w1) <= numerics::arg_positive(w2) ? std::pair{w1, kk} : std::pair{w2, kk};
}

template <class Residual>
std::vector<cplx> multistart_roots(const Residual& system, double r0, const SolverConfig& cfg,
                                   DoublePointDiagnostics& diag) {
  std::vector<cplx> roots;
  for (int i = 0; i < cfg.grid_radii; ++i) {
    const double r = r0 * (static_cast<double>(i) + 0.5) / cfg.grid_radii;
    for (int j = 0; j < cfg.grid_angles; ++j) {
      const double a = kTwoPi * (static_cast<double>(j) + 0.5) / cfg.grid_angles;
      ++diag.seeds;
      auto res = numerics::newton2(system, std::polar(r, a), cfg.newton_max_iter, cfg.tol_residual, 2.0 * r0,
                                   0.25 * r0);
      if (!res) {
        ++diag.nonconverged;
        continue;
      }
      ++diag.converged;
      roots.push_back(res->root);
    }
  }
  return roots;
}

inline numerics::Linearization complex_linearization(const DifferentiablePolynomial& g, cplx w) {
  const auto d = g.eval(w);
  return {{d.value.real(), d.value.imag()}, {{{d.d_x.real(), d.d_y.real()}, {d.d_x.imag(), d.d_y.imag()}}}};
}

}  // namespace detail

/**
 * All double points with eps0 < |w1| < r0 as unordered, canonically oriented
 * pairs, with signs and transversality margins filled in. Never throws on
 * non-transverse roots; use find_double_points for the checked variant.
 */
inline DoublePointSet find_double_point_candidates(const BranchedDiskModel& model, const PerturbationParams& params,
                                                   const SolverConfig& cfg = {}) {
  params.validate();
  const double r0 = model.domain_radius();
  cfg.validate(r0);
  const int n = model.branch_order();
  const double eps0 = cfg.exclusion_for(r0);
  const SurfaceMap f(model, params);

  DoublePointSet out;
  for (int k = 1; 2 * k <= n; ++k) {
    const DifferentiablePolynomial g(mismatch_polynomial(model, params, k));
    auto system = [&](cplx w) { return detail::complex_linearization(g, w); };
    std::vector<cplx> found;
    for (cplx w : detail::multistart_roots(system, r0, cfg, out.diagnostics)) {
      if (std::abs(w) <= eps0) {
        ++out.diagnostics.branch_point_hits;
        continue;
      }
      if (std::abs(w) >= r0 || std::abs(unit_root(k, n) * w) >= r0) {
        ++out.diagnostics.outside_domain;
        continue;
      }
      const cplx rep = detail::canonical_pair(w, k, n).first;
      const bool dup = std::any_of(found.begin(), found.end(),
                                   [&](cplx other) { return std::abs(other - rep) < cfg.tol_dedupe; });
      if (!dup) found.push_back(rep);
    }
    for (cplx w1 : found) {
      DoublePoint dp;
      dp.w1 = w1;
      dp.pairing = SheetPairing::make(k, n);
      dp.w2 = dp.pairing.nu * w1;
      const Point4 a = f(dp.w1), b = f(dp.w2);
      dp.image = {0.5 * (a.z1 + b.z1), 0.5 * (a.z2 + b.z2)};
      dp.residual = std::hypot(std::abs(a.z1 - b.z1), std::abs(a.z2 - b.z2));
      const double det = stacked_determinant(f.jacobian(dp.w1), f.jacobian(dp.w2));
      dp.transversality_margin = std::abs(det);
      dp.sign = det > 0 ? 1 : (det < 0 ? -1 : 0);
      out.points.push_back(dp);
    }
  }
  std::sort(out.points.begin(), out.points.end(), [](const DoublePoint& a, const DoublePoint& b) {
    if (a.pairing.k != b.pairing.k) return a.pairing.k < b.pairing.k;
    const double aa = numerics::arg_positive(a.w1), ab = numerics::arg_positive(b.w1);
    if (aa != ab) return aa < ab;
    return std::abs(a.w1) < std::abs(b.w1);
  });
  return out;
}

/// Checked variant: throws GenericityFailure if any root is not a transverse double point.
inline DoublePointSet find_double_points(const BranchedDiskModel& model, const PerturbationParams& params,
                                         const SolverConfig& cfg = {}) {
  DoublePointSet set = find_double_point_candidates(model, params, cfg);
  for (const auto& dp : set.points) {
    if (dp.residual > cfg.tol_residual)
      throw GenericityFailure("double point residual " + std::to_string(dp.residual) + " above tolerance");
    if (!(dp.transversality_margin > cfg.tol_transverse))
      throw GenericityFailure("double point at w = (" + std::to_string(dp.w1.real()) + ", " +
                              std::to_string(dp.w1.imag()) + ") is not transverse");
  }
  return set;
}

struct GenericityReport {
  bool transverse = true;
  bool distinct_images = true;
  bool avoids_triple_coincidences = true;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_image_separation = std::numeric_limits<double>::infinity();
  double min_triple_distance = std::numeric_limits<double>::infinity();
  std::vector<std::string> failures;

  bool passed() const { return transverse && distinct_images && avoids_triple_coincidences; }
};

/**
 * Numerical surrogate for genericity: transverse double points, pairwise distinct
 * base images (so no triple points), and no base image on a triple-coincidence
 * point of the projection to the first three coordinates.
 */
inline GenericityReport check_genericity(std::span<const DoublePoint> dps, std::span<const cplx> triple_images,
                                         const SolverConfig& cfg = {}) {
  GenericityReport rep;
  for (const auto& dp : dps) {
    rep.min_margin = std::min(rep.min_margin, dp.transversality_margin);
    if (!(dp.transversality_margin > cfg.tol_transverse)) {
      rep.transverse = false;
      rep.failures.push_back("non-transverse double point at base image " + std::to_string(dp.image.z1.real()) +
                             "," + std::to_string(dp.image.z1.imag()));
    }
  }
  for (std::size_t i = 0; i < dps.size(); ++i)
    for (std::size_t j = i + 1; j < dps.size(); ++j) {
      const double d = std::abs(dps[i].image.z1 - dps[j].image.z1);
      rep.min_image_separation = std::min(rep.min_image_separation, d);
      if (d <= cfg.tol_dedupe) rep.distinct_images = false;
    }
  if (!rep.distinct_images) rep.failures.push_back("two double points share a base image");
  for (const auto& dp : dps)
    for (cplx x : triple_images) {
      const double d = std::abs(dp.image.z1 - x);
      rep.min_triple_distance = std::min(rep.min_triple_distance, d);
      if (d <= cfg.tol_dedupe) rep.avoids_triple_coincidences = false;
    }
  if (!rep.avoids_triple_coincidences) rep.failures.push_back("a double point projects onto a triple coincidence");
  return rep;
}

/**
 * Independent root oracle for holomorphic configurations: G_k(w)/w is a
 * univariate polynomial whose roots are the companion-matrix eigenvalues.
 * All nonzero roots are returned, unfiltered by the domain radius.
 */
inline std::vector<cplx> holomorphic_oracle(const BranchedDiskModel& model, const PerturbationParams& params, int k) {
  if (!model.is_holomorphic() || params.mu != cplx{} || params.gamma != cplx{})
    throw PreconditionViolated("holomorphic oracle requires mu = 0, gamma = 0 and no conj(w) terms");
  const int n = model.branch_order();
  const cplx nu = unit_root(k, n);
  // coefficients of G_k(w) / w, index = power
  std::vector<cplx> c(1, params.lambda * (1.0 - nu));
  for (const auto& m : model.h_terms()) {
    const std::size_t idx = static_cast<std::size_t>(m.deg_w - 1);
    if (c.size() <= idx) c.resize(idx + 1);
    c[idx] += m.coeff * (1.0 - ipow(nu, m.deg_w));
  }
  double scale = 0.0;
  for (cplx x : c) scale = std::max(scale, std::abs(x));
  while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg <= 0) return {};

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NonConvergence("companion eigenvalue solve failed");

  auto poly = [&](cplx w, cplx& deriv) {
    cplx v = c[deg];
    deriv = 0.0;
    for (int i = deg - 1; i >= 0; --i) {
      deriv = deriv * w + v;
      v = v * w + c[i];
    }
    return v;
  };
  std::vector<cplx> roots;
  for (int i = 0; i < deg; ++i) {
    cplx w = solver.eigenvalues()[i];
    for (int it = 0; it < 8; ++it) {  // polish on the univariate polynomial
      cplx d;
      const cplx v = poly(w, d);
      if (d == cplx{}) break;
      w -= v / d;
    }
    if (std::abs(w) > 1e-12) roots.push_back(w);
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return numerics::arg_positive(a) < numerics::arg_positive(b);
  });
  return roots;
}

}  // namespace bandbraid
