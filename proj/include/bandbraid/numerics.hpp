#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace bandbraid::numerics {

/// Residual vector and Jacobian of a map R^2 -> R^2, with w = x + iy as the unknown.
struct Linearization {
  std::array<double, 2> value;
  std::array<std::array<double, 2>, 2> jacobian;  // rows = equations, cols = (x, y)
};

struct NewtonResult {
  std::complex<double> root;
  double residual = 0.0;
  int iterations = 0;
};

/**
 * Newton iteration for a 2x2 real system with an SVD solve, so rank-deficient
 * Jacobians (continua of roots) still give a minimum-norm step. Returns nothing
 * if the iterate leaves |w| <= escape_radius or the residual stays above tol.
 */
template <class System>
std::optional<NewtonResult> newton2(const System& system, std::complex<double> seed, int max_iter, double tol,
                                    double escape_radius, double max_step) {
  std::complex<double> w = seed;
  double residual = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Linearization lin = system(w);
    residual = std::hypot(lin.value[0], lin.value[1]);
    Eigen::Matrix2d J;
    J << lin.jacobian[0][0], lin.jacobian[0][1], lin.jacobian[1][0], lin.jacobian[1][1];
    Eigen::Vector2d f(lin.value[0], lin.value[1]);
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-13);
    Eigen::Vector2d step = -svd.solve(f);
    if (!step.allFinite()) return std::nullopt;
    double len = step.norm();
    if (len > max_step) {
      step *= max_step / len;
      len = max_step;
    }
    w += std::complex<double>(step[0], step[1]);
    if (std::abs(w) > escape_radius) return std::nullopt;
    if (len <= 1e-15 * (1.0 + std::abs(w))) {
      const Linearization fin = system(w);
      residual = std::hypot(fin.value[0], fin.value[1]);
      return residual <= tol ? std::optional<NewtonResult>(NewtonResult{w, residual, it + 1}) : std::nullopt;
    }
  }
  const Linearization fin = system(w);
  residual = std::hypot(fin.value[0], fin.value[1]);
  if (residual <= tol) return NewtonResult{w, residual, max_iter};
  return std::nullopt;
}

inline double det4(const std::array<std::array<double, 4>, 4>& m) {
  Eigen::Matrix4d a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = m[r][c];
  return a.determinant();
}

/// Principal argument mapped to [0, 2pi).
inline double arg_positive(std::complex<double> z) {
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * 3.14159265358979323846;
  return a;
}

}  // namespace bandbraid::numerics
