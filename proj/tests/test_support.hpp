#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "bandbraid/pipeline.hpp"

namespace bandbraid::testing {

/**
 * Hausdorff distance between the double-point sheets {w1, w2} and the
 * companion-matrix roots of every G_k inside the domain; infinity if the counts differ.
 */
inline double oracle_distance(const BranchedDiskModel& model, const PerturbationParams& p,
                              const std::vector<DoublePoint>& dps) {
  std::vector<cplx> solver, oracle;
  for (const auto& dp : dps) {
    solver.push_back(dp.w1);
    solver.push_back(dp.w2);
  }
  for (int k = 1; k < model.branch_order(); ++k)
    for (cplx w : holomorphic_oracle(model, p, k))
      if (std::abs(w) < model.domain_radius()) oracle.push_back(w);
  if (solver.size() != oracle.size()) return std::numeric_limits<double>::infinity();
  auto one_sided = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (cplx x : a) {
      double best = std::numeric_limits<double>::infinity();
      for (cplx y : b) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(solver, oracle), one_sided(oracle, solver));
}

/// Integer polynomial coefficients (index = power), exact long division by a monic divisor.
inline std::vector<long long> divide_monic(std::vector<long long> a, const std::vector<long long>& b) {
  std::vector<long long> q(a.size() - b.size() + 1, 0);
  for (std::size_t i = q.size(); i-- > 0;) {
    q[i] = a[i + b.size() - 1];
    for (std::size_t j = 0; j < b.size(); ++j) a[i + j] -= q[i] * b[j];
  }
  for (long long r : a)
    if (r != 0) throw std::logic_error("inexact division");
  return q;
}

/// Cyclotomic polynomial Phi_d from t^d - 1 = prod_{e | d} Phi_e.
inline std::vector<long long> cyclotomic(int d) {
  std::vector<long long> p(static_cast<std::size_t>(d) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(d)] = 1;
  for (int e = 1; e < d; ++e)
    if (d % e == 0) p = divide_monic(p, cyclotomic(e));
  return p;
}

/**
 * Alexander polynomial of the (n, m) torus knot as the product of Phi_d over
 * d | nm with d dividing neither n nor m, recentred so exponents are symmetric.
 */
inline std::map<int, long long> torus_alexander(int n, int m) {
  std::vector<long long> prod{1};
  for (int d = 2; d <= n * m; ++d) {
    if ((n * m) % d != 0 || n % d == 0 || m % d == 0) continue;
    const auto phi = cyclotomic(d);
    std::vector<long long> next(prod.size() + phi.size() - 1, 0);
    for (std::size_t i = 0; i < prod.size(); ++i)
      for (std::size_t j = 0; j < phi.size(); ++j) next[i + j] += prod[i] * phi[j];
    prod = next;
  }
  const int shift = static_cast<int>(prod.size() - 1) / 2;
  std::map<int, long long> out;
  for (std::size_t i = 0; i < prod.size(); ++i)
    if (prod[i] != 0) out[static_cast<int>(i) - shift] = prod[i];
  return out;
}

inline BranchedDiskModel torus_model(int n, int m) { return BranchedDiskModel(n, {{1.0, m, 0}}); }

inline PerturbationParams params(cplx lambda, cplx mu = {}, cplx gamma = {}) { return {lambda, mu, gamma}; }

inline RunConfig run_config(int n, std::vector<Monomial> h, cplx lambda, cplx mu = {}) {
  RunConfig c;
  c.n = n;
  c.h = std::move(h);
  c.lambda = lambda;
  c.mu = mu;
  return c;
}

}  // namespace bandbraid::testing
