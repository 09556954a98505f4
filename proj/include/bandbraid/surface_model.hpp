#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bandbraid/errors.hpp"

namespace bandbraid {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Single term coeff * w^deg_w * conj(w)^deg_conj.
struct Monomial {
  cplx coeff;
  int deg_w = 0;
  int deg_conj = 0;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Integer power by repeated squaring; exact for the small exponents used here.
inline cplx ipow(cplx base, int exponent) {
  cplx result{1.0, 0.0};
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

/// Unit root exp(2*pi*i*k/n), with k reduced mod n.
inline cplx unit_root(int k, int n) {
  const int r = ((k % n) + n) % n;
  const double angle = kTwoPi * static_cast<double>(r) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

/**
 * Polynomial in w and conj(w) with complex coefficients.
 *
 * Everything the pipeline evaluates (the fourth-coordinate map, the pair
 * mismatch G_k, the height coincidence a_k = Re G_k) is one of these, so
 * derivatives are exact Wirtinger derivatives rather than finite differences.
 */
class WPolynomial {
public:
  using Key = std::pair<int, int>;  // (deg_w, deg_conj)

  WPolynomial() = default;

  void add_term(cplx coeff, int deg_w, int deg_conj) {
    if (coeff == cplx{}) return;
    auto [it, inserted] = terms_.try_emplace({deg_w, deg_conj}, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == cplx{}) terms_.erase(it);
    }
  }

  const std::map<Key, cplx>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  int max_total_degree() const {
    int d = 0;
    for (const auto& [key, c] : terms_) d = std::max(d, key.first + key.second);
    return d;
  }

  cplx operator()(cplx w) const {
    if (terms_.empty()) return {};
    const int dmax = max_total_degree();
    std::vector<cplx> wp(dmax + 1), cp(dmax + 1);
    wp[0] = cp[0] = cplx{1.0, 0.0};
    const cplx wc = std::conj(w);
    for (int i = 1; i <= dmax; ++i) {
      wp[i] = wp[i - 1] * w;
      cp[i] = cp[i - 1] * wc;
    }
    cplx sum{};
    for (const auto& [key, c] : terms_) sum += c * wp[key.first] * cp[key.second];
    return sum;
  }

  /// d/dw treating conj(w) as independent.
  WPolynomial d_w() const {
    WPolynomial out;
    for (const auto& [key, c] : terms_)
      if (key.first > 0) out.add_term(c * static_cast<double>(key.first), key.first - 1, key.second);
    return out;
  }

  /// d/dconj(w) treating w as independent.
  WPolynomial d_conj() const {
    WPolynomial out;
    for (const auto& [key, c] : terms_)
      if (key.second > 0) out.add_term(c * static_cast<double>(key.second), key.first, key.second - 1);
    return out;
  }

  /// The polynomial w -> p(scale * w).
  WPolynomial composed_with_scale(cplx scale) const {
    WPolynomial out;
    for (const auto& [key, c] : terms_)
      out.add_term(c * ipow(scale, key.first) * ipow(std::conj(scale), key.second), key.first, key.second);
    return out;
  }

  WPolynomial& operator+=(const WPolynomial& other) {
    for (const auto& [key, c] : other.terms_) add_term(c, key.first, key.second);
    return *this;
  }
  WPolynomial& operator-=(const WPolynomial& other) {
    for (const auto& [key, c] : other.terms_) add_term(-c, key.first, key.second);
    return *this;
  }
  friend WPolynomial operator+(WPolynomial a, const WPolynomial& b) { return a += b; }
  friend WPolynomial operator-(WPolynomial a, const WPolynomial& b) { return a -= b; }

private:
  std::map<Key, cplx> terms_;
};

/// Values and first derivatives of a complex function of w in real coordinates w = x + iy.
struct RealDerivatives {
  cplx value;
  cplx d_x;
  cplx d_y;
};

/// Evaluates f, df/dx, df/dy using precomputed Wirtinger derivatives.
class DifferentiablePolynomial {
public:
  DifferentiablePolynomial() = default;
  explicit DifferentiablePolynomial(WPolynomial p) : f_(std::move(p)), fw_(f_.d_w()), fc_(f_.d_conj()) {}

  const WPolynomial& polynomial() const noexcept { return f_; }
  cplx value(cplx w) const { return f_(w); }

  RealDerivatives eval(cplx w) const {
    const cplx a = fw_(w);
    const cplx b = fc_(w);
    return {f_(w), a + b, cplx{0.0, 1.0} * (a - b)};
  }

  /// Gradient (d/dx, d/dy) of Re f.
  std::array<double, 2> real_gradient(cplx w) const {
    const auto d = eval(w);
    return {d.d_x.real(), d.d_y.real()};
  }

  /// Hessian [[xx, xy], [xy, yy]] of Re f.
  std::array<double, 3> real_hessian(cplx w) const {
    if (!second_) {
      fww_ = fw_.d_w();
      fwc_ = fw_.d_conj();
      fcc_ = fc_.d_conj();
      second_ = true;
    }
    const cplx ww = fww_(w), wc = fwc_(w), cc = fcc_(w);
    const double xx = (ww + 2.0 * wc + cc).real();
    const double yy = (-ww + 2.0 * wc - cc).real();
    const double xy = (cplx{0.0, 1.0} * (ww - cc)).real();
    return {xx, xy, yy};
  }

private:
  WPolynomial f_, fw_, fc_;
  mutable WPolynomial fww_, fwc_, fcc_;
  mutable bool second_ = false;
};

/// Germ F0(w) = (w^N, h(w)) with h a finite sum of monomials of total degree > N.
class BranchedDiskModel {
public:
  BranchedDiskModel(int branch_order, std::vector<Monomial> h_terms, double domain_radius = 1.0)
      : n_(branch_order), h_terms_(std::move(h_terms)), r0_(domain_radius) {
    if (n_ < 2) throw ValidationError("branch order N must be at least 2, got " + std::to_string(n_));
    if (!(r0_ > 0.0 && r0_ <= 1.0))
      throw ValidationError("domain radius must lie in (0, 1], got " + std::to_string(r0_));
    std::map<std::pair<int, int>, bool> seen;
    for (const auto& m : h_terms_) {
      if (m.deg_w < 0 || m.deg_conj < 0) throw ValidationError("monomial degrees must be nonnegative");
      if (m.coeff == cplx{}) throw ValidationError("monomial coefficients must be nonzero");
      if (m.deg_w + m.deg_conj < n_ + 1)
        throw ValidationError("monomial valuation " + std::to_string(m.deg_w + m.deg_conj) +
                              " must exceed N = " + std::to_string(n_));
      if (!seen.try_emplace({m.deg_w, m.deg_conj}, true).second)
        throw ValidationError("duplicate monomial w^" + std::to_string(m.deg_w) + " cw^" +
                              std::to_string(m.deg_conj));
    }
    for (const auto& m : h_terms_) h_.add_term(m.coeff, m.deg_w, m.deg_conj);
  }

  int branch_order() const noexcept { return n_; }
  double domain_radius() const noexcept { return r0_; }
  const std::vector<Monomial>& h_terms() const noexcept { return h_terms_; }
  const WPolynomial& h() const noexcept { return h_; }

  bool is_holomorphic() const {
    return std::all_of(h_terms_.begin(), h_terms_.end(), [](const Monomial& m) { return m.deg_conj == 0; });
  }

private:
  int n_;
  std::vector<Monomial> h_terms_;
  double r0_;
  WPolynomial h_;
};

/// Coefficients of the perturbation h + lambda w + mu conj(w) + Re(gamma w^2).
struct PerturbationParams {
  cplx lambda;
  cplx mu;
  cplx gamma;

  void validate() const {
    if (lambda == cplx{} && mu == cplx{}) throw ValidationError("lambda and mu cannot both vanish");
    const double scale = std::max(std::abs(lambda), std::abs(mu));
    if (std::abs(gamma) > 0.01 * scale * (1.0 + 1e-12))
      throw ValidationError("|gamma| must not exceed 0.01 * max(|lambda|, |mu|)");
  }
};

/// Point of R^4 = C x C; z1 spans the base plane, z2 the last two coordinates.
struct Point4 {
  cplx z1;
  cplx z2;
};

enum class Projection { Pi2, Pi3 };

/// 4x2 real matrix; columns are dF/dx and dF/dy in coordinates (Re z1, Im z1, Re z2, Im z2).
using Jacobian4x2 = std::array<std::array<double, 2>, 4>;

/// Second coordinate of F as a polynomial: h + lambda w + mu conj(w) + (gamma w^2 + conj(gamma w^2)) / 2.
inline WPolynomial fiber_polynomial(const BranchedDiskModel& model, const PerturbationParams& params) {
  WPolynomial p = model.h();
  p.add_term(params.lambda, 1, 0);
  p.add_term(params.mu, 0, 1);
  p.add_term(0.5 * params.gamma, 2, 0);
  p.add_term(0.5 * std::conj(params.gamma), 0, 2);
  return p;
}

inline cplx eval_h(const BranchedDiskModel& model, cplx w) { return model.h()(w); }

/// Evaluates F and its derivatives repeatedly for one (model, params) pair.
class SurfaceMap {
public:
  SurfaceMap(const BranchedDiskModel& model, const PerturbationParams& params)
      : n_(model.branch_order()), fiber_(fiber_polynomial(model, params)) {}

  int branch_order() const noexcept { return n_; }
  const DifferentiablePolynomial& fiber() const noexcept { return fiber_; }

  Point4 operator()(cplx w) const { return {ipow(w, n_), fiber_.value(w)}; }

  Jacobian4x2 jacobian(cplx w) const {
    const cplx base_dx = static_cast<double>(n_) * ipow(w, n_ - 1);
    const cplx base_dy = cplx{0.0, 1.0} * base_dx;
    const auto d = fiber_.eval(w);
    return {{{base_dx.real(), base_dy.real()},
             {base_dx.imag(), base_dy.imag()},
             {d.d_x.real(), d.d_y.real()},
             {d.d_x.imag(), d.d_y.imag()}}};
  }

private:
  int n_;
  DifferentiablePolynomial fiber_;
};

inline Point4 eval_F(const BranchedDiskModel& model, const PerturbationParams& params, cplx w) {
  return {ipow(w, model.branch_order()), fiber_polynomial(model, params)(w)};
}

inline Jacobian4x2 jacobian_F(const BranchedDiskModel& model, const PerturbationParams& params, cplx w) {
  return SurfaceMap(model, params).jacobian(w);
}

/// Base-plane projection pi_2.
inline cplx project_pi2(const Point4& p) { return p.z1; }

/// Projection pi_3 onto the first three real coordinates.
inline std::array<double, 3> project_pi3(const Point4& p) { return {p.z1.real(), p.z1.imag(), p.z2.real()}; }

}  // namespace bandbraid
