#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bandbraid/errors.hpp"

namespace bandbraid {

/// sigma_k^exponent with exponent +1 or -1.
struct Letter {
  int k = 1;
  int exponent = 1;

  Letter inverse() const { return {k, -exponent}; }
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

inline bool commute(const Letter& a, const Letter& b) { return std::abs(a.k - b.k) >= 2; }

class BraidWord {
public:
  BraidWord() = default;
  explicit BraidWord(int strands, std::vector<Letter> letters = {}) : n_(strands), letters_(std::move(letters)) {
    if (n_ < 1) throw ValidationError("strand count must be at least 1");
    for (const auto& l : letters_) check(l);
  }

  int strand_count() const noexcept { return n_; }
  const std::vector<Letter>& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  void push_back(Letter l) {
    check(l);
    letters_.push_back(l);
  }

  /// Whitespace-separated tokens `s<k>` or `s<k>^-1`.
  static BraidWord parse(std::string_view text, int strands) {
    std::vector<Letter> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) {
      throw ParseError(1, static_cast<int>(i) + 1, msg);
    };
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
        continue;
      }
      if (text[i] != 's') fail("expected 's'");
      ++i;
      const std::size_t digits = i;
      long k = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        k = k * 10 + (text[i] - '0');
        if (k > 1'000'000) fail("generator index too large");
        ++i;
      }
      if (i == digits) fail("expected generator index");
      int exponent = 1;
      if (i < text.size() && text[i] == '^') {
        if (text.substr(i, 3) != "^-1") fail("only the exponent ^-1 is allowed");
        exponent = -1;
        i += 3;
      }
      if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) fail("unexpected character");
      out.push_back({static_cast<int>(k), exponent});
    }
    return BraidWord(strands, std::move(out));
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i) s += ' ';
      s += 's' + std::to_string(letters_[i].k);
      if (letters_[i].exponent < 0) s += "^-1";
    }
    return s;
  }

  friend bool operator==(const BraidWord&, const BraidWord&) = default;

private:
  void check(const Letter& l) const {
    if (l.k < 1 || l.k > n_ - 1)
      throw ValidationError("generator s" + std::to_string(l.k) + " out of range for " + std::to_string(n_) +
                            " strands");
    if (l.exponent != 1 && l.exponent != -1) throw ValidationError("letter exponents must be +1 or -1");
  }

  int n_ = 1;
  std::vector<Letter> letters_;
};

inline BraidWord multiply(const BraidWord& u, const BraidWord& v) {
  if (u.strand_count() != v.strand_count()) throw StrandMismatch("words act on different strand counts");
  std::vector<Letter> out = u.letters();
  out.insert(out.end(), v.letters().begin(), v.letters().end());
  return BraidWord(u.strand_count(), std::move(out));
}

inline BraidWord inverse(const BraidWord& u) {
  std::vector<Letter> out;
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it) out.push_back(it->inverse());
  return BraidWord(u.strand_count(), std::move(out));
}

inline BraidWord free_reduce(const BraidWord& u) {
  std::vector<Letter> stack;
  for (const auto& l : u.letters()) {
    if (!stack.empty() && stack.back() == l.inverse())
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return BraidWord(u.strand_count(), std::move(stack));
}

inline int exponent_sum(const BraidWord& u) {
  int s = 0;
  for (const auto& l : u.letters()) s += l.exponent;
  return s;
}

/// perm[i] = final position (0-based) of the strand starting at position i.
inline std::vector<int> permutation(const BraidWord& u) {
  std::vector<int> at(u.strand_count());  // at[pos] = strand currently at pos
  std::iota(at.begin(), at.end(), 0);
  for (const auto& l : u.letters()) std::swap(at[l.k - 1], at[l.k]);
  std::vector<int> perm(u.strand_count());
  for (int pos = 0; pos < u.strand_count(); ++pos) perm[at[pos]] = pos;
  return perm;
}

inline int cycle_count(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
  }
  return cycles;
}

inline int closure_components(const BraidWord& u) { return cycle_count(permutation(u)); }

// ---------------------------------------------------------------------------
// Laurent polynomials with overflow-checked int64 coefficients

namespace detail {
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw NonUnitRemainder("integer overflow in Laurent arithmetic");
  return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw NonUnitRemainder("integer overflow in Laurent arithmetic");
  return r;
}
}  // namespace detail

class LaurentPolynomial {
public:
  LaurentPolynomial() = default;
  LaurentPolynomial(std::int64_t constant) { add(0, constant); }  // NOLINT(implicit)
  static LaurentPolynomial monomial(std::int64_t coeff, int exponent) {
    LaurentPolynomial p;
    p.add(exponent, coeff);
    return p;
  }
  static LaurentPolynomial t(int exponent = 1) { return monomial(1, exponent); }

  const std::map<int, std::int64_t>& coefficients() const noexcept { return c_; }
  bool is_zero() const noexcept { return c_.empty(); }
  int min_degree() const { return c_.begin()->first; }
  int max_degree() const { return c_.rbegin()->first; }
  std::int64_t coeff(int e) const {
    auto it = c_.find(e);
    return it == c_.end() ? 0 : it->second;
  }

  void add(int exponent, std::int64_t coeff) {
    if (coeff == 0) return;
    auto [it, inserted] = c_.try_emplace(exponent, coeff);
    if (!inserted) {
      it->second = detail::checked_add(it->second, coeff);
      if (it->second == 0) c_.erase(it);
    }
  }

  LaurentPolynomial& operator+=(const LaurentPolynomial& o) {
    for (const auto& [e, c] : o.c_) add(e, c);
    return *this;
  }
  LaurentPolynomial& operator-=(const LaurentPolynomial& o) {
    for (const auto& [e, c] : o.c_) add(e, detail::checked_mul(c, -1));
    return *this;
  }
  friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial& b) { return a += b; }
  friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial& b) { return a -= b; }
  friend LaurentPolynomial operator-(const LaurentPolynomial& a) { return LaurentPolynomial{} - a; }
  friend LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    LaurentPolynomial r;
    for (const auto& [ea, ca] : a.c_)
      for (const auto& [eb, cb] : b.c_) r.add(ea + eb, detail::checked_mul(ca, cb));
    return r;
  }
  friend bool operator==(const LaurentPolynomial&, const LaurentPolynomial&) = default;

  /// Exact quotient a / b; throws NonUnitRemainder if b does not divide a.
  friend LaurentPolynomial exact_divide(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    if (b.is_zero()) throw NonUnitRemainder("division by the zero polynomial");
    LaurentPolynomial q, rem = a;
    if (rem.is_zero()) return q;
    const int floor = a.min_degree() - b.min_degree();
    const std::int64_t lead = b.c_.rbegin()->second;
    while (!rem.is_zero()) {
      const int shift = rem.max_degree() - b.max_degree();
      const std::int64_t top = rem.c_.rbegin()->second;
      if (shift < floor || top % lead != 0) throw NonUnitRemainder("inexact Laurent division");
      const LaurentPolynomial term = monomial(top / lead, shift);
      q += term;
      rem -= term * b;
    }
    return q;
  }

  /// Laurent polynomial p(1/t).
  LaurentPolynomial mirrored() const {
    LaurentPolynomial r;
    for (const auto& [e, c] : c_) r.add(-e, c);
    return r;
  }

  /// Unit multiple +-t^j with a centered exponent window and positive lowest coefficient.
  LaurentPolynomial normalized() const {
    if (is_zero()) return {};
    const int span = max_degree() - min_degree();
    const int shift = -span / 2 - min_degree();
    const std::int64_t sign = c_.begin()->second > 0 ? 1 : -1;
    LaurentPolynomial r;
    for (const auto& [e, c] : c_) r.add(e + shift, c * sign);
    return r;
  }

  bool is_symmetric() const { return *this == mirrored(); }

  double evaluate(double t) const {
    double s = 0.0;
    for (const auto& [e, c] : c_) s += static_cast<double>(c) * std::pow(t, e);
    return s;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : c_) {
      std::int64_t mag = c < 0 ? -c : c;
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      first = false;
      if (e == 0) {
        os << mag;
        continue;
      }
      if (mag != 1) os << mag << '*';
      os << 't';
      if (e != 1) os << '^' << e;
    }
    return os.str();
  }

private:
  std::map<int, std::int64_t> c_;
};

using LaurentMatrix = std::vector<std::vector<LaurentPolynomial>>;

inline LaurentMatrix identity_matrix(int n) {
  LaurentMatrix m(n, std::vector<LaurentPolynomial>(n));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b) {
  const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), inner = b.size();
  LaurentMatrix r(n, std::vector<LaurentPolynomial>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

/// Fraction-free (Bareiss) determinant; every division is exact.
inline LaurentPolynomial determinant(LaurentMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  LaurentPolynomial prev = 1;
  std::int64_t sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t p = k + 1;
      while (p < n && m[p][k].is_zero()) ++p;
      if (p == n) return {};
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = exact_divide(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
      m[i][k] = {};
    }
    prev = m[k][k];
  }
  return sign < 0 ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

/// Reduced Burau matrix of one letter: identity outside rows/columns k-1..k+1.
inline LaurentMatrix burau_generator(int strands, Letter l) {
  const int dim = strands - 1;
  LaurentMatrix m = identity_matrix(dim);
  const LaurentPolynomial t = LaurentPolynomial::t();
  const LaurentPolynomial ti = LaurentPolynomial::t(-1);
  LaurentPolynomial block[3][3];
  if (l.exponent > 0) {
    block[0][0] = 1, block[0][1] = t;
    block[1][1] = -t;
    block[2][1] = 1, block[2][2] = 1;
  } else {
    block[0][0] = 1, block[0][1] = 1;
    block[1][1] = -ti;
    block[2][1] = ti, block[2][2] = 1;
  }
  const int c = l.k - 1;  // 0-based row of the -t entry
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int r = c - 1 + a, s = c - 1 + b;
      if (r < 0 || s < 0 || r >= dim || s >= dim) continue;
      m[r][s] = block[a][b];
    }
  return m;
}

inline LaurentMatrix reduced_burau(const BraidWord& u) {
  LaurentMatrix m = identity_matrix(u.strand_count() - 1);
  for (const auto& l : u.letters()) m = multiply(m, burau_generator(u.strand_count(), l));
  return m;
}

/// Alexander polynomial of the closure, up to units, in normalized form.
inline LaurentPolynomial alexander_of_closure(const BraidWord& u) {
  if (closure_components(u) != 1) throw NotAKnot("closure has " + std::to_string(closure_components(u)) + " components");
  const int n = u.strand_count();
  LaurentMatrix m = reduced_burau(u);
  for (int i = 0; i < n - 1; ++i) m[i][i] -= 1;
  const LaurentPolynomial num = determinant(std::move(m)) * (LaurentPolynomial(1) - LaurentPolynomial::t());
  const LaurentPolynomial den = LaurentPolynomial(1) - LaurentPolynomial::t(n);
  return exact_divide(num, den).normalized();
}

// ---------------------------------------------------------------------------
// Words modulo free reduction and commutation of distant generators

/// Cancels s s^-1 pairs whose letters in between all commute with s, to a fixed point.
inline BraidWord reduce_with_commutation(const BraidWord& u) {
  std::vector<Letter> w = free_reduce(u).letters();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < w.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        if (w[j] == w[i].inverse()) {
          w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
          w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
        if (!commute(w[i], w[j])) break;
      }
  }
  return BraidWord(u.strand_count(), std::move(w));
}

/// Lexicographic normal form: repeatedly take the smallest letter that commutes with everything before it.
inline BraidWord commutation_normal_form(const BraidWord& u) {
  std::vector<Letter> rest = u.letters(), out;
  while (!rest.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rest.size(); ++i) {
      bool movable = true;
      for (std::size_t j = 0; j < i && movable; ++j) movable = commute(rest[i], rest[j]);
      if (movable && rest[i] < rest[best]) best = i;
    }
    out.push_back(rest[best]);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return BraidWord(u.strand_count(), std::move(out));
}

inline BraidWord rotate(const BraidWord& u, std::size_t r) {
  std::vector<Letter> w = u.letters();
  if (!w.empty()) std::rotate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r % w.size()), w.end());
  return BraidWord(u.strand_count(), std::move(w));
}

/// Cyclically reduced representative: no cancellation possible after any rotation.
inline BraidWord cyclic_reduce(const BraidWord& u) {
  BraidWord w = reduce_with_commutation(u);
  bool changed = true;
  while (changed && !w.empty()) {
    changed = false;
    for (std::size_t r = 1; r < w.size(); ++r) {
      BraidWord c = reduce_with_commutation(rotate(w, r));
      if (c.size() < w.size()) {
        w = std::move(c);
        changed = true;
        break;
      }
    }
  }
  return w;
}

/**
 * Canonical representative of the conjugacy class of a word modulo free
 * reduction and distant commutation: the smallest normal form reachable by
 * moving a letter that can come first to the end.
 */
inline BraidWord canonical_cyclic_form(const BraidWord& u, std::size_t max_states = 200000) {
  const BraidWord start = commutation_normal_form(cyclic_reduce(u));
  std::set<std::vector<Letter>> seen{start.letters()};
  std::vector<std::vector<Letter>> queue{start.letters()};
  for (std::size_t head = 0; head < queue.size() && seen.size() < max_states; ++head) {
    const std::vector<Letter> w = queue[head];
    for (std::size_t i = 0; i < w.size(); ++i) {
      bool movable = true;
      for (std::size_t j = 0; j < i && movable; ++j) movable = commute(w[i], w[j]);
      if (!movable) continue;
      std::vector<Letter> next = w;
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
      next.push_back(w[i]);
      auto nf = commutation_normal_form(BraidWord(u.strand_count(), std::move(next))).letters();
      if (seen.insert(nf).second) queue.push_back(std::move(nf));
    }
  }
  return BraidWord(u.strand_count(), *seen.begin());
}

inline bool cyclically_equal(const BraidWord& a, const BraidWord& b) {
  if (a.strand_count() != b.strand_count()) throw StrandMismatch("words act on different strand counts");
  return canonical_cyclic_form(a) == canonical_cyclic_form(b);
}

// ---------------------------------------------------------------------------
// Band representations

struct Band {
  BraidWord conjugator;
  int k = 1;
  int epsilon = 1;
};

struct BandRepresentation {
  int strand_count = 1;
  BraidWord even_block;
  BraidWord odd_block;
  std::vector<Band> bands;

  /// even_block . odd_block . prod b_i s_{k_i}^{2 eps_i} b_i^-1
  BraidWord expand() const {
    BraidWord w = multiply(even_block, odd_block);
    for (const auto& b : bands) {
      const Letter l{b.k, b.epsilon};
      w = multiply(w, b.conjugator);
      w.push_back(l);
      w.push_back(l);
      w = multiply(w, inverse(b.conjugator));
    }
    return w;
  }
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct BandSurface {
  int euler_characteristic = 0;
  std::optional<Rational> genus;  // only when the closure is a knot
};

inline BandSurface band_euler_characteristic(const BandRepresentation& rep) {
  BandSurface s;
  s.euler_characteristic = rep.strand_count - static_cast<int>(rep.even_block.size() + rep.odd_block.size() +
                                                               2 * rep.bands.size());
  if (closure_components(rep.expand()) == 1) {
    Rational g{1 - s.euler_characteristic, 2};
    const std::int64_t d = std::gcd(g.num, g.den);
    if (d > 1) g = {g.num / d, g.den / d};
    s.genus = g;
  }
  return s;
}

}  // namespace bandbraid
