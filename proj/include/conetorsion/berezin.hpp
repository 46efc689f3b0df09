#pragma once

// Secondary class B of a conformally collared boundary: a small exact
// algebra on Lambda T*N (x) hat-Lambda T*N, the Berezin integral, and the
// u-integral of the transgression form.

#include "conetorsion/spectrum.hpp"

#include <array>
#include <bit>
#include <map>
#include <string>
#include <vector>

namespace conetorsion {

// Polynomial in kappa (curvature), f'(0), u and rho = pi^(-1/2) with exact
// rational coefficients.
class ScalePoly {
 public:
  enum Var { kappa = 0, fprime = 1, u = 2, rho = 3 };
  using Exponents = std::array<int, 4>;

  ScalePoly() = default;
  explicit ScalePoly(const Rational& c) {
    if (c != 0) terms_[Exponents{0, 0, 0, 0}] = c;
  }
  static ScalePoly monomial(const Rational& c, Exponents e) {
    ScalePoly p;
    if (c != 0) p.terms_[e] = c;
    return p;
  }
  static ScalePoly variable(Var v) {
    Exponents e{0, 0, 0, 0};
    e[v] = 1;
    return monomial(Rational(1), e);
  }

  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponents, Rational>& terms() const { return terms_; }

  ScalePoly& operator+=(const ScalePoly& o) {
    for (const auto& [e, c] : o.terms_) {
      Rational& t = terms_[e];
      t += c;
      if (t == 0) terms_.erase(e);
    }
    return *this;
  }
  friend ScalePoly operator+(ScalePoly a, const ScalePoly& b) { return a += b; }
  friend ScalePoly operator*(const ScalePoly& a, const ScalePoly& b) {
    ScalePoly out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e;
        for (int i = 0; i < 4; ++i) e[i] = ea[i] + eb[i];
        out += monomial(ca * cb, e);
      }
    return out;
  }
  friend ScalePoly operator*(const ScalePoly& a, const Rational& c) { return a * ScalePoly(c); }
  bool operator==(const ScalePoly& o) const { return terms_ == o.terms_; }

  // Term-by-term -int_0^1 du/u: u^m -> -1/m. Requires m >= 1 throughout.
  ScalePoly integrate_du_over_u() const {
    ScalePoly out;
    for (const auto& [e, c] : terms_) {
      if (e[u] < 1) throw StructuralError("berezin: u-integral of a term without a positive u power");
      Exponents f = e;
      f[u] = 0;
      out += monomial(-c / e[u], f);
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    static const char* names[4] = {"kappa", "f'(0)", "u", "pi^(-1/2)"};
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += conetorsion::to_string(c);
      for (int i = 0; i < 4; ++i)
        if (e[i]) s += "*" + std::string(names[i]) + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
    }
    return s;
  }

 private:
  std::map<Exponents, Rational> terms_;
};

// Element of Lambda T*N (x) hat-Lambda T*N with the graded tensor product
// sign rule. A basis monomial is a pair of index sets (bit masks) stored in
// the order form-part then hatted part.
class GradedElement {
 public:
  using Key = std::pair<unsigned, unsigned>;

  GradedElement() = default;
  static GradedElement scalar(const ScalePoly& c) {
    GradedElement g;
    if (!c.is_zero()) g.terms_[{0u, 0u}] = c;
    return g;
  }
  // e*_{i_1} ^ ... (x) hat e*_{j_1} ^ ..., indices 1-based, in the given order.
  static GradedElement basis(const std::vector<int>& form, const std::vector<int>& hat, const ScalePoly& c) {
    GradedElement g = scalar(c);
    for (int i : form) g = g * generator(i, false);
    GradedElement h = scalar(ScalePoly(Rational(1)));
    for (int j : hat) h = h * generator(j, true);
    return g * h;
  }
  static GradedElement from_key(Key k, const ScalePoly& c) {
    GradedElement g;
    if (!c.is_zero()) g.terms_[k] = c;
    return g;
  }
  static GradedElement generator(int index, bool hatted) {
    if (index < 1 || index > 31) throw DomainError("graded element: index outside [1, 31]");
    GradedElement g;
    unsigned bit = 1u << (index - 1);
    g.terms_[hatted ? Key{0u, bit} : Key{bit, 0u}] = ScalePoly(Rational(1));
    return g;
  }

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, ScalePoly>& terms() const { return terms_; }

  GradedElement& operator+=(const GradedElement& o) {
    for (const auto& [k, c] : o.terms_) {
      ScalePoly& t = terms_[k];
      t += c;
      if (t.is_zero()) terms_.erase(k);
    }
    return *this;
  }
  friend GradedElement operator+(GradedElement a, const GradedElement& b) { return a += b; }
  friend GradedElement operator*(const GradedElement& a, const ScalePoly& c) {
    GradedElement out;
    for (const auto& [k, v] : a.terms_) {
      ScalePoly p = v * c;
      if (!p.is_zero()) out.terms_[k] = p;
    }
    return out;
  }
  friend GradedElement operator*(const GradedElement& a, const GradedElement& b) {
    GradedElement out;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        if ((ka.first & kb.first) || (ka.second & kb.second)) continue;
        int sign = merge_sign(ka.first, kb.first) * merge_sign(ka.second, kb.second);
        // move the form part of b past the hatted part of a
        if ((std::popcount(ka.second) * std::popcount(kb.first)) % 2) sign = -sign;
        out += from_key({ka.first | kb.first, ka.second | kb.second}, ca * cb * Rational(sign));
      }
    return out;
  }
  bool operator==(const GradedElement& o) const { return terms_ == o.terms_; }

  // Keep only hatted degree d.
  GradedElement hatted_degree(int d) const {
    GradedElement out;
    for (const auto& [k, c] : terms_)
      if (std::popcount(k.second) == d) out.terms_[k] = c;
    return out;
  }

  // exp of an element with nilpotent even part, truncated when powers vanish.
  GradedElement exp_nilpotent(int max_terms = 64) const {
    for (const auto& [k, c] : terms_)
      if ((std::popcount(k.first) + std::popcount(k.second)) % 2)
        throw DomainError("exp_nilpotent: element is not even");
    GradedElement out = scalar(ScalePoly(Rational(1)));
    GradedElement pw = out;
    for (int p = 1; p <= max_terms; ++p) {
      pw = pw * *this * ScalePoly(Rational(1, p));
      if (pw.is_zero()) return out;
      out += pw;
    }
    throw StructuralError("exp_nilpotent: powers did not vanish");
  }

 private:
  // sign of sorting the concatenation of the sorted sets a then b
  static int merge_sign(unsigned a, unsigned b) {
    int inv = 0;
    for (unsigned bb = b; bb; bb &= bb - 1) {
      unsigned lowest = bb & (~bb + 1);
      inv += std::popcount(a & ~((lowest << 1) - 1));  // elements of a above this element of b
    }
    return inv % 2 ? -1 : 1;
  }

  std::map<Key, ScalePoly> terms_;
};

// Berezin integral: coefficient of hat e*_1 ^ ... ^ hat e*_n times
// (-1)^(n(n+1)/2) pi^(-n/2); a pure form.
inline GradedElement berezin(const GradedElement& elt, int n) {
  if (n < 1 || n > 31) throw DomainError("berezin: dimension outside [1, 31]");
  const unsigned top = (1u << n) - 1;
  ScalePoly beta = ScalePoly::monomial(Rational((n * (n + 1) / 2) % 2 ? -1 : 1), {0, 0, 0, n});
  GradedElement out;
  for (const auto& [k, c] : elt.terms())
    if (k.second == top) out += GradedElement::from_key({k.first, 0u}, c * beta);
  return out;
}

// Collar metric s f(x) (dx^2 + g) near the boundary, f(0) = 1, with g of
// constant sectional curvature kappa.
struct CollarMetric {
  int n = 1;
  Rational kappa = 1;
  Rational fprime0 = -2;
  Rational scale = 1;
};

// Q(sqrt d): a + b sqrt(d), d a fixed positive rational.
struct QuadraticSurd {
  Rational a, b, d = 1;

  QuadraticSurd normalized() const {
    // fold b into a when d is a perfect square
    BigInt num = numerator(d), den = denominator(d);
    BigInt rn = sqrt(num), rd = sqrt(den);
    if (rn * rn == num && rd * rd == den) return {a + b * Rational(rn, rd), Rational(0), Rational(1)};
    return *this;
  }
  friend QuadraticSurd operator*(const QuadraticSurd& x, const QuadraticSurd& y) {
    Rational d = x.b == 0 ? y.d : x.d;
    if (x.b != 0 && y.b != 0 && x.d != y.d) throw DomainError("quadratic surd: mismatched radicands");
    return QuadraticSurd{x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d}.normalized();
  }
  friend QuadraticSurd operator+(const QuadraticSurd& x, const QuadraticSurd& y) {
    Rational d = x.b == 0 ? y.d : x.d;
    if (x.b != 0 && y.b != 0 && x.d != y.d) throw DomainError("quadratic surd: mismatched radicands");
    return QuadraticSurd{x.a + y.a, x.b + y.b, d}.normalized();
  }
  bool operator==(const QuadraticSurd& o) const {
    QuadraticSurd p = normalized(), q = o.normalized();
    return p.a == q.a && p.b == q.b && (p.b == 0 || p.d == q.d);
  }
  BigReal value(int digits) const {
    const int wp = digits + 5;
    return make_real(make_real(a, wp) + make_real(b, wp) * sqrt(make_real(d, wp)), digits);
  }
  std::string to_string() const {
    QuadraticSurd p = normalized();
    if (p.b == 0) return conetorsion::to_string(p.a);
    return conetorsion::to_string(p.a) + " + " + conetorsion::to_string(p.b) + "*sqrt(" + conetorsion::to_string(p.d) + ")";
  }
};

// coeff * pi^(half_pi_power / 2), coeff in Q(sqrt s).
struct SurdPiMultiple {
  QuadraticSurd coeff;
  int half_pi_power = 0;
  BigReal value(int digits) const {
    const int wp = digits + 5;
    BigReal p = pow(pi(wp), make_real(half_pi_power, wp) / 2);
    return make_real(coeff.value(wp) * p, digits);
  }
};

namespace detail {

inline void check_collar(const CollarMetric& cm) {
  if (cm.n < 1 || cm.n % 2 == 0 || cm.n > 15) throw DomainError("collar metric: n must be odd and at most 15");
  if (!(cm.scale > 0)) throw DomainError("collar metric: scale must be positive");
}

inline ScalePoly gamma_half_factor(int k) {
  // 1 / (2 Gamma(k/2 + 1))
  if (k % 2 == 0) {
    Rational f = 1;
    for (int i = 2; i <= k / 2; ++i) f *= i;
    return ScalePoly(Rational(1) / (2 * f));
  }
  // Gamma(j + 3/2) = (2j+2)! / (4^(j+1) (j+1)!) sqrt(pi), k = 2j+1
  const int j = (k - 1) / 2;
  Rational num = 1, den = 1;
  for (int i = 2; i <= 2 * j + 2; ++i) den *= i;
  for (int i = 2; i <= j + 1; ++i) num *= i;
  for (int i = 0; i <= j; ++i) num *= 4;
  return ScalePoly::monomial(num / (2 * den), {0, 0, 0, 1});
}

}  // namespace detail

// S-dot = (1/4) f'(0) sum_k e*_k ^ hat e*_k, in the symbolic scale variables.
inline GradedElement s_dot_symbolic(int n) {
  GradedElement s;
  ScalePoly c = ScalePoly::variable(ScalePoly::fprime) * Rational(1, 4);
  for (int k = 1; k <= n; ++k) s += GradedElement::basis({k}, {k}, c);
  return s;
}

// R-dot for constant curvature: kappa sum_{a<b} (e*_a ^ e*_b) (x) (hat e*_a ^ hat e*_b).
inline GradedElement r_dot_symbolic(int n) {
  GradedElement r;
  ScalePoly c = ScalePoly::variable(ScalePoly::kappa);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) r += GradedElement::basis({a, b}, {a, b}, c);
  return r;
}

inline GradedElement s_dot(const CollarMetric& cm) {
  detail::check_collar(cm);
  GradedElement out;
  if (cm.fprime0 == 0) return out;
  for (int k = 1; k <= cm.n; ++k) out += GradedElement::basis({k}, {k}, ScalePoly(cm.fprime0 / 4));
  return out;
}

inline GradedElement r_dot(const CollarMetric& cm) {
  detail::check_collar(cm);
  if (cm.kappa == 0 || cm.n == 1) return GradedElement();
  GradedElement out;
  for (int a = 1; a <= cm.n; ++a)
    for (int b = a + 1; b <= cm.n; ++b) out += GradedElement::basis({a, b}, {a, b}, ScalePoly(cm.kappa));
  return out;
}

// B as a multiple of the volume form: -int_0^1 du/u Berezin[exp(-R/2 - u^2 S^2) sum_k (u S)^k / (2 Gamma(k/2+1))],
// symbolic in kappa, f'(0) and pi^(-1/2).
inline ScalePoly b_class_symbolic(int n) {
  if (n < 1 || n % 2 == 0 || n > 15) throw DomainError("b_class: n must be odd and at most 15");
  GradedElement S = s_dot_symbolic(n), R = r_dot_symbolic(n);
  ScalePoly u = ScalePoly::variable(ScalePoly::u);
  GradedElement X = R * ScalePoly(Rational(-1, 2)) + S * S * (u * u * ScalePoly(Rational(-1)));
  GradedElement E = X.exp_nilpotent();
  GradedElement series;
  GradedElement uS = S * u;
  GradedElement pw = GradedElement::scalar(ScalePoly(Rational(1)));
  for (int k = 1; k <= n; ++k) {
    pw = pw * uS;
    series += pw * detail::gamma_half_factor(k);
  }
  GradedElement integrand = berezin(E * series, n);
  const unsigned top = (1u << n) - 1;
  ScalePoly coeff;
  for (const auto& [k, c] : integrand.terms()) {
    if (k.second != 0) throw StructuralError("b_class: Berezin integral left a hatted factor");
    if (k.first != top) throw StructuralError("b_class: non-top form degree survived");
    coeff += c;
  }
  return coeff.integrate_du_over_u();
}

// Exact b_class: value = coeff * pi^(-(n+1)/2) in Q(sqrt(scale)), relative
// to the volume form of s g.
inline SurdPiMultiple b_class_exact(const CollarMetric& cm) {
  detail::check_collar(cm);
  ScalePoly sym = b_class_symbolic(cm.n);
  QuadraticSurd total{Rational(0), Rational(0), cm.scale};
  int rho_power = -1;
  for (const auto& [e, c] : sym.terms()) {
    if (rho_power >= 0 && e[ScalePoly::rho] != rho_power)
      throw StructuralError("b_class: inhomogeneous power of pi");
    rho_power = e[ScalePoly::rho];
    // kappa_eff = kappa / s, c_eff = f'(0) / sqrt(s)
    const int ka = e[ScalePoly::kappa], fb = e[ScalePoly::fprime];
    Rational r = c * rational_pow(cm.kappa / cm.scale, ka) * rational_pow(cm.fprime0, fb);
    QuadraticSurd term;
    if (fb % 2 == 0) {
      term = {r * rational_pow(Rational(1) / cm.scale, fb / 2), Rational(0), cm.scale};
    } else {
      // s^(-fb/2) = s^(-(fb+1)/2) sqrt(s)
      term = {Rational(0), r * rational_pow(Rational(1) / cm.scale, (fb + 1) / 2), cm.scale};
    }
    total = total + term;
  }
  if (rho_power < 0) rho_power = cm.n + 1;
  return {total.normalized(), -rho_power};
}

inline BigReal b_class(const CollarMetric& cm, int digits = 50) { return b_class_exact(cm).value(digits); }

// Volume of (N, s g) given the volume of (N, g).
inline SurdPiMultiple scaled_volume(const PiMultiple& vol, int n, const Rational& s) {
  // s^(n/2) = s^((n-1)/2) sqrt(s), n odd
  return {QuadraticSurd{Rational(0), vol.coeff * rational_pow(s, (n - 1) / 2), s}.normalized(), vol.half_pi_power};
}

inline SurdPiMultiple multiply(const SurdPiMultiple& x, const SurdPiMultiple& y) {
  return {x.coeff * y.coeff, x.half_pi_power + y.half_pi_power};
}

// int_N B for the collar metric; requires a base of known volume.
inline SurdPiMultiple integrated_b_class(const CollarMetric& cm, const PiMultiple& base_volume) {
  return multiply(b_class_exact(cm), scaled_volume(base_volume, cm.n, cm.scale));
}

// The collar of the cone at x = 1 (f(y) = e^(-2y)).
inline CollarMetric cone_collar_at_one(const BaseManifold& m) {
  auto kappa = m.curvature();
  if (!kappa) throw UnsupportedError("b_class: curvature of the base is not known");
  return {m.dimension(), *kappa, Rational(-2), Rational(1)};
}

// The collar at x = eps (f(z) = eps^2 e^(2z)).
inline CollarMetric cone_collar_at_eps(const BaseManifold& m, const Rational& eps) {
  auto kappa = m.curvature();
  if (!kappa) throw UnsupportedError("b_class: curvature of the base is not known");
  if (!(eps > 0 && eps < 1)) throw DomainError("cone collar: eps must lie in (0,1)");
  return {m.dimension(), *kappa, Rational(2), eps * eps};
}

struct AnomalySides {
  SurdPiMultiple at_one, at_eps;  // int_N B_1, int_N B_eps
  bool antisymmetric = false;
};

inline AnomalySides anomaly_sides(const BaseManifold& m, const Rational& eps) {
  auto vol = m.volume();
  if (!vol) throw UnsupportedError("anomaly_sides: volume of the base is not known");
  AnomalySides out;
  out.at_one = integrated_b_class(cone_collar_at_one(m), *vol);
  out.at_eps = integrated_b_class(cone_collar_at_eps(m, eps), *vol);
  QuadraticSurd neg{-out.at_eps.coeff.a, -out.at_eps.coeff.b, out.at_eps.coeff.d};
  out.antisymmetric = out.at_one.half_pi_power == out.at_eps.half_pi_power && out.at_one.coeff == neg;
  return out;
}

// int_N B(g^N) := B_1, the anomaly side per unit rank.
inline SurdPiMultiple integrated_b(const BaseManifold& m) {
  auto vol = m.volume();
  if (!vol) throw UnsupportedError("integrated_b: volume of the base is not known");
  return integrated_b_class(cone_collar_at_one(m), *vol);
}

// Expanded terms of the symbolic class, for documentation dumps.
struct BClassTerm {
  int kappa_power = 0, fprime_power = 0;
  Rational coefficient;
  int half_pi_power = 0;
};

inline std::vector<BClassTerm> b_class_terms(int n) {
  std::vector<BClassTerm> out;
  const ScalePoly sym = b_class_symbolic(n);
  for (const auto& [e, c] : sym.terms())
    out.push_back({e[ScalePoly::kappa], e[ScalePoly::fprime], c, -e[ScalePoly::rho]});
  return out;
}

}  // namespace conetorsion
