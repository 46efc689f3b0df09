#pragma once

// Olver's uniform-asymptotic polynomials u_r(t), v_r(t) and the coefficients
// of the logarithmic expansions
//   log(1 + sum u_r x^r)                    = sum D_r(t) x^r,
//   log(1 + sum (v_r + A t u_{r-1}) x^r)    = sum M_r(t, A) x^r,
// with x = 1/(+-nu). Exact rational arithmetic throughout; numbers appear
// only when a polynomial is evaluated.

#include "conetorsion/complex.hpp"
#include "conetorsion/special.hpp"

#include <map>
#include <mutex>
#include <vector>

namespace conetorsion {

inline constexpr int kOlverMaxOrder = 9;

class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  static RationalPolynomial constant(const Rational& v) { return RationalPolynomial({v}); }
  static RationalPolynomial monomial(int e, const Rational& v = 1) {
    std::vector<Rational> c(e + 1, Rational(0));
    c[e] = v;
    return RationalPolynomial(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  Rational coefficient(int e) const { return (e >= 0 && e < static_cast<int>(c_.size())) ? c_[e] : Rational(0); }
  std::map<int, Rational> terms() const {
    std::map<int, Rational> m;
    for (int e = 0; e < static_cast<int>(c_.size()); ++e)
      if (c_[e] != 0) m.emplace(e, c_[e]);
    return m;
  }

  RationalPolynomial derivative() const {
    std::vector<Rational> d;
    for (int e = 1; e < static_cast<int>(c_.size()); ++e) d.push_back(c_[e] * e);
    return RationalPolynomial(std::move(d));
  }
  // Antiderivative vanishing at t = 0.
  RationalPolynomial integral() const {
    std::vector<Rational> d(c_.size() + 1, Rational(0));
    for (int e = 0; e < static_cast<int>(c_.size()); ++e) d[e + 1] = c_[e] / (e + 1);
    return RationalPolynomial(std::move(d));
  }

  RationalPolynomial& operator+=(const RationalPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t e = 0; e < o.c_.size(); ++e) c_[e] += o.c_[e];
    trim();
    return *this;
  }
  RationalPolynomial& operator-=(const RationalPolynomial& o) { return *this += o * Rational(-1); }
  RationalPolynomial operator*(const RationalPolynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Rational> d(c_.size() + o.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) d[i + j] += c_[i] * o.c_[j];
    return RationalPolynomial(std::move(d));
  }
  RationalPolynomial operator*(const Rational& s) const {
    std::vector<Rational> d(c_);
    for (auto& x : d) x *= s;
    return RationalPolynomial(std::move(d));
  }
  friend RationalPolynomial operator+(RationalPolynomial a, const RationalPolynomial& b) { return a += b; }
  friend RationalPolynomial operator-(RationalPolynomial a, const RationalPolynomial& b) { return a -= b; }
  bool operator==(const RationalPolynomial& o) const { return c_ == o.c_; }

  Rational evaluate(const Rational& t) const {
    Rational r = 0;
    for (int e = degree(); e >= 0; --e) r = r * t + c_[e];
    return r;
  }
  template <class T>
  T evaluate_numeric(const T& t, int digits) const {
    T r = t * make_real(0, digits);
    for (int e = degree(); e >= 0; --e) r = r * t + make_real(c_[e], digits);
    return r;
  }

  std::string str() const {
    std::string s;
    for (int e = 0; e <= degree(); ++e) {
      if (c_[e] == 0) continue;
      if (!s.empty()) s += " + ";
      s += "(" + to_string(c_[e]) + ")";
      if (e > 0) s += "*t^" + std::to_string(e);
    }
    return s.empty() ? "0" : s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// Polynomial in t whose coefficients are polynomials in the shift A.
class ShiftPolynomial {
 public:
  ShiftPolynomial() = default;
  // coefficient of t^e is a polynomial in A
  explicit ShiftPolynomial(std::vector<RationalPolynomial> by_t) : c_(std::move(by_t)) { trim(); }
  static ShiftPolynomial from_t(const RationalPolynomial& p) {
    std::vector<RationalPolynomial> c;
    for (int e = 0; e <= p.degree(); ++e) c.push_back(RationalPolynomial::constant(p.coefficient(e)));
    return ShiftPolynomial(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  RationalPolynomial coefficient(int e) const { return (e >= 0 && e < static_cast<int>(c_.size())) ? c_[e] : RationalPolynomial(); }

  RationalPolynomial at(const Rational& a) const {
    std::vector<Rational> d;
    for (const auto& p : c_) d.push_back(p.evaluate(a));
    return RationalPolynomial(std::move(d));
  }

  ShiftPolynomial& operator+=(const ShiftPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t e = 0; e < o.c_.size(); ++e) c_[e] += o.c_[e];
    trim();
    return *this;
  }
  ShiftPolynomial operator*(const ShiftPolynomial& o) const {
    if (c_.empty() || o.c_.empty()) return {};
    std::vector<RationalPolynomial> d(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) d[i + j] += c_[i] * o.c_[j];
    return ShiftPolynomial(std::move(d));
  }
  ShiftPolynomial operator*(const Rational& s) const {
    std::vector<RationalPolynomial> d;
    for (const auto& p : c_) d.push_back(p * s);
    return ShiftPolynomial(std::move(d));
  }
  friend ShiftPolynomial operator+(ShiftPolynomial a, const ShiftPolynomial& b) { return a += b; }
  bool operator==(const ShiftPolynomial& o) const { return c_ == o.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<RationalPolynomial> c_;
};

namespace detail {

struct OlverTables {
  std::vector<RationalPolynomial> u, v, d;
  std::vector<ShiftPolynomial> m;
};

inline RationalPolynomial t_poly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.emplace_back(x);
  return RationalPolynomial(std::move(v));
}

// Coefficients of log(1 + sum_{r>=1} w_r x^r) up to x^R.
template <class P>
std::vector<P> formal_log(const std::vector<P>& w, int R) {
  std::vector<P> out(R + 1);
  for (int r = 1; r <= R; ++r) {
    P acc = w[r] * Rational(r);
    for (int j = 1; j < r; ++j) acc += out[j] * w[r - j] * Rational(-j);
    out[r] = acc * Rational(1, r);
  }
  return out;
}

inline const OlverTables& olver_tables() {
  static std::once_flag once;
  static OlverTables tables;
  std::call_once(once, [] {
    const int R = kOlverMaxOrder;
    auto& u = tables.u;
    auto& v = tables.v;
    u.push_back(RationalPolynomial::constant(1));
    v.push_back(RationalPolynomial::constant(1));
    const RationalPolynomial half_t2_1mt2 = t_poly({0, 0, 1, 0, -1}) * Rational(1, 2);
    const RationalPolynomial one_m5s2 = t_poly({1, 0, -5});
    const RationalPolynomial t_t2m1 = t_poly({0, -1, 0, 1});
    const RationalPolynomial t = t_poly({0, 1});
    for (int r = 0; r < R; ++r) {
      u.push_back(half_t2_1mt2 * u[r].derivative() + (one_m5s2 * u[r]).integral() * Rational(1, 8));
      v.push_back(u[r + 1] + t_t2m1 * (u[r] * Rational(1, 2) + t * u[r].derivative()));
    }
    std::vector<RationalPolynomial> uw(u);
    tables.d = formal_log(uw, R);
    std::vector<ShiftPolynomial> w(R + 1);
    const RationalPolynomial a_var = t_poly({0, 1});  // polynomial "A"
    for (int r = 1; r <= R; ++r) {
      ShiftPolynomial vr = ShiftPolynomial::from_t(v[r]);
      // A t u_{r-1}: coefficient of t^{e+1} is A * u_{r-1}[e]
      std::vector<RationalPolynomial> at;
      at.emplace_back();
      for (int e = 0; e <= u[r - 1].degree(); ++e) at.push_back(a_var * u[r - 1].coefficient(e));
      w[r] = vr + ShiftPolynomial(std::move(at));
    }
    tables.m = formal_log(w, R);
  });
  return tables;
}

inline void check_order(int r, int lo) {
  if (r < lo || r > kOlverMaxOrder)
    throw DomainError("olver: order " + std::to_string(r) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(kOlverMaxOrder) + "]");
}

}  // namespace detail

inline const RationalPolynomial& u_poly(int r) {
  detail::check_order(r, 0);
  return detail::olver_tables().u[r];
}
inline const RationalPolynomial& v_poly(int r) {
  detail::check_order(r, 0);
  return detail::olver_tables().v[r];
}
inline const RationalPolynomial& d_poly(int r) {
  detail::check_order(r, 1);
  return detail::olver_tables().d[r];
}
inline const ShiftPolynomial& m_poly(int r) {
  detail::check_order(r, 1);
  return detail::olver_tables().m[r];
}

// x_{r,b} and z_{r,b}(A) with D_r = sum_b x_{r,b} t^{r+2b}, M_r = sum_b z_{r,b}(A) t^{r+2b}.
struct XZCoefficients {
  int r = 0;
  std::vector<Rational> x;
  std::vector<RationalPolynomial> z;
};

inline XZCoefficients xz_coefficients(int r) {
  detail::check_order(r, 1);
  const RationalPolynomial& d = d_poly(r);
  const ShiftPolynomial& m = m_poly(r);
  for (int e = 0; e <= std::max(d.degree(), m.degree()); ++e) {
    bool in_support = e >= r && e <= 3 * r && (e - r) % 2 == 0;
    if (!in_support && (d.coefficient(e) != 0 || !m.coefficient(e).is_zero()))
      throw StructuralError("olver: exponent " + std::to_string(e) + " outside the support of order " + std::to_string(r));
  }
  XZCoefficients out;
  out.r = r;
  for (int b = 0; b <= r; ++b) {
    out.x.push_back(d.coefficient(r + 2 * b));
    out.z.push_back(m.coefficient(r + 2 * b));
  }
  return out;
}

// 2 D_r(t) - M_r(t,-A) - M_r(t,A) as a polynomial in t.
inline RationalPolynomial subtraction_poly(int r, const Rational& a) {
  return d_poly(r) * Rational(2) - m_poly(r).at(-a) - m_poly(r).at(a);
}

// sum_b (2 x_{r,b} - z_{r,b}(-A) - z_{r,b}(A)), b = 0..r.
inline Rational bracket_sum(int r, const Rational& a) {
  XZCoefficients c = xz_coefficients(r);
  Rational s = 0;
  for (int b = 0; b <= r; ++b) s += 2 * c.x[b] - c.z[b].evaluate(-a) - c.z[b].evaluate(a);
  return s;
}

// M_r(1, A) - D_r(1) + (-A)^r / r; identically zero.
inline Rational dm_defect(int r, const Rational& a) {
  return m_poly(r).at(a).evaluate(Rational(1)) - d_poly(r).evaluate(Rational(1)) + rational_pow(-a, r) / r;
}

// t_eps(lambda) = (1 - eps^2 lambda)^(-1/2), principal branch.
inline Complex t_epsilon(const BigReal& eps, const Complex& lambda, int P) {
  Complex w = Complex(make_real(1, P + 10)) - lambda.with_precision(P + 10) * (eps * eps);
  if (w.imag() == 0 && w.real() <= 0) throw BranchError("t_eps: 1 - eps^2 lambda lies on the cut");
  return (Complex(make_real(1, P + 10)) / sqrt(w)).with_precision(P);
}

// f^k_{r,eps}(lambda) = 2 D_{2r+1}(t_eps) - M_{2r+1}(t_eps,-A) - M_{2r+1}(t_eps,A).
inline Complex f_r_epsilon(int r, const Rational& a, const BigReal& eps, const Complex& lambda, int P) {
  detail::check_order(2 * r + 1, 1);
  Complex t = t_epsilon(eps, lambda, P + 10);
  return subtraction_poly(2 * r + 1, a).evaluate_numeric(t, P + 10).with_precision(P);
}

// Uniform expansions of I_nu(nu z), K_nu(nu z) truncated after `terms` terms
// (terms = 1 keeps only the leading factor). Real z > 0.
struct UniformIK {
  BigReal i, k;
};

inline UniformIK uniform_asymptotic_ik(const BigReal& nu_in, const BigReal& z_in, int terms, int P) {
  if (terms < 1 || terms > kOlverMaxOrder + 1) throw DomainError("uniform expansion: terms outside [1, 10]");
  const int wp = P + 10;
  BigReal nu = make_real(nu_in, wp), z = make_real(z_in, wp);
  BigReal root = sqrt(1 + z * z);
  BigReal t = 1 / root;
  BigReal xi = root + log(z / (1 + root));
  BigReal pref = 1 / sqrt(root);  // (1+z^2)^(-1/4)
  BigReal si = make_real(0, wp), sk = make_real(0, wp);
  BigReal nupow = make_real(1, wp);
  for (int r = 0; r < terms; ++r) {
    BigReal ur = u_poly(r).evaluate_numeric(t, wp);
    si += ur / nupow;
    sk += ((r % 2 == 0) ? ur : BigReal(-ur)) / nupow;
    nupow *= nu;
  }
  BigReal pw = pi(wp);
  UniformIK out;
  out.i = (exp(nu * xi) / sqrt(2 * pw * nu) * pref * si);
  out.k = (sqrt(pw / (2 * nu)) * exp(-nu * xi) * pref * sk);
  out.i = make_real(out.i, P);
  out.k = make_real(out.k, P);
  return out;
}

}  // namespace conetorsion
