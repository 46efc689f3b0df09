#pragma once

// Hurwitz zeta and its s-derivative by Euler-Maclaurin summation, exact
// Bernoulli numbers, and small exact-combinatorics helpers.

#include "conetorsion/complex.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace conetorsion {

// B_0, B_1, ..., B_m as exact rationals (B_1 = -1/2). Cached process-wide.
inline Rational bernoulli(int m) {
  static std::mutex mu;
  static std::vector<Rational> cache{Rational(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= m) {
    int n = static_cast<int>(cache.size());
    // sum_{j<n} C(n+1, j) B_j + (n+1) B_n = 0
    Rational acc = 0;
    BigInt binom = 1;  // C(n+1, 0)
    for (int j = 0; j < n; ++j) {
      acc += Rational(binom) * cache[j];
      binom = binom * (n + 1 - j) / (j + 1);
    }
    cache.push_back(Rational(-acc / (n + 1)));
  }
  return cache[m];
}

inline Rational binomial(long n, long k) {
  if (k < 0 || k > n) return Rational(0);
  BigInt r = 1;
  for (long j = 0; j < k; ++j) r = r * (n - j) / (j + 1);
  return Rational(r);
}

// C(x, j) for rational x: x(x-1)...(x-j+1)/j!
inline Rational binomial(const Rational& x, long j) {
  Rational r = 1;
  for (long i = 0; i < j; ++i) r = r * (x - i) / (i + 1);
  return r;
}

inline Rational rational_pow(const Rational& x, long e) {
  if (e < 0) return rational_pow(Rational(1) / x, -e);
  Rational r = 1;
  for (long i = 0; i < e; ++i) r *= x;
  return r;
}

// Bernoulli polynomial B_m(x) at rational x.
inline Rational bernoulli_poly(int m, const Rational& x) {
  Rational r = 0;
  for (int j = 0; j <= m; ++j) r += binomial(m, j) * bernoulli(j) * rational_pow(x, m - j);
  return r;
}

// First-order jet: value and derivative in s.
struct Jet {
  Complex v, d;
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
inline Jet operator*(const Jet& a, const Jet& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Jet operator*(const Jet& a, const BigReal& c) { return {a.v * c, a.d * c}; }
inline Jet operator/(const Jet& a, const Jet& b) {
  Complex q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

// x^(-s) as a jet in s, for real x > 0.
inline Jet real_pow_neg(const BigReal& x, const Jet& s) {
  BigReal lx = log(x);
  Complex v = exp(-s.v * lx);
  return {v, -(v * s.d) * lx};
}

namespace detail {

// log10 of Johansson's remainder bound for M Bernoulli terms at cut-off N.
inline double em_bound_log10(double sabs, double sigma, double x, int M) {
  // 4 |(s)_{2M}| / (2 pi)^{2M} * x^{-sigma-2M+1} / (sigma+2M-1)
  double lp = std::log10(4.0);
  for (int j = 0; j < 2 * M; ++j) lp += std::log10(sabs + j);
  lp -= 2 * M * std::log10(2 * std::numbers::pi);
  lp += (-sigma - 2 * M + 1) * std::log10(x);
  lp -= std::log10(std::max(sigma + 2 * M - 1, 1e-300));
  return lp;
}

}  // namespace detail

// zeta_H(s, a) and d/ds zeta_H(s, a) for complex s != 1, real a > 0.
inline Jet hurwitz_zeta_jet(const Complex& s_in, const BigReal& a_in, int P) {
  check_precision(P);
  if (a_in <= 0) throw DomainError("hurwitz_zeta: a must be positive");
  if (s_in.real() == 1 && s_in.imag() == 0) throw DomainError("hurwitz_zeta: pole at s = 1");
  const double sigma = to_double(s_in.real());
  const double sabs = std::pow(10.0, log10_abs(s_in));
  const double ad = to_double(a_in);

  long N = std::max<long>(10, static_cast<long>(std::ceil(P * 0.6 + sabs)));
  int M = std::max(4, static_cast<int>(std::ceil(P * 0.6 + sabs / 2)));
  while (detail::em_bound_log10(sabs, sigma, N + ad, M) > -(P + 10.0)) {
    N += N / 2;
    if (N > 10000000) throw PrecisionError("hurwitz_zeta: Euler-Maclaurin cut-off too large");
  }
  // Cancellation among terms of size (N+a)^(1-sigma) against an O(1) result.
  int guard = 10;
  if (sigma < 1) guard += static_cast<int>(std::ceil((1 - sigma) * std::log10(N + ad + 1)));
  const int wp = P + guard;

  Complex s = s_in.with_precision(wp);
  BigReal a = make_real(a_in, wp);
  Jet sj{s, Complex(make_real(1, wp))};
  Jet sum{Complex::zero(wp), Complex::zero(wp)};
  for (long j = 0; j < N; ++j) sum = sum + real_pow_neg(a + j, sj);
  BigReal x = a + N;
  Jet xs = real_pow_neg(x, sj);  // x^-s
  Jet one{Complex(make_real(1, wp)), Complex::zero(wp)};
  Jet xc{Complex(x), Complex::zero(wp)};
  sum = sum + (xs * xc) / (sj - one);  // x^(1-s)/(s-1)
  sum = sum + xs * (make_real(1, wp) / 2);
  // sum_k B_2k/(2k)! (s)_{2k-1} x^{-s-2k+1}
  Jet rising = sj;     // (s)_1
  Jet pw = xs / xc;    // x^{-s-1}
  BigReal fact = make_real(2, wp);  // (2k)!
  BigReal x2 = x * x;
  for (int k = 1; k <= M; ++k) {
    Jet term = rising * pw * (make_real(bernoulli(2 * k), wp) / fact);
    sum = sum + term;
    // (s)_{2k+1} = (s)_{2k-1} (s+2k-1)(s+2k)
    Jet f1{s + make_real(2 * k - 1, wp), Complex(make_real(1, wp))};
    Jet f2{s + make_real(2 * k, wp), Complex(make_real(1, wp))};
    rising = rising * f1 * f2;
    pw = pw * (make_real(1, wp) / x2);
    fact *= make_real((2 * k + 1) * (2 * k + 2), wp);
  }
  return {sum.v.with_precision(P), sum.d.with_precision(P)};
}

inline Complex hurwitz_zeta(const Complex& s, const BigReal& a, int P) { return hurwitz_zeta_jet(s, a, P).v; }

inline Complex hurwitz_zeta_derivative(const Complex& s, const BigReal& a, int P) {
  return hurwitz_zeta_jet(s, a, P).d;
}

inline BigReal hurwitz_zeta(const BigReal& s, const BigReal& a, int P) {
  return hurwitz_zeta_jet(Complex(make_real(s, P + 10)), a, P).v.real();
}

}  // namespace conetorsion
