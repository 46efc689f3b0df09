#pragma once

// Modified Bessel functions I_nu, K_nu and their derivatives for real
// nu >= 0 and complex z with Re z >= 0, z != 0.
//
// Routes:
//  * Hankel expansion for large |z|. It is used when the DLMF 10.40.10 error
//    bound, 2 chi(l) exp(chi(1)|nu^2-1/4|/|z|) |a_l(nu)| / |z|^l, falls below
//    10^-(P+8) for some admissible l >= max(1, nu-1/2). I_nu carries the
//    recessive e^{-z} term with the sector-dependent connection coefficient
//    (the Stokes average on the real axis), so the formula is uniform up to
//    |arg z| = pi/2.
//  * Ascending series otherwise. K_nu is built from I_{-nu} - I_nu, or from the
//    logarithmic series at integer order. Cancellation is measured after the
//    fact (largest term against the result) and the sum is redone with more
//    guard digits when the first pass lost too many.
//
// Large-order uniform expansions live in olver.hpp; here large orders go
// through the series with guard digits, which stays exact at any order.

#include "conetorsion/complex.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace conetorsion {

struct BesselIK {
  Complex i, ip, k, kp;
};

namespace detail {

struct SeriesResult {
  Complex value;
  Complex deriv;
  double log10_max = -1e300;
};

inline void note_mag(double& m, const Complex& t) {
  double v = log10_abs(t);
  if (v > m) m = v;
}

// sum_k (z/2)^(mu+2k) / (k! Gamma(mu+k+1)); mu real and not a negative integer.
inline SeriesResult ascending_i(const BigReal& mu_in, const Complex& z, int wp) {
  BigReal mu = make_real(mu_in, wp);
  Complex half = z / make_real(2, wp);
  Complex q = half * half;
  Complex t = (mu == 0) ? Complex(make_real(1, wp)) : pow(half, mu);
  t /= gamma_fn(mu + 1, wp);
  SeriesResult r;
  r.value = t;
  r.deriv = t * mu;
  note_mag(r.log10_max, t);
  double qabs = std::pow(10.0, log10_abs(q));
  double mud = to_double(mu);
  for (long k = 0;; ++k) {
    BigReal denom = make_real(k + 1, wp) * (mu + (k + 1));
    t *= q;
    t /= denom;
    r.value += t;
    r.deriv += t * (mu + 2 * (k + 1));
    double lt = log10_abs(t);
    if (lt > r.log10_max) r.log10_max = lt;
    double kk = static_cast<double>(k + 1);
    bool decreasing = kk * (kk + mud) > 2.0 * qabs && kk + mud > 0;
    if (decreasing && (t.is_zero() || lt < r.log10_max - wp - 2)) break;
    if (k > 200000) throw PrecisionError("bessel: ascending series did not converge");
  }
  r.deriv /= z;
  return r;
}

// K_m for integer m >= 0 from the logarithmic series (DLMF 10.31.1).
inline SeriesResult k_integer_series(long m, const Complex& z, int wp) {
  Complex half = z / make_real(2, wp);
  Complex q = half * half;
  SeriesResult r;
  r.value = Complex::zero(wp);
  r.deriv = Complex::zero(wp);
  if (m > 0) {
    // (1/2)(z/2)^-m sum_{k<m} (m-k-1)!/k! (-q)^k
    Complex base = pow(half, make_real(-m, wp)) / make_real(2, wp);
    BigReal fact = make_real(1, wp);
    for (long j = 2; j <= m - 1; ++j) fact *= j;  // (m-1)!
    Complex mq = -q;
    Complex pw(make_real(1, wp));
    for (long k = 0; k < m; ++k) {
      Complex t = base * pw * fact;
      r.value += t;
      r.deriv += t * make_real(-m + 2 * k, wp);
      note_mag(r.log10_max, t);
      if (k + 1 < m) {
        pw *= mq;
        fact /= make_real(k + 1, wp) * (m - k - 1);
      }
    }
    r.deriv /= z;
  }
  SeriesResult im = ascending_i(make_real(m, wp), z, wp);
  Complex lg = log(half);
  Complex sgn(make_real((m % 2 == 0) ? -1 : 1, wp));
  Complex p2 = sgn * lg * im.value;
  r.value += p2;
  r.deriv += sgn * (im.value / z + lg * im.deriv);
  note_mag(r.log10_max, p2);
  r.log10_max = std::max(r.log10_max, im.log10_max + log10_abs(lg));

  // (-1)^m (1/2) sum_k (psi(k+1)+psi(m+k+1)) (z/2)^(m+2k) / (k!(m+k)!)
  BigReal gamma_e = euler_gamma(wp);
  BigReal hk = make_real(0, wp), hmk = make_real(0, wp);
  for (long j = 1; j <= m; ++j) hmk += make_real(1, wp) / j;
  BigReal mfact = make_real(1, wp);
  for (long j = 2; j <= m; ++j) mfact *= j;
  Complex t = (m == 0 ? Complex(make_real(1, wp)) : pow(half, make_real(m, wp))) / mfact;
  Complex s3 = Complex::zero(wp), d3 = Complex::zero(wp);
  double s3max = -1e300;
  double qabs = std::pow(10.0, log10_abs(q));
  for (long k = 0;; ++k) {
    BigReal w = hk + hmk - 2 * gamma_e;
    Complex term = t * w;
    s3 += term;
    d3 += term * make_real(m + 2 * k, wp);
    double lt = log10_abs(term);
    if (lt > s3max) s3max = lt;
    double kk = static_cast<double>(k + 1);
    bool decreasing = kk * (kk + m) > 2.0 * qabs;
    if (decreasing && k > 2 && lt < s3max - wp - 2) break;
    t *= q;
    t /= make_real(k + 1, wp) * (m + k + 1);
    hk += make_real(1, wp) / (k + 1);
    hmk += make_real(1, wp) / (m + k + 1);
    if (k > 200000) throw PrecisionError("bessel: logarithmic series did not converge");
  }
  BigReal c3 = make_real((m % 2 == 0) ? 1 : -1, wp) / 2;
  r.value += s3 * c3;
  r.deriv += d3 * c3 / z;
  r.log10_max = std::max(r.log10_max, s3max);
  return r;
}

inline bool is_integer(const BigReal& x) { return x == floor(x); }

inline SeriesResult k_series(const BigReal& nu, const Complex& z, int wp) {
  if (is_integer(nu)) return k_integer_series(nu.convert_to<long>(), z, wp);
  BigReal nuw = make_real(nu, wp);
  SeriesResult a = ascending_i(-nuw, z, wp);
  SeriesResult b = ascending_i(nuw, z, wp);
  BigReal c = pi(wp) / (2 * sin(nuw * pi(wp)));
  SeriesResult r;
  r.value = (a.value - b.value) * c;
  r.deriv = (a.deriv - b.deriv) * c;
  r.log10_max = std::max(a.log10_max, b.log10_max) + log10_abs(c);
  return r;
}

struct HankelPlan {
  long terms = -1;   // -1: expansion not usable at this precision
  int guard = 0;     // digits lost to the largest term
};

// Terms needed for |remainder| <= 10^target_log10, plus the cancellation guard.
inline HankelPlan hankel_plan(double nu, double zabs, double target_log10) {
  const double ln10 = std::log(10.0);
  double nu2 = std::fabs(nu * nu - 0.25);
  double pref = std::log10(2.0) + (std::numbers::pi / 2.0) * nu2 / zabs / ln10;
  double log_a = 0.0;  // log10 |a_l|
  double biggest = 0.0;
  long lmin = std::max<long>(1, static_cast<long>(std::ceil(nu - 0.5)));
  long lmax = static_cast<long>(4.0 * (zabs + nu)) + 60;
  HankelPlan plan;
  for (long l = 1; l <= lmax; ++l) {
    double f = 4.0 * nu * nu - (2.0 * l - 1) * (2.0 * l - 1);
    if (f == 0.0) {  // terminating expansion, exact
      plan.terms = l;
      break;
    }
    log_a += std::log10(std::fabs(f)) - std::log10(8.0 * l);
    biggest = std::max(biggest, log_a - l * std::log10(zabs));
    if (l < lmin) continue;
    double chi = std::log10(std::sqrt(std::numbers::pi)) + (std::lgamma(l / 2.0 + 1) - std::lgamma(l / 2.0 + 0.5)) / ln10;
    double bound = pref + chi + log_a - l * std::log10(zabs);
    if (bound <= target_log10 - biggest) {
      plan.terms = l;
      break;
    }
    if (l > 2 * nu + 4 && bound > 0.0) break;
  }
  // Heavy cancellation means the series route is the better tool.
  if (plan.terms > 0 && biggest > 12.0) plan.terms = -1;
  plan.guard = static_cast<int>(std::ceil(biggest));
  return plan;
}

// sum_{k<terms} s^k a_k(nu) w^-k and its w-derivative; s = +1 or -1.
inline void hankel_sum(const BigReal& nu, const Complex& w, int s, long terms, int wp, Complex& S, Complex& dS) {
  BigReal mu = 4 * nu * nu;
  Complex winv = make_real(1, wp) / w;
  Complex t(make_real(1, wp));
  S = t;
  dS = Complex::zero(wp);
  for (long k = 0; k + 1 < terms; ++k) {
    BigReal f = (mu - make_real((2 * k + 1) * (2 * k + 1), wp)) / (8 * (k + 1));
    if (f == 0) break;
    t *= winv;
    t *= f * s;
    S += t;
    dS -= t * winv * make_real(k + 1, wp);
  }
}

inline BesselIK hankel_ik(const BigReal& nu_in, const Complex& z_in, long terms, int wp) {
  BigReal nu = make_real(nu_in, wp);
  Complex z = z_in.with_precision(wp);
  BigReal pw = pi(wp);
  Complex sq = sqrt(z);
  Complex ez = exp(z), emz = exp(-z);
  Complex Sp, dSp, Sm, dSm;
  hankel_sum(nu, z, +1, terms, wp, Sp, dSp);
  hankel_sum(nu, z, -1, terms, wp, Sm, dSm);
  Complex inv2z = make_real(1, wp) / (2 * z);
  BesselIK r;
  // K = sqrt(pi/2) z^-1/2 e^-z S+
  BigReal ck = sqrt(pw / 2);
  r.k = ck * emz * Sp / sq;
  r.kp = ck * emz * (dSp - Sp - Sp * inv2z) / sq;
  // I = (2 pi)^-1/2 z^-1/2 [e^z S- + c e^-z S+]
  Complex c;
  BigReal nupi = nu * pw;
  if (z.imag() > 0) {
    c = Complex(-sin(nupi), cos(nupi));  // i e^{i nu pi}
  } else if (z.imag() < 0) {
    c = Complex(-sin(nupi), -cos(nupi));  // -i e^{-i nu pi}
  } else {
    c = Complex(-sin(nupi), make_real(0, wp));
  }
  BigReal ci = 1 / sqrt(2 * pw);
  r.i = ci * (ez * Sm + c * emz * Sp) / sq;
  r.ip = ci * (ez * (dSm + Sm - Sm * inv2z) + c * emz * (dSp - Sp - Sp * inv2z)) / sq;
  return r;
}

inline void check_args(const BigReal& nu, const Complex& z, int P) {
  check_precision(P);
  if (nu < 0) throw DomainError("bessel: negative order");
  if (z.is_zero()) throw DomainError("bessel: z = 0");
  if (z.real() < 0) throw DomainError("bessel: Re z < 0 is outside the supported sector");
}

}  // namespace detail

// I_nu, I'_nu, K_nu, K'_nu at z with relative accuracy 10^(5-P).
inline BesselIK bessel_ik(const BigReal& nu, const Complex& z, int P) {
  detail::check_args(nu, z, P);
  const double nud = to_double(nu);
  const double zabs = std::pow(10.0, log10_abs(z));
  const double zre = to_double(z.real());
  detail::HankelPlan plan = detail::hankel_plan(nud, zabs, -(P + 8.0));
  BesselIK out;
  if (plan.terms > 0) {
    out = detail::hankel_ik(nu, z, plan.terms, P + 12 + plan.guard);
  } else {
    const double ln10 = std::log(10.0);
    int gi = static_cast<int>(std::ceil((zabs - zre) / ln10)) + 4;
    int gk = static_cast<int>(std::ceil((zabs + zre) / ln10)) + 4;
    detail::SeriesResult si, sk;
    for (int attempt = 0;; ++attempt) {
      int wp = P + 12 + gi;
      si = detail::ascending_i(nu, z.with_precision(wp), wp);
      double loss = si.log10_max - std::min(log10_abs(si.value), log10_abs(si.deriv) + std::log10(zabs));
      if (loss <= gi + 2 || attempt == 3) break;
      gi = static_cast<int>(std::ceil(loss)) + 6;
    }
    for (int attempt = 0;; ++attempt) {
      int wp = P + 12 + gk;
      if (wp > kMaxPrecision + 200) throw PrecisionError("bessel_k: required guard digits exceed internal limit");
      sk = detail::k_series(nu, z.with_precision(wp), wp);
      double loss = sk.log10_max - std::min(log10_abs(sk.value), log10_abs(sk.deriv) + std::log10(zabs));
      if (loss <= gk + 2 || attempt == 3) break;
      gk = static_cast<int>(std::ceil(loss)) + 6;
    }
    out.i = si.value;
    out.ip = si.deriv;
    out.k = sk.value;
    out.kp = sk.deriv;
  }
  out.i = out.i.with_precision(P);
  out.ip = out.ip.with_precision(P);
  out.k = out.k.with_precision(P);
  out.kp = out.kp.with_precision(P);
  return out;
}

inline Complex bessel_i(const BigReal& nu, const Complex& z, int P) { return bessel_ik(nu, z, P).i; }
inline Complex bessel_i_prime(const BigReal& nu, const Complex& z, int P) { return bessel_ik(nu, z, P).ip; }
inline Complex bessel_k(const BigReal& nu, const Complex& z, int P) { return bessel_ik(nu, z, P).k; }
inline Complex bessel_k_prime(const BigReal& nu, const Complex& z, int P) { return bessel_ik(nu, z, P).kp; }

// The route bessel_ik takes at (nu, |z|, P); for documentation and tests.
inline bool bessel_uses_hankel(double nu, double zabs, int P) { return detail::hankel_plan(nu, zabs, -(P + 8.0)).terms > 0; }

}  // namespace conetorsion
