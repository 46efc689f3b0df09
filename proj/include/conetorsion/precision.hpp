#pragma once

// Multiprecision scalars and the error types shared by every module.
//
// Precision is carried by values: every BigReal is created at an explicit
// decimal precision and arithmetic keeps the larger operand precision. The
// process-wide default precision of the mpfr backend is never relied upon.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <ios>
#include <limits>
#include <stdexcept>
#include <string>

namespace conetorsion {

namespace mp = boost::multiprecision;

using BigReal = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
using BigInt = mp::number<mp::gmp_int, mp::et_off>;

inline constexpr int kMinPrecision = 20;
inline constexpr int kMaxPrecision = 5000;
inline constexpr int kDefaultPrecision = 50;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BranchError : public Error {
 public:
  using Error::Error;
};

class PrecisionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class StructuralError : public Error {
 public:
  using Error::Error;
};

class RootIsolationError : public Error {
 public:
  RootIsolationError(const std::string& what, double lo, double hi)
      : Error(what + " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

inline void check_precision(int digits) {
  if (digits < kMinPrecision || digits > kMaxPrecision)
    throw PrecisionError("precision " + std::to_string(digits) + " outside [" + std::to_string(kMinPrecision) +
                         ", " + std::to_string(kMaxPrecision) + "]");
}

// --- construction at an explicit precision -------------------------------

inline BigReal make_real(long v, int digits) { return BigReal(v, static_cast<unsigned>(digits)); }

inline BigReal make_real(const BigReal& v, int digits) { return BigReal(v, static_cast<unsigned>(digits)); }

inline BigReal make_real(const Rational& q, int digits) {
  BigReal r(0, static_cast<unsigned>(digits));
  mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
  return r;
}

inline BigReal make_real(const BigInt& v, int digits) {
  BigReal r(0, static_cast<unsigned>(digits));
  mpfr_set_z(r.backend().data(), v.backend().data(), MPFR_RNDN);
  return r;
}

inline BigReal make_real_from_string(const std::string& s, int digits) {
  BigReal r(0, static_cast<unsigned>(digits));
  if (mpfr_set_str(r.backend().data(), s.c_str(), 10, MPFR_RNDN) != 0)
    throw FormatError("not a decimal number: '" + s + "'");
  return r;
}

inline BigReal make_double(double v, int digits) {
  BigReal r(0, static_cast<unsigned>(digits));
  mpfr_set_d(r.backend().data(), v, MPFR_RNDN);
  return r;
}

inline int precision_of(const BigReal& x) { return static_cast<int>(x.precision()); }

// --- constants and elementary special functions (MPFR, explicit precision) --

inline BigReal pi(int digits) {
  BigReal r(0, static_cast<unsigned>(digits));
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline BigReal euler_gamma(int digits) {
  BigReal r(0, static_cast<unsigned>(digits));
  mpfr_const_euler(r.backend().data(), MPFR_RNDN);
  return r;
}

namespace detail {
template <class F>
BigReal mpfr_unary(F f, const BigReal& x, int digits) {
  BigReal xin = make_real(x, digits);
  BigReal r(0, static_cast<unsigned>(digits));
  f(r.backend().data(), xin.backend().data(), MPFR_RNDN);
  return r;
}
}  // namespace detail

inline BigReal digamma(const BigReal& x, int digits) {
  if (x <= 0) throw DomainError("digamma: argument must be positive");
  return detail::mpfr_unary(mpfr_digamma, x, digits);
}

inline BigReal gamma_ln(const BigReal& x, int digits) {
  if (x <= 0) throw DomainError("gamma_ln: argument must be positive");
  return detail::mpfr_unary(mpfr_lngamma, x, digits);
}

// Gamma at any real argument that is not a non-positive integer.
inline BigReal gamma_fn(const BigReal& x, int digits) {
  if (x <= 0 && x == floor(x)) throw DomainError("gamma: pole at non-positive integer");
  return detail::mpfr_unary(mpfr_gamma, x, digits);
}

inline BigReal riemann_zeta_real(const BigReal& s, int digits) {
  if (s == 1) throw DomainError("riemann zeta: pole at s = 1");
  return detail::mpfr_unary(mpfr_zeta, s, digits);
}

// Upper incomplete gamma Gamma(a, x) for x > 0.
inline BigReal gamma_upper(const BigReal& a, const BigReal& x, int digits) {
  if (x <= 0) throw DomainError("gamma_upper: x must be positive");
  BigReal ain = make_real(a, digits), xin = make_real(x, digits);
  BigReal r(0, static_cast<unsigned>(digits));
  mpfr_gamma_inc(r.backend().data(), ain.backend().data(), xin.backend().data(), MPFR_RNDN);
  return r;
}

// --- formatting ------------------------------------------------------------

// Scientific decimal string with `digits` significant digits. Deterministic.
inline std::string to_decimal(const BigReal& x, int digits) {
  if (x == 0) return "0";
  return x.str(digits, std::ios_base::scientific);
}

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

// Exact decimal text ("-12.375", "3e-5") or "p/q" to a rational.
inline Rational parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw FormatError("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto integer = [&](std::string t) {
      bool minus = !t.empty() && (t[0] == '-' || t[0] == '+');
      if (minus) {
        minus = t[0] == '-';
        t.erase(0, 1);
      }
      if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("malformed rational '" + text + "'");
      t.erase(0, std::min(t.find_first_not_of('0'), t.size() - 1));
      BigInt v(t);
      return minus ? BigInt(-v) : v;
    };
    {
      BigInt p = integer(s.substr(0, slash)), q = integer(s.substr(slash + 1));
      if (q == 0) throw FormatError("zero denominator in '" + text + "'");
      return Rational(p, q);
    }
  }
  bool neg = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    pos = 1;
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE", pos); e != std::string::npos) {
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1) throw FormatError("bad exponent");
    } catch (const std::exception&) {
      throw FormatError("malformed exponent in '" + text + "'");
    }
    s = s.substr(0, e);
  }
  std::string digits;
  bool seen_point = false, seen_digit = false;
  for (std::size_t i = pos; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else {
      throw FormatError("malformed number '" + text + "'");
    }
  }
  if (!seen_digit) throw FormatError("malformed number '" + text + "'");
  // a leading zero would make the integer parser read octal
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  BigInt mant(digits);
  BigInt ten_pow = pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent >= 0 ? Rational(mant * ten_pow) : Rational(mant, ten_pow);
  return neg ? Rational(-r) : r;
}

// Exact decimal text of a rational whose denominator divides a power of ten;
// otherwise "p/q".
inline std::string to_exact_decimal(const Rational& q) {
  BigInt den = denominator(q);
  unsigned twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return to_string(q);
  unsigned places = twos > fives ? twos : fives;
  BigInt scaled = numerator(q) * pow(BigInt(10), places) / denominator(q);
  bool neg = scaled < 0;
  std::string d = (neg ? BigInt(-scaled) : scaled).str();
  if (places > 0) {
    if (d.size() <= places) d.insert(0, places - d.size() + 1, '0');
    d.insert(d.size() - places, ".");
  }
  return neg ? "-" + d : d;
}

inline double to_double(const BigReal& x) { return x.convert_to<double>(); }

// log10 |x| without overflow, for magnitude bookkeeping. -inf for zero.
inline double log10_abs(const BigReal& x) {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
  return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

}  // namespace conetorsion
