#pragma once

// Complex numbers over BigReal. Branches are principal on C minus the
// negative real axis; points on the axis take the limit from above.

#include "conetorsion/precision.hpp"

#include <algorithm>

namespace conetorsion {

class Complex {
 public:
  Complex() : re_(0, kMinPrecision), im_(0, kMinPrecision) {}
  explicit Complex(const BigReal& re) : re_(re), im_(0, re.precision()) {}
  Complex(const BigReal& re, const BigReal& im) : re_(re), im_(im) {}

  static Complex zero(int digits) { return Complex(make_real(0, digits), make_real(0, digits)); }
  static Complex i_unit(int digits) { return Complex(make_real(0, digits), make_real(1, digits)); }

  const BigReal& real() const { return re_; }
  const BigReal& imag() const { return im_; }
  int precision() const { return std::max(precision_of(re_), precision_of(im_)); }
  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  Complex with_precision(int digits) const { return Complex(make_real(re_, digits), make_real(im_, digits)); }

  Complex operator-() const { return Complex(-re_, -im_); }
  Complex& operator+=(const Complex& o) { re_ += o.re_; im_ += o.im_; return *this; }
  Complex& operator-=(const Complex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  Complex& operator*=(const Complex& o) {
    BigReal r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = r;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    // Smith's algorithm keeps intermediate magnitudes bounded.
    if (abs(o.re_) >= abs(o.im_)) {
      BigReal r = o.im_ / o.re_, d = o.re_ + o.im_ * r;
      BigReal nr = (re_ + im_ * r) / d;
      im_ = (im_ - re_ * r) / d;
      re_ = nr;
    } else {
      BigReal r = o.re_ / o.im_, d = o.re_ * r + o.im_;
      BigReal nr = (re_ * r + im_) / d;
      im_ = (im_ * r - re_) / d;
      re_ = nr;
    }
    return *this;
  }
  Complex& operator+=(const BigReal& o) { re_ += o; return *this; }
  Complex& operator-=(const BigReal& o) { re_ -= o; return *this; }
  Complex& operator*=(const BigReal& o) { re_ *= o; im_ *= o; return *this; }
  Complex& operator/=(const BigReal& o) { re_ /= o; im_ /= o; return *this; }

 private:
  BigReal re_, im_;
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator+(Complex a, const BigReal& b) { return a += b; }
inline Complex operator-(Complex a, const BigReal& b) { return a -= b; }
inline Complex operator*(Complex a, const BigReal& b) { return a *= b; }
inline Complex operator/(Complex a, const BigReal& b) { return a /= b; }
inline Complex operator+(const BigReal& a, Complex b) { return b += a; }
inline Complex operator-(const BigReal& a, const Complex& b) { return Complex(a - b.real(), -b.imag()); }
inline Complex operator*(const BigReal& a, Complex b) { return b *= a; }
inline Complex operator/(const BigReal& a, const Complex& b) { return Complex(a) / b; }
inline Complex operator*(Complex a, long b) { return a *= make_real(b, a.precision()); }
inline Complex operator*(long b, Complex a) { return a *= make_real(b, a.precision()); }
inline Complex operator/(Complex a, long b) { return a /= make_real(b, a.precision()); }
inline Complex operator+(Complex a, long b) { return a += make_real(b, a.precision()); }
inline Complex operator-(Complex a, long b) { return a -= make_real(b, a.precision()); }

inline Complex conj(const Complex& z) { return Complex(z.real(), -z.imag()); }
inline BigReal norm(const Complex& z) { return z.real() * z.real() + z.imag() * z.imag(); }

inline BigReal abs(const Complex& z) {
  BigReal r(0, static_cast<unsigned>(z.precision()));
  mpfr_hypot(r.backend().data(), z.real().backend().data(), z.imag().backend().data(), MPFR_RNDN);
  return r;
}

// Principal argument in (-pi, pi]; the negative real axis maps to +pi.
inline BigReal arg(const Complex& z) {
  int d = z.precision();
  if (z.imag() == 0) return z.real() < 0 ? pi(d) : make_real(0, d);
  return atan2(z.imag(), z.real());
}

inline Complex exp(const Complex& z) {
  BigReal m = exp(z.real());
  if (z.imag() == 0) return Complex(m, make_real(0, z.precision()));
  return Complex(m * cos(z.imag()), m * sin(z.imag()));
}

inline Complex log(const Complex& z) {
  if (z.is_zero()) throw DomainError("log of zero");
  return Complex(log(abs(z)), arg(z));
}

inline Complex sqrt(const Complex& z) {
  int d = z.precision();
  if (z.is_zero()) return Complex::zero(d);
  BigReal r = abs(z);
  if (z.real() >= 0) {
    BigReal t = sqrt((r + z.real()) / 2);
    return Complex(t, z.imag() / (2 * t));
  }
  BigReal t = sqrt((r - z.real()) / 2);
  BigReal re = abs(z.imag()) / (2 * t);
  return Complex(re, z.imag() < 0 ? BigReal(-t) : t);
}

inline Complex pow(const Complex& z, const BigReal& p) {
  if (z.is_zero()) {
    if (p > 0) return Complex::zero(z.precision());
    throw DomainError("non-positive power of zero");
  }
  if (z.is_real() && z.real() > 0) return Complex(pow(z.real(), p), make_real(0, z.precision()));
  return exp(log(z) * p);
}

inline Complex pow(const Complex& z, const Complex& p) {
  if (z.is_zero()) throw DomainError("complex power of zero");
  return exp(log(z) * p);
}

inline Complex square(const Complex& z) { return z * z; }

inline double log10_abs(const Complex& z) {
  double a = log10_abs(z.real()), b = log10_abs(z.imag());
  double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + 0.5 * std::log10(std::pow(10.0, 2 * (a - m)) + std::pow(10.0, 2 * (b - m)));
}

inline std::string to_decimal(const Complex& z, int digits) {
  return to_decimal(z.real(), digits) + (z.imag() < 0 ? " - " : " + ") + to_decimal(abs(z.imag()), digits) + "i";
}

}  // namespace conetorsion
