#pragma once

// One-dimensional model operators -d^2/dx^2 + (nu^2 - 1/4)/x^2 on (0,1] and
// [eps,1] coming from the decomposed de Rham complex of a cone, their
// normalized solutions, determinant ratios and the function t(lambda).

#include "conetorsion/bessel.hpp"
#include "conetorsion/olver.hpp"
#include "conetorsion/spectrum.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace conetorsion {

enum class Variant { psi0, psi2, phi0, phi2, h0, h1 };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::psi0: return "psi0";
    case Variant::psi2: return "psi2";
    case Variant::phi0: return "phi0";
    case Variant::phi2: return "phi2";
    case Variant::h0: return "H0";
    case Variant::h1: return "H1";
  }
  return "?";
}

// Endpoint conditions. Robin means f'(x0) + c f(x0)/x0 = 0.
struct BoundaryCondition {
  enum class Kind { dirichlet, robin, dirichlet_at_zero, neumann_at_zero } kind = Kind::dirichlet;
  Rational c;         // robin coefficient
  std::string label;  // B_D, B_N^j, B_D(0), B_N(0)
};

struct ModelOperator {
  Variant variant = Variant::psi2;
  BigReal nu;                  // order
  Rational A;                  // shift
  std::optional<BigReal> eps;  // none: the full cone (0,1]
  BoundaryCondition left, right;

  std::string descriptor() const {
    std::string s = variant_name(variant) + "(nu=" + to_decimal(nu, 12) + ",A=" + to_string(A);
    if (eps) s += ",eps=" + to_decimal(*eps, 12);
    return s + ")";
  }
};

namespace detail {

inline BoundaryCondition bc_dirichlet() { return {BoundaryCondition::Kind::dirichlet, Rational(0), "B_D"}; }
inline BoundaryCondition bc_robin(const Rational& c, const std::string& label) {
  return {BoundaryCondition::Kind::robin, c, label};
}

}  // namespace detail

// psi/phi operators of a coclosed eigenform, with the mixed boundary
// conditions: relative at x = 1, absolute at x = eps.
inline ModelOperator make_model_operator(Variant v, const BigReal& nu, const Rational& A,
                                         std::optional<BigReal> eps = std::nullopt) {
  if (v == Variant::h0 || v == Variant::h1) throw DomainError("make_model_operator: use harmonic_operator for H0/H1");
  if (!(nu > 0)) throw DomainError("model operator: order must be positive");
  if (eps && !(*eps > 0 && *eps < 1)) throw DomainError("model operator: eps must lie in (0,1)");
  ModelOperator op;
  op.variant = v;
  op.nu = nu;
  op.A = A;
  op.eps = eps;
  const BoundaryCondition d0{BoundaryCondition::Kind::dirichlet_at_zero, Rational(0), "B_D(0)"};
  switch (v) {
    case Variant::psi2:
      op.left = eps ? detail::bc_dirichlet() : d0;
      op.right = detail::bc_robin(A - Rational(1, 2), "B_N^{k+1}");
      break;
    case Variant::phi2:
      op.left = eps ? detail::bc_dirichlet() : d0;
      op.right = detail::bc_robin(-A - Rational(1, 2), "B_N^{n-k}");
      break;
    case Variant::psi0:
      op.left = eps ? detail::bc_robin(-A - Rational(1, 2), "B_N^{n-k}") : d0;
      op.right = detail::bc_dirichlet();
      break;
    case Variant::phi0:
      op.left = eps ? detail::bc_robin(A - Rational(1, 2), "B_N^{k+1}") : d0;
      op.right = detail::bc_dirichlet();
      break;
    default:
      break;
  }
  return op;
}

// H^k_0 (order |A_k|) and H^k_1 (order |A_k + 1|) of the harmonic sector.
inline ModelOperator harmonic_operator(Variant v, int k, int n, std::optional<BigReal> eps = std::nullopt) {
  if (v != Variant::h0 && v != Variant::h1) throw DomainError("harmonic_operator: variant must be H0 or H1");
  if (eps && !(*eps > 0 && *eps < 1)) throw DomainError("harmonic operator: eps must lie in (0,1)");
  const Rational A = degree_data(n, k).A;
  ModelOperator op;
  op.variant = v;
  op.A = A;
  op.eps = eps;
  const int wp = 40;
  if (v == Variant::h0) {
    op.nu = make_real(A < 0 ? Rational(-A) : A, wp);
    op.left = eps ? detail::bc_robin(-A - Rational(1, 2), "B_N^{n-k}")
                  : BoundaryCondition{BoundaryCondition::Kind::dirichlet_at_zero, Rational(0), "B_D(0)"};
    op.right = detail::bc_dirichlet();
  } else {
    Rational a1 = A + 1;
    op.nu = make_real(a1 < 0 ? Rational(-a1) : a1, wp);
    op.left = eps ? detail::bc_dirichlet()
                  : BoundaryCondition{BoundaryCondition::Kind::neumann_at_zero, Rational(0), "B_N(0)"};
    op.right = detail::bc_robin(A + Rational(1, 2), "B_N^k");
  }
  return op;
}

struct DeterminantRatio {
  std::string op;
  Complex z;
  Complex value;
};

// --- normalized solutions ---------------------------------------------------

namespace detail {

// sqrt(x) I_nu(zx), sqrt(x) K_nu(zx) and their x-derivatives.
struct RootBessel {
  Complex i, di, k, dk;
};

inline RootBessel root_bessel(const BigReal& nu, const Complex& z, const BigReal& x, int P) {
  BesselIK b = bessel_ik(nu, z * x, P);
  BigReal sx = sqrt(x);
  RootBessel r;
  r.i = b.i * sx;
  r.k = b.k * sx;
  r.di = b.i / (2 * sx) + z * b.ip * sx;
  r.dk = b.k / (2 * sx) + z * b.kp * sx;
  return r;
}

// Solution of -y'' + (nu^2-1/4)/x^2 y + z^2 y = 0 with y(1) = a0, y'(1) = a1,
// returned as (y(x), y'(x)). z = 0 uses the power basis.
inline std::pair<Complex, Complex> solution_from_right(const BigReal& nu, const Complex& z, const Complex& a0,
                                                       const Complex& a1, const BigReal& x, int P) {
  const int wp = P + 10;
  if (z.is_zero()) {
    const BigReal h = make_real(1, wp) / 2;
    if (nu == 0) {
      // sqrt(x), sqrt(x) log x
      Complex alpha = a0, beta = a1 - a0 * h;
      BigReal sx = sqrt(x), lx = log(x);
      Complex y = alpha * sx + beta * (sx * lx);
      Complex dy = alpha * (h / sx) + beta * ((h * lx + 1) / sx);
      return {y.with_precision(P), dy.with_precision(P)};
    }
    // x^(1/2+nu), x^(1/2-nu)
    Complex alpha = (a1 - a0 * (h - nu)) / (2 * nu);
    Complex beta = a0 - alpha;
    BigReal p = pow(x, h + nu), q = pow(x, h - nu);
    Complex y = alpha * p + beta * q;
    Complex dy = alpha * ((h + nu) * p / x) + beta * ((h - nu) * q / x);
    return {y.with_precision(P), dy.with_precision(P)};
  }
  RootBessel one = root_bessel(nu, z.with_precision(wp), make_real(1, wp), wp);
  // [I K; I' K'] c = (a0, a1); the Wronskian of sqrt(x) I, sqrt(x) K is -1
  Complex c1 = one.k * a1 - one.dk * a0;
  Complex c2 = one.di * a0 - one.i * a1;
  RootBessel at = root_bessel(nu, z.with_precision(wp), make_real(x, wp), wp);
  Complex y = c1 * at.i + c2 * at.k;
  Complex dy = c1 * at.di + c2 * at.dk;
  return {y.with_precision(P), dy.with_precision(P)};
}

inline void check_z(const Complex& z) {
  if (z.real() < 0) throw BranchError("spectral parameter z must satisfy Re z >= 0");
}

}  // namespace detail

enum class SolutionType { psi, phi };

// f_{psi,nu}(x, z) and f_{phi,nu}(x, z): normalized at x = 1 by f(1,z) = 1
// together with the relative condition there.
inline Complex normalized_solution(SolutionType type, const BigReal& nu, const Rational& A, const BigReal& x,
                                   const Complex& z, int P) {
  check_precision(P);
  if (!(nu > 0)) throw DomainError("normalized_solution: nu must be positive");
  if (!(x > 0 && x <= 1)) throw DomainError("normalized_solution: x must lie in (0,1]");
  detail::check_z(z);
  const int wp = P + 10;
  const BigReal a = make_real(type == SolutionType::psi ? A : Rational(-A), wp);
  const BigReal nw = make_real(nu, wp), xw = make_real(x, wp);
  if (z.is_zero()) {
    BigReal h = make_real(1, wp) / 2;
    BigReal v = ((nw - a) * pow(xw, nw + h) + (nw + a) * pow(xw, h - nw)) / (2 * nw);
    return Complex(make_real(v, P));
  }
  Complex zw = z.with_precision(wp);
  BesselIK at1 = bessel_ik(nw, zw, wp);
  BesselIK atx = bessel_ik(nw, zw * xw, wp);
  BigReal sx = sqrt(xw);
  Complex f = (zw * at1.ip + at1.i * a) * atx.k * sx - (zw * at1.kp + at1.k * a) * atx.i * sx;
  return f.with_precision(P);
}

// --- determinant ratios det(L + nu^2 z^2) / det(L) ------------------------------

namespace detail {

inline void check_variant_pq(Variant v, const BigReal& nu, const Rational& A) {
  if (!(nu > 0)) throw DomainError("determinant ratio: nu must be positive");
  if (v == Variant::psi2 && nu + make_real(A, precision_of(nu) + 5) == 0)
    throw DomainError("determinant ratio: degenerate normalization nu + A = 0");
  if (v == Variant::phi2 && nu - make_real(A, precision_of(nu) + 5) == 0)
    throw DomainError("determinant ratio: degenerate normalization nu - A = 0");
  if (v == Variant::h0 || v == Variant::h1) throw DomainError("determinant ratio: psi/phi variants only");
}

}  // namespace detail

// Full cone (0,1]: the closed forms in terms of I_nu(nu z).
inline DeterminantRatio det_ratio_full_cone(Variant v, const BigReal& nu, const Rational& A, const Complex& z, int P) {
  check_precision(P);
  detail::check_variant_pq(v, nu, A);
  detail::check_z(z);
  const int wp = P + 10;
  DeterminantRatio out;
  out.op = make_model_operator(v, nu, A).descriptor();
  out.z = z;
  if (z.is_zero()) {
    out.value = Complex(make_real(1, P));
    return out;
  }
  const BigReal nw = make_real(nu, wp);
  const BigReal a = make_real(A, wp);
  Complex w = z.with_precision(wp) * nw;
  BesselIK b = bessel_ik(nw, w, wp);
  // 2^nu Gamma(nu) (nu z)^(-nu)
  Complex pref = exp(log(w) * (-nw)) * (pow(make_real(2, wp), nw) * gamma_fn(nw, wp));
  switch (v) {
    case Variant::psi2:
      out.value = pref * (w * b.ip + b.i * a) / (1 + a / nw);
      break;
    case Variant::phi2:
      out.value = pref * (w * b.ip - b.i * a) / (1 - a / nw);
      break;
    default:  // psi0, phi0: 2^nu Gamma(nu+1) (nu z)^(-nu) I_nu(nu z)
      out.value = pref * nw * b.i;
      break;
  }
  out.value = out.value.with_precision(P);
  return out;
}

// Truncated cone [eps,1]: the quotient of boundary values of the solution
// fixed by the condition at x = 1, at nu z and at 0.
inline DeterminantRatio det_ratio_truncated(Variant v, const BigReal& nu, const Rational& A, const Complex& z,
                                            const BigReal& eps, int P) {
  check_precision(P);
  detail::check_variant_pq(v, nu, A);
  detail::check_z(z);
  if (!(eps > 0)) throw DomainError("det_ratio_truncated: eps must be positive");
  if (!(eps < 1)) throw DomainError("det_ratio_truncated: eps >= 1 leaves an empty interval");
  const int wp = P + 10;
  DeterminantRatio out;
  out.op = make_model_operator(v, nu, A, eps).descriptor();
  out.z = z;
  const BigReal nw = make_real(nu, wp), ew = make_real(eps, wp);
  Complex w = z.with_precision(wp) * nw;
  if (v == Variant::psi2 || v == Variant::phi2) {
    SolutionType t = v == Variant::psi2 ? SolutionType::psi : SolutionType::phi;
    Complex f0 = normalized_solution(t, nw, A, ew, Complex::zero(wp), wp);
    if (f0.is_zero()) throw StructuralError("det_ratio_truncated: f(eps, 0) vanished");
    Complex fz = normalized_solution(t, nw, A, ew, w, wp);
    out.value = (fz / f0).with_precision(P);
    return out;
  }
  // j = 0: Dirichlet at 1 (y(1) = 0, y'(1) = -1), boundary operator at eps
  ModelOperator op = make_model_operator(v, nu, A, eps);
  const BigReal c = make_real(op.left.c, wp);
  auto bval = [&](const Complex& zz) {
    auto [y, dy] = detail::solution_from_right(nw, zz, Complex::zero(wp), Complex(make_real(-1, wp)), ew, wp);
    return dy + y * (c / ew);
  };
  Complex d0 = bval(Complex::zero(wp));
  if (d0.is_zero()) throw StructuralError("det_ratio_truncated: boundary value at z = 0 vanished");
  out.value = (bval(w) / d0).with_precision(P);
  return out;
}

// The same truncated ratios transcribed from their closed Bessel forms.
inline Complex det_ratio_truncated_display(Variant v, const BigReal& nu, const Rational& A, const Complex& z,
                                           const BigReal& eps, int P) {
  detail::check_variant_pq(v, nu, A);
  detail::check_z(z);
  const int wp = P + 10;
  const BigReal nw = make_real(nu, wp), ew = make_real(eps, wp);
  const BigReal a = make_real(v == Variant::psi2 || v == Variant::psi0 ? A : Rational(-A), wp);
  Complex w = z.with_precision(wp) * nw;
  BesselIK b1 = bessel_ik(nw, w, wp);
  BesselIK be = bessel_ik(nw, w * ew, wp);
  Complex we = w * ew;
  BigReal den = (nw + a) * pow(ew, -nw) + (nw - a) * pow(ew, nw);
  if (v == Variant::psi2 || v == Variant::phi2) {
    Complex p = w * b1.ip + b1.i * a;
    Complex q = w * b1.kp + b1.k * a;
    Complex r = p * be.k * (2 * nw) / den * (Complex(make_real(1, wp)) - q / p * (be.i / be.k));
    return r.with_precision(P);
  }
  Complex p = b1.i * (-(we * be.kp) + be.k * a);
  Complex corr = Complex(make_real(1, wp)) - b1.k / b1.i * ((we * be.ip - be.i * a) / (we * be.kp - be.k * a));
  return (p * (2 * nw) / den * corr).with_precision(P);
}

// --- harmonic sector ----------------------------------------------------------

// det_zeta(H^k_0) on [eps,1] with the mixed conditions: 2 eps^(k - n/2).
inline BigReal h_det(int k, int n, const BigReal& eps) {
  if (n < 1 || n % 2 == 0) throw DomainError("h_det: base dimension must be odd");
  if (k < 0 || k > n) throw DomainError("h_det: degree outside [0, n]");
  if (!(eps > 0 && eps < 1)) throw DomainError("h_det: eps must lie in (0,1)");
  const int d = precision_of(eps);
  return 2 * pow(eps, make_real(2 * k - n, d) / 2);
}

// det_zeta(H^k_0) from the solution with y(1) = 0, y'(1) = -1: minus twice
// its boundary value at eps.
inline BigReal h_det_from_solution(int k, int n, const BigReal& eps, int P) {
  ModelOperator op = harmonic_operator(Variant::h0, k, n, eps);
  const int wp = P + 10;
  const BigReal ew = make_real(eps, wp);
  auto [y, dy] = detail::solution_from_right(op.nu, Complex::zero(wp), Complex::zero(wp), Complex(make_real(-1, wp)), ew, wp);
  return make_real(((dy + y * (make_real(op.left.c, wp) / ew)) * (-2)).real(), P);
}

// det(H^k_0 + mu^2) / det(H^k_0) on [eps,1] from normalized solutions.
inline Complex h_det_ratio(int k, int n, const BigReal& eps, const Complex& mu, int P) {
  ModelOperator op = harmonic_operator(Variant::h0, k, n, eps);
  const int wp = P + 10;
  const BigReal c = make_real(op.left.c, wp), ew = make_real(eps, wp);
  auto bval = [&](const Complex& zz) {
    auto [y, dy] = detail::solution_from_right(op.nu, zz, Complex::zero(wp), Complex(make_real(-1, wp)), ew, wp);
    return dy + y * (c / ew);
  };
  return (bval(mu.with_precision(wp)) / bval(Complex::zero(wp))).with_precision(P);
}

// --- eigenvalue oracle -------------------------------------------------------

namespace detail {

// Boundary functional of sqrt(x) C_nu(mu x), C = J or Y, in double precision.
struct CylValues {
  double u, du;
};

inline CylValues cyl_root(bool second_kind, double nu, double mu, double x) {
  double y = mu * x;
  double c = second_kind ? std::cyl_neumann(nu, y) : std::cyl_bessel_j(nu, y);
  double c1 = second_kind ? std::cyl_neumann(nu + 1, y) : std::cyl_bessel_j(nu + 1, y);
  double dc = -c1 + nu / y * c;  // C'_nu(y)
  double sx = std::sqrt(x);
  return {sx * c, c / (2 * sx) + mu * sx * dc};
}

inline double apply_bc(const BoundaryCondition& bc, const CylValues& v, double x0) {
  if (bc.kind == BoundaryCondition::Kind::robin) return v.du + bc.c.convert_to<double>() * v.u / x0;
  return v.u;
}

// Characteristic function in mu whose positive zeros are sqrt(eigenvalues).
inline double characteristic_mu(const ModelOperator& op, double mu) {
  const double nu = to_double(op.nu);
  if (!op.eps) {
    if (op.left.kind == BoundaryCondition::Kind::neumann_at_zero && nu < 1)
      throw UnsupportedError("eigenvalues_oracle: B_N(0) branch is not implemented");
    return apply_bc(op.right, cyl_root(false, nu, mu, 1.0), 1.0);
  }
  const double e = to_double(*op.eps);
  CylValues jl = cyl_root(false, nu, mu, e), yl = cyl_root(true, nu, mu, e);
  CylValues jr = cyl_root(false, nu, mu, 1.0), yr = cyl_root(true, nu, mu, 1.0);
  double lj = apply_bc(op.left, jl, e), ly = apply_bc(op.left, yl, e);
  double rj = apply_bc(op.right, jr, 1.0), ry = apply_bc(op.right, yr, 1.0);
  return lj * ry - ly * rj;
}

// Entire function of lambda vanishing exactly at the eigenvalues, at
// precision P: boundary value at the left end of the solution fixed at x = 1
// (truncated), or the regular solution's boundary value at 1 (full cone).
inline Complex characteristic_lambda(const ModelOperator& op, const Complex& lambda, int P) {
  Complex w = sqrt(-lambda.with_precision(P));
  const int wp = P;
  if (!op.eps) {
    // z^(-nu) (boundary functional of sqrt(x) I_nu(z x)) at x = 1
    if (w.is_zero()) w = Complex(pow(make_real(10, wp), make_real(-wp, wp)), make_real(0, wp));
    RootBessel rb = root_bessel(op.nu, w, make_real(1, wp), wp);
    Complex val = op.right.kind == BoundaryCondition::Kind::robin ? rb.di + rb.i * make_real(op.right.c, wp) : rb.i;
    return val * exp(log(w) * (-op.nu));
  }
  Complex a0, a1;
  if (op.right.kind == BoundaryCondition::Kind::dirichlet) {
    a0 = Complex::zero(wp);
    a1 = Complex(make_real(-1, wp));
  } else {
    a0 = Complex(make_real(1, wp));
    a1 = Complex(make_real(-op.right.c, wp));
  }
  const BigReal e = make_real(*op.eps, wp);
  auto [y, dy] = solution_from_right(op.nu, w, a0, a1, e, wp);
  if (op.left.kind == BoundaryCondition::Kind::robin) return dy + y * (make_real(op.left.c, wp) / e);
  return y;
}

// Number of zeros of characteristic_lambda inside the circle through lo and
// hi (both real, neither a zero), by the argument principle with conjugate
// symmetry and adaptive steps. The initial grid grows with the expected
// count, since a coarse grid can alias whole turns of the argument.
inline long zero_count(const ModelOperator& op, double lo, double hi, int P, long expected = 0) {
  const double c = (lo + hi) / 2, r = (hi - lo) / 2;
  auto F = [&](double th) {
    Complex l(make_double(c + r * std::cos(th), P), make_double(r * std::sin(th), P));
    return characteristic_lambda(op, l, P);
  };
  auto argof = [&](const Complex& v) { return to_double(arg(v)); };
  double total = 0;
  std::vector<std::pair<double, double>> stack;  // (theta, arg) of the right end
  double th0 = 0, a0 = argof(F(0));
  const double pi_d = std::numbers::pi;
  const long initial = std::max<long>(256, 16 * (expected + 4));
  for (long i = 1; i <= initial; ++i) stack.emplace_back(pi_d * i / initial, 0.0);
  std::reverse(stack.begin(), stack.end());
  for (auto& s : stack) s.second = std::nan("");
  long evals = 0;
  while (!stack.empty()) {
    auto [th1, a1] = stack.back();
    if (std::isnan(a1)) {
      a1 = argof(F(th1));
      ++evals;
      stack.back().second = a1;
    }
    double d = a1 - a0;
    while (d > pi_d) d -= 2 * pi_d;
    while (d < -pi_d) d += 2 * pi_d;
    if (std::abs(d) > pi_d / 6 && th1 - th0 > 1e-12) {
      stack.emplace_back((th0 + th1) / 2, std::nan(""));
      if (evals > 4000000) throw RootIsolationError("argument principle did not resolve", lo, hi);
      continue;
    }
    total += d;
    th0 = th1;
    a0 = a1;
    stack.pop_back();
  }
  return std::lround(total / pi_d);
}

// Number of eigenvalues below lambda > 0 by the oscillation theorem: the
// Pruefer angle of the solution fixed by the left condition, tracked through
// the sign changes of that solution on a grid finer than its local wavelength.
inline long oscillation_count(const ModelOperator& op, double lambda) {
  const double nu = to_double(op.nu), mu = std::sqrt(lambda);
  const double a = op.eps ? to_double(*op.eps) : 0.0;
  if (!op.eps && op.left.kind == BoundaryCondition::Kind::neumann_at_zero && nu < 1)
    throw UnsupportedError("oscillation_count: B_N(0) branch is not implemented");
  double lj = 0, ly = 0;
  if (op.eps) {
    lj = apply_bc(op.left, cyl_root(false, nu, mu, a), a);
    ly = apply_bc(op.left, cyl_root(true, nu, mu, a), a);
  }
  auto sol = [&](double x) {
    CylValues j = cyl_root(false, nu, mu, x);
    if (!op.eps) return j;
    CylValues y = cyl_root(true, nu, mu, x);
    return CylValues{ly * j.u - lj * y.u, ly * j.du - lj * y.du};
  };
  auto frac = [](const CylValues& v) {  // angle in (0, pi) with cot = u'/u
    return std::numbers::pi / 2 - std::atan(v.du / v.u);
  };
  const double x0 = op.eps ? a : 1e-9;
  long zeros = 0;
  CylValues prev = sol(x0);
  if (op.eps && op.left.kind == BoundaryCondition::Kind::robin && prev.u != 0 && frac(prev) >= std::numbers::pi)
    throw RootIsolationError("oscillation_count: bad initial angle", lambda, lambda);
  double x = x0;
  while (x < 1) {
    double dx = std::numbers::pi / (16 * (mu + std::abs(nu) / x + 1 / (2 * x)));
    dx = std::min(dx, (1 - x0) / 64);
    x = std::min(1.0, x + dx);
    CylValues cur = sol(x);
    if (cur.u == 0 || (prev.u != 0 && (cur.u < 0) != (prev.u < 0))) ++zeros;
    prev = cur;
  }
  double theta = zeros * std::numbers::pi;
  if (prev.u != 0) theta += frac(prev);
  double beta = std::numbers::pi;
  if (op.right.kind == BoundaryCondition::Kind::robin)
    beta = std::numbers::pi / 2 - std::atan(-op.right.c.convert_to<double>());  // cot(beta) = -c
  return std::max(0L, static_cast<long>(std::ceil((theta - beta) / std::numbers::pi - 1e-12)));
}

}  // namespace detail

enum class CountCheck { none, oscillation, argument_principle };

struct OracleOptions {
  CountCheck check = CountCheck::argument_principle;  // also runs the oscillation count
  int count_precision = 20;
};

// The first `count` eigenvalues (ascending) of the model operator, by a
// sign-change scan of the J/Y boundary determinant and TOMS 748 refinement;
// the count is confirmed by the oscillation theorem and, by default, by the
// argument principle on the entire characteristic function.
inline std::vector<double> eigenvalues_oracle(const ModelOperator& op, int count, OracleOptions opt = {}) {
  if (count < 1 || count > 500) throw DomainError("eigenvalues_oracle: count must lie in [1, 500]");
  const double len = op.eps ? 1 - to_double(*op.eps) : 1.0;
  double step = std::numbers::pi / len / 24;
  for (int attempt = 0; attempt < 4; ++attempt, step /= 4) {
    std::vector<double> mus;
    double m0 = 1e-6, f0 = detail::characteristic_mu(op, m0);
    while (static_cast<int>(mus.size()) < count + 1) {
      double m1 = m0 + step, f1 = detail::characteristic_mu(op, m1);
      if (f0 == 0) {
        mus.push_back(m0);
      } else if ((f0 < 0) != (f1 < 0)) {
        boost::uintmax_t it = 200;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(std::abs(a), 1.0); };
        auto rr = boost::math::tools::toms748_solve([&](double m) { return detail::characteristic_mu(op, m); }, m0,
                                                    m1, f0, f1, tol, it);
        mus.push_back((rr.first + rr.second) / 2);
      }
      m0 = m1;
      f0 = f1;
      if (m0 > 1e7) throw RootIsolationError("eigenvalues_oracle: scan ran away", 0, m0);
    }
    std::vector<double> lam;
    for (double m : mus) lam.push_back(m * m);
    const double hi = (lam[count - 1] + lam[count]) / 2;
    if (opt.check != CountCheck::none) {
      if (detail::oscillation_count(op, lam[0] / 2) != 0)
        throw DomainError("eigenvalues_oracle: operator has eigenvalues <= 0; only lambda > 0 is scanned");
      long oc = detail::oscillation_count(op, hi);
      if (oc != count) {
        if (attempt == 3)
          throw RootIsolationError("eigenvalues_oracle: oscillation theorem counts " + std::to_string(oc) +
                                       " eigenvalues, scan found " + std::to_string(count),
                                   0, hi);
        continue;
      }
    }
    if (opt.check == CountCheck::argument_principle) {
      double lo = -std::min(1.0, lam[0] / 2);
      long zc = detail::zero_count(op, lo, hi, opt.count_precision, count << attempt);
      if (zc != count) {
        if (attempt == 3)
          throw RootIsolationError("eigenvalues_oracle: argument principle counts " + std::to_string(zc) +
                                       " zeros, scan found " + std::to_string(count),
                                   lo, hi);
        continue;
      }
    }
    lam.resize(count);
    return lam;
  }
  throw RootIsolationError("eigenvalues_oracle: no consistent count", 0, 0);
}

// log det(L + w^2)/det(L) from eigenvalues: partial sums of log(1 + w^2/lambda_i)
// at N/4, N/2, 3N/4 and N, extrapolated to N = infinity in powers of 1/N.
inline double log_det_ratio_from_eigenvalues(const std::vector<double>& lam, double w) {
  const std::size_t N = lam.size();
  if (N < 40 || N % 4) throw DomainError("log_det_ratio_from_eigenvalues: needs a multiple of 4, at least 40");
  double s[4], h[4];
  double acc = 0;
  for (std::size_t i = 0, q = 0; i < N; ++i) {
    acc += std::log1p(w * w / lam[i]);
    if ((i + 1) % (N / 4) == 0) {
      s[q] = acc;
      h[q] = 1.0 / static_cast<double>(i + 1);
      ++q;
    }
  }
  double out = 0;
  for (int j = 0; j < 4; ++j) {
    double lj = 1;
    for (int m = 0; m < 4; ++m)
      if (m != j) lj *= h[m] / (h[m] - h[j]);
    out += lj * s[j];
  }
  return out;
}

// --- t(lambda) -----------------------------------------------------------------

namespace detail {

inline void check_degree_args(int k, int n) {
  if (n < 1 || n % 2 == 0) throw DomainError("t_function: base dimension must be odd");
  if (k < 0 || k > n) throw DomainError("t_function: degree outside [0, n]");
}

inline void check_t_args(const Rational& A, const BigReal& nu, const BigReal& eps) {
  if (!(eps > 0 && eps < 1)) throw DomainError("t_function: eps must lie in (0,1)");
  if (!(nu > abs(make_real(A, precision_of(nu) + 5)))) throw DomainError("t_function: nu must exceed |A|");
}

inline Complex t_zero_argument(const Complex& lambda) {
  if (lambda.imag() == 0 && lambda.real() > 0) throw BranchError("t_function: lambda on the positive real axis");
  return sqrt(-lambda);
}

}  // namespace detail

// t^k_{nu,eps}(lambda) from the cancelled Bessel expression, z = sqrt(-lambda).
// lambda = 0 is evaluated through the small-argument limits of each term.
inline Complex t_function(const Rational& A, const BigReal& nu, const BigReal& eps, const Complex& lambda, int P) {
  check_precision(P);
  detail::check_t_args(A, nu, eps);
  const int wp = P + 15;
  const BigReal nw = make_real(nu, wp), ew = make_real(eps, wp);
  const BigReal a = make_real(A, wp);
  const Complex one(make_real(1, wp));
  if (lambda.is_zero()) {
    // the first five terms cancel identically; the pairs below give
    // -log(1 + q_-) - log(1 + q_+) + log(1 + q_+) + log(1 + q_-)
    BigReal e2 = pow(ew, 2 * nw);
    BigReal qm = (nw - a) / (nw + a) * e2, qp = (nw + a) / (nw - a) * e2;
    BigReal first = -log(1 + qm) - log(1 + qp);
    BigReal second = log(1 + qp) + log(1 + qm);
    return Complex(make_real(first + second, P));
  }
  Complex z = detail::t_zero_argument(lambda.with_precision(wp));
  Complex w = z * nw, we = w * ew;
  BesselIK b1 = bessel_ik(nw, w, wp), be = bessel_ik(nw, we, wp);
  Complex t = log(be.k) * (-2);
  t -= Complex(log(1 - a * a / (nw * nw)));
  t -= Complex(2 * log(nw));
  t += log(-(we * be.kp) + be.k * a);
  t += log(-(we * be.kp) - be.k * a);
  Complex r = be.i / be.k;
  t -= log(one - (w * b1.kp + b1.k * a) / (w * b1.ip + b1.i * a) * r);
  t -= log(one - (w * b1.kp - b1.k * a) / (w * b1.ip - b1.i * a) * r);
  Complex s = b1.k / b1.i;
  t += log(one - s * ((we * be.ip + be.i * a) / (we * be.kp + be.k * a)));
  t += log(one - s * ((we * be.ip - be.i * a) / (we * be.kp - be.k * a)));
  return t.with_precision(P);
}

// The same function assembled from the eight determinant ratios.
inline Complex t_function_assembled(const Rational& A, const BigReal& nu, const BigReal& eps, const Complex& lambda,
                                    int P) {
  check_precision(P);
  detail::check_t_args(A, nu, eps);
  const int wp = P + 15;
  if (lambda.is_zero()) return Complex::zero(P);
  Complex z = detail::t_zero_argument(lambda.with_precision(wp));
  const BigReal nw = make_real(nu, wp), ew = make_real(eps, wp);
  auto lt = [&](Variant v) { return log(det_ratio_truncated(v, nw, A, z, ew, wp).value); };
  auto lf = [&](Variant v) { return log(det_ratio_full_cone(v, nw, A, z, wp).value); };
  Complex t = -lt(Variant::psi2) - lt(Variant::phi2) + lt(Variant::psi0) + lt(Variant::phi0) + lf(Variant::psi2) +
              lf(Variant::phi2) - lf(Variant::psi0) - lf(Variant::phi0);
  return t.with_precision(P);
}

// Large-nu partial sum through order nu^-R:
// log(1 - eps^2 lambda) + sum_r (-nu)^-r (-2 D_r + M_r(-A) + M_r(A) - (-1)^(r+1)(A^r + (-A)^r)/r),
// all polynomials at t_eps = (1 - eps^2 lambda)^(-1/2). The order-zero term
// can be dropped to reproduce the series without it.
inline Complex t_large_nu_partial(const Rational& A, const BigReal& nu, const BigReal& eps, const Complex& lambda,
                                  int R, int P, bool include_order_zero = true) {
  check_precision(P);
  if (R < 0 || R > kOlverMaxOrder) throw DomainError("t_large_nu_partial: order outside [0, 9]");
  const int wp = P + 10;
    Complex te = t_epsilon(make_real(eps, wp), lambda, wp);
  Complex out = Complex::zero(wp);
  if (include_order_zero) out += log(Complex(make_real(1, wp)) - lambda.with_precision(wp) * (make_real(eps, wp) * make_real(eps, wp)));
  const BigReal nw = make_real(nu, wp);
  for (int r = 1; r <= R; ++r) {
    RationalPolynomial poly = d_poly(r) * Rational(-2) + m_poly(r).at(-A) + m_poly(r).at(A);
    Rational cst = rational_pow(A, r) + rational_pow(-A, r);
    cst /= r;
    if (r % 2 == 0) cst = -cst;  // (-1)^(r+1)
    Complex coeff = poly.evaluate_numeric(te, wp) - make_real(cst, wp);
    BigReal scale = pow(-nw, make_real(-r, wp));
    out += coeff * scale;
  }
  return out.with_precision(P);
}

// a and b of t = a log(-lambda) + b + O((-lambda)^(-1/2)) for large -lambda.
struct ABCoefficients {
  BigReal a, b;
};

inline ABCoefficients ab_coefficients(const Rational& A, const BigReal& nu, const BigReal& eps) {
  const int d = std::max(precision_of(nu), precision_of(eps));
  const BigReal a = make_real(A, d);
  return {make_real(1, d), 2 * log(eps) - log(1 - a * a / (nu * nu))};
}

// Degree-k forms over an n-dimensional base: A = A_k.
inline Complex t_function(int k, int n, const BigReal& nu, const BigReal& eps, const Complex& lambda, int P) {
  detail::check_degree_args(k, n);
  return t_function(degree_data(n, k).A, nu, eps, lambda, P);
}

inline Complex t_function_assembled(int k, int n, const BigReal& nu, const BigReal& eps, const Complex& lambda, int P) {
  detail::check_degree_args(k, n);
  return t_function_assembled(degree_data(n, k).A, nu, eps, lambda, P);
}

inline Complex t_large_nu_partial(int k, int n, const BigReal& nu, const BigReal& eps, const Complex& lambda, int R,
                                  int P, bool include_order_zero = true) {
  detail::check_degree_args(k, n);
  return t_large_nu_partial(degree_data(n, k).A, nu, eps, lambda, R, P, include_order_zero);
}

inline ABCoefficients ab_coefficients(int k, int n, const BigReal& nu, const BigReal& eps) {
  detail::check_degree_args(k, n);
  return ab_coefficients(degree_data(n, k).A, nu, eps);
}

}  // namespace conetorsion
