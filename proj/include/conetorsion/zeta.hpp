#pragma once

// Zeta functions of the shifted base operators N_k = sqrt(Delta_k + A_k^2) on
// coclosed k-forms and of the coclosed Laplacians themselves.
//
// Spheres reduce to finite Hurwitz combinations. Tori go through a theta
// split of the (massive) Epstein zeta. File bases only admit direct sums and
// fitted pole data.

#include "conetorsion/special.hpp"
#include "conetorsion/spectrum.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace conetorsion {

class PoleError : public DomainError {
 public:
  PoleError(const std::string& what, BigReal residue) : DomainError(what), residue_(std::move(residue)) {}
  const BigReal& residue() const { return residue_; }

 private:
  BigReal residue_;
};

// Laurent data of a meromorphic function at a simple pole (or a regular point
// when residue is zero).
struct MeromorphicPoint {
  BigReal location;
  BigReal residue;
  std::optional<BigReal> finite_part;
  bool approximate = false;
  double uncertainty = 0;  // absolute, only for approximate data
};

struct ZetaAtZero {
  BigReal value;
  BigReal derivative;
};

// --- spheres ----------------------------------------------------------------

// Multiplicity in degree k as a polynomial in nu = j + (n-1)/2, rank excluded.
// Returns c_0..c_{n-1}; only even powers occur.
inline std::vector<Rational> sphere_multiplicity_polynomial(int n, int k) {
  if (n < 1 || n % 2 == 0) throw DomainError("sphere_multiplicity_polynomial: odd dimension expected");
  if (k < 0 || k > n) throw DomainError("sphere_multiplicity_polynomial: degree outside [0, n]");
  std::vector<Rational> c(n, Rational(0));
  if (k == n) return c;
  const Rational off(n - 1, 2);
  // Newton divided differences through j = 1..n, then expand.
  std::vector<Rational> x(n), dd(n);
  for (int i = 0; i < n; ++i) {
    x[i] = off + (i + 1);
    dd[i] = Rational(detail::sphere_multiplicity(n, k, i + 1));
  }
  for (int level = 1; level < n; ++level)
    for (int i = n - 1; i >= level; --i) dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);
  // Horner in Newton form: p = dd[n-1]; p = p (X - x[i]) + dd[i]
  std::vector<Rational> p{dd[n - 1]};
  for (int i = n - 2; i >= 0; --i) {
    std::vector<Rational> q(p.size() + 1, Rational(0));
    for (std::size_t e = 0; e < p.size(); ++e) {
      q[e + 1] += p[e];
      q[e] -= p[e] * x[i];
    }
    q[0] += dd[i];
    p = std::move(q);
  }
  for (std::size_t e = 0; e < p.size() && e < c.size(); ++e) c[e] = p[e];
  for (std::size_t e = c.size(); e < p.size(); ++e)
    if (p[e] != 0) throw StructuralError("sphere multiplicity polynomial has excess degree");
  for (int j = n + 1; j <= n + 4; ++j) {
    Rational v = 0, nu = off + j;
    for (int e = n - 1; e >= 0; --e) v = v * nu + c[e];
    if (v != Rational(detail::sphere_multiplicity(n, k, j)))
      throw StructuralError("sphere multiplicity polynomial fails off the interpolation nodes");
  }
  for (int e = 1; e < n; e += 2)
    if (c[e] != 0) throw StructuralError("sphere multiplicity polynomial is not even in nu");
  return c;
}

// weight * zeta_H(s - offset, shift)
struct HurwitzTerm {
  Rational weight;
  int offset = 0;
};

struct ZetaRepresentation {
  Rational shift;
  std::vector<HurwitzTerm> terms;
  Rational tail_bound;  // zero: the combination is exact
};

inline ZetaRepresentation zeta_representation(const BaseManifold& m, int k) {
  detail::check_degree(m, k);
  if (m.family() != BaseFamily::sphere) throw UnsupportedError("zeta_representation: Hurwitz form exists for spheres only");
  const int n = m.dimension();
  ZetaRepresentation r;
  r.shift = Rational(n + 1, 2);
  auto c = sphere_multiplicity_polynomial(n, k);
  for (int i = 0; i < n; ++i)
    if (c[i] != 0) r.terms.push_back({c[i] * m.rank(), i});
  r.tail_bound = 0;
  return r;
}

namespace detail {

inline Jet sphere_zeta_jet(const BaseManifold& m, int k, const Complex& s, int P) {
  const auto rep = zeta_representation(m, k);
  const int wp = P + 5;
  Jet acc{Complex::zero(wp), Complex::zero(wp)};
  const BigReal a = make_real(rep.shift, wp);
  for (const auto& t : rep.terms) {
    Complex arg = s.with_precision(wp) - make_real(t.offset, wp);
    if (arg.imag() == 0 && arg.real() == 1)
      throw PoleError("zeta of the shifted operator has a pole at s = " + std::to_string(t.offset + 1),
                      make_real(t.weight, P));
    acc = acc + hurwitz_zeta_jet(arg, a, wp) * make_real(t.weight, wp);
  }
  return {acc.v.with_precision(P), acc.d.with_precision(P)};
}

}  // namespace detail

// --- tori -------------------------------------------------------------------

namespace detail {

// Lattice data for the theta split of Z_A(w) = sum'_xi (|xi|^2 + A^2)^(-w).
struct TorusTheta {
  int n = 0;
  int wp = 0;
  BigReal tau;
  BigReal v4;  // vol (4 pi)^(-n/2)
  std::vector<std::pair<BigReal, BigInt>> xi;   // |xi|^2, count
  std::vector<std::pair<BigReal, BigInt>> ell;  // |l|^2 / 4, count
};

inline std::shared_ptr<const TorusTheta> torus_theta(const BaseManifold& m, int wp, const Rational& tau_scale = 1) {
  static std::mutex mu;
  static std::map<std::pair<std::string, int>, std::shared_ptr<const TorusTheta>> cache;
  std::string key = to_string(tau_scale) + "|";
  for (const auto& a : m.torus_sides()) key += to_string(a) + ",";
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find({key, wp}); it != cache.end()) return it->second;
  }
  auto th = std::make_shared<TorusTheta>();
  const int n = m.dimension();
  th->n = n;
  th->wp = wp;
  const BigReal pie = pi(wp);
  BigReal prod = make_real(1, wp);
  for (const auto& a : m.torus_sides()) prod *= make_real(a, wp);
  // balanced split for the geometric-mean side
  th->tau = make_real(tau_scale, wp) * pie * pow(prod, make_real(2, wp) / n);
  th->v4 = pow(2 * pie, make_real(n, wp)) * prod / pow(4 * pie, make_real(n, wp) / 2);
  const double L = wp * std::log(10.0) + 25;
  const double taud = to_double(th->tau);
  Rational xi_max(static_cast<long>(std::ceil(L / taud)) + 1);
  for (const auto& [q, c] : torus_norm_counts(m.torus_sides(), xi_max)) th->xi.emplace_back(make_real(q, wp), c);
  std::vector<Rational> inv;
  for (const auto& a : m.torus_sides()) inv.push_back(1 / a);
  const double pid = std::numbers::pi;
  Rational ell_max(static_cast<long>(std::ceil(L * taud / (pid * pid))) + 1);
  for (const auto& [q, c] : torus_norm_counts(inv, ell_max)) th->ell.emplace_back(make_real(q, wp) * pie * pie, c);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(key, wp), th);
  return th;
}

// Gamma(w) Z_A(w) with the m = 0 piece of -tau^w/w dropped when w == 0 (so the
// result is then the regular part B(0)), and with the pole term m = skip_m of
// the volume series replaced by its finite part.
inline BigReal torus_bracket(const TorusTheta& th, const BigReal& A2, const BigReal& w, int skip_m = -1) {
  const int wp = th.wp;
  const BigReal tau = th.tau;
  const BigReal b = w - make_real(th.n, wp) / 2;
  const bool at_zero = (w == 0);
  BigReal total = make_real(0, wp);
  for (const auto& [q, c] : th.xi) {
    BigReal lam = q + A2;
    total += make_real(c, wp) * pow(lam, -w) * gamma_upper(w, tau * lam, wp);
  }
  // number of terms in the mass expansions
  const double a2t = to_double(A2 * tau);
  int M = 0;
  if (A2 != 0) {
    double lt = 0;
    for (M = 1; M < 100000; ++M) {
      lt += std::log10(a2t) - std::log10(static_cast<double>(M));
      if (M > a2t && lt < -(wp + 5)) break;
    }
  }
  const BigReal logtau = log(tau);
  BigReal coef = make_real(1, wp);  // (-A^2)^m / m!
  BigReal tau_m = make_real(1, wp);  // tau^m
  BigReal tau_w = pow(tau, w), tau_b = pow(tau, b);
  for (int mm = 0; mm <= M; ++mm) {
    if (mm > 0) {
      coef *= -A2 / mm;
      tau_m *= tau;
    }
    BigReal e1 = w + mm;
    if (at_zero && mm == 0)
      total -= logtau;  // -(tau^w - 1)/w at w = 0
    else if (e1 == 0)
      throw DomainError("torus_bracket: pole of the small-t expansion");
    else
      total -= coef * tau_m * tau_w / e1;
    BigReal e2 = b + mm;
    if (mm == skip_m)
      total += th.v4 * coef * logtau;
    else if (e2 == 0)
      throw DomainError("torus_bracket: pole of the volume term");
    else
      total += th.v4 * coef * tau_m * tau_b / e2;
  }
  // dual-lattice part: sum_m coef_m x^(b+m) Gamma(-b-m, x/tau), with the
  // incomplete gamma taken down by Gamma(a-1,y) = (Gamma(a,y) - y^(a-1) e^-y)/(a-1)
  BigReal dual = make_real(0, wp);
  for (const auto& [x, c] : th.ell) {
    BigReal y = x / tau;
    BigReal a = -b;
    BigReal g = gamma_upper(a, y, wp);
    BigReal ey = exp(-y);
    BigReal xp = pow(x, b);
    BigReal cm = make_real(1, wp);
    BigReal s = make_real(0, wp);
    for (int mm = 0; mm <= M; ++mm) {
      if (mm > 0) {
        BigReal am1 = a - 1;
        if (am1 == 0)
          g = gamma_upper(am1, y, wp);
        else
          g = (g - pow(y, am1) * ey) / am1;
        a = am1;
        cm *= -A2 / mm;
        xp *= x;
      }
      s += cm * xp * g;
    }
    dual += make_real(c, wp) * s;
  }
  total += th.v4 * dual;
  return total;
}

inline int torus_working_precision(const BaseManifold& m, const BigReal& A2, int P, double tau_scale = 1) {
  BigReal prod = make_real(1, 30);
  for (const auto& a : m.torus_sides()) prod *= make_real(a, 30);
  double tau = tau_scale * std::numbers::pi * std::pow(to_double(prod), 2.0 / m.dimension());
  return P + 15 + static_cast<int>(std::ceil(to_double(A2) * tau * std::log10(std::exp(1.0))));
}

// Z_A(w) for real w. Throws PoleError (residue in w) at w = n/2 - m.
inline BigReal torus_epstein(const BaseManifold& m, const Rational& A2q, const BigReal& w_in, int P) {
  const int n = m.dimension();
  BigReal A2 = make_real(A2q, 30);
  const int wp = torus_working_precision(m, A2, P);
  A2 = make_real(A2q, wp);
  const BigReal w = make_real(w_in, wp);
  if (w == 0) return make_real(-1, P);
  // negative integers: the bracket pole at m = j over the pole of Gamma
  if (w < 0 && w == floor(w)) {
    long j = -w.convert_to<long>();
    return make_real(-pow(A2, make_real(j, wp)), P);
  }
  auto th = torus_theta(m, wp);
  BigReal h = make_real(n, wp) / 2 - w;  // pole when h = mm with coefficient nonzero
  if (h >= 0 && h == floor(h)) {
    long mm = h.convert_to<long>();
    if (mm == 0 || A2 != 0) {
      BigReal coef = make_real(1, wp);
      for (long i = 1; i <= mm; ++i) coef *= -A2 / i;
      throw PoleError("Epstein zeta pole at w = " + to_decimal(w, 6), make_real(th->v4 * coef / gamma_fn(w, wp), P));
    }
  }
  BigReal br = torus_bracket(*th, A2, w);
  return make_real(br / gamma_fn(w, wp), P);
}

// (Z_A(0), Z_A'(0)) = (-1, B(0) - gamma).
// The split point tau is free; tau_scale moves it away from the balanced choice.
inline ZetaAtZero torus_epstein_at_zero(const BaseManifold& m, const Rational& A2q, int P, const Rational& tau_scale = 1) {
  BigReal A2 = make_real(A2q, 30);
  const int wp = torus_working_precision(m, A2, P, tau_scale.convert_to<double>());
  A2 = make_real(A2q, wp);
  auto th = torus_theta(m, wp, tau_scale);
  BigReal b0 = torus_bracket(*th, A2, make_real(0, wp));
  return {make_real(-1, P), make_real(b0 - euler_gamma(wp), P)};
}

// Residue and finite part of Z_A at w0 = n/2 - mm.
inline MeromorphicPoint torus_epstein_pole(const BaseManifold& m, const Rational& A2q, int mm, int P) {
  BigReal A2 = make_real(A2q, 30);
  const int wp = torus_working_precision(m, A2, P);
  A2 = make_real(A2q, wp);
  auto th = torus_theta(m, wp);
  BigReal w0 = make_real(m.dimension(), wp) / 2 - mm;
  BigReal coef = make_real(1, wp);
  for (long i = 1; i <= mm; ++i) coef *= -A2 / i;
  BigReal R = th->v4 * coef;  // residue of the bracket
  BigReal B0 = torus_bracket(*th, A2, w0, mm);
  BigReal g = gamma_fn(w0, wp);
  // 1/Gamma(w) = (1 - psi(w0)(w - w0) + ...)/Gamma(w0)
  BigReal pp = (B0 - R * digamma(w0, wp)) / g;
  MeromorphicPoint out;
  out.location = make_real(w0, P);
  out.residue = make_real(R / g, P);
  out.finite_part = make_real(pp, P);
  return out;
}

}  // namespace detail

// --- the shifted zeta -------------------------------------------------------

// zeta(s, N_k) = sum m_nu nu^(-s). Spheres: any complex s. Tori: real s.
// File bases: Re s > n, summed over the recorded lines only.
inline Complex zeta_shifted(const BaseManifold& m, int k, const Complex& s, int P) {
  check_precision(P);
  detail::check_degree(m, k);
  const int n = m.dimension();
  switch (m.family()) {
    case BaseFamily::sphere:
      return detail::sphere_zeta_jet(m, k, s, P).v;
    case BaseFamily::torus: {
      if (s.imag() != 0) throw UnsupportedError("zeta_shifted: tori are evaluated on the real axis only");
      if (k == n) return Complex::zero(P);
      const Rational A = degree_data(n, k).A;
      const BigReal c = make_real(binomial(n - 1, k) * m.rank(), P + 10);
      try {
        BigReal z = detail::torus_epstein(m, A * A, s.real() / 2, P + 5);
        return Complex(make_real(c * z, P));
      } catch (const PoleError& e) {
        throw PoleError(std::string("zeta of the shifted operator: ") + e.what(), make_real(2 * c * e.residue(), P));
      }
    }
    case BaseFamily::file: {
      if (!(s.real() > n)) throw UnsupportedError("zeta_shifted: file bases need Re s > n");
      const int wp = P + 10;
      Complex acc = Complex::zero(wp);
      Complex sw = s.with_precision(wp);
      const Rational A2 = degree_data(n, k).A * degree_data(n, k).A;
      for (const auto& l : m.file_lines())
        if (l.k == k) acc += exp(-sw * log(sqrt(make_real(l.eta + A2, wp)))) * make_real(l.mult, wp);
      return acc.with_precision(P);
    }
  }
  throw UnsupportedError("zeta_shifted: unknown base family");
}

inline BigReal zeta_shifted(const BaseManifold& m, int k, const BigReal& s, int P) {
  return zeta_shifted(m, k, Complex(make_real(s, P + 10)), P).real();
}

// zeta(s, N_k) and its s-derivative at s = 0.
inline ZetaAtZero zeta_shifted_at_zero(const BaseManifold& m, int k, int P) {
  check_precision(P);
  detail::check_degree(m, k);
  const int n = m.dimension();
  if (m.family() == BaseFamily::sphere) {
    Jet j = detail::sphere_zeta_jet(m, k, Complex::zero(P + 10), P);
    return {j.v.real(), j.d.real()};
  }
  if (m.family() == BaseFamily::torus) {
    if (k == n) return {make_real(0, P), make_real(0, P)};
    const Rational A = degree_data(n, k).A;
    const BigReal c = make_real(binomial(n - 1, k) * m.rank(), P + 10);
    auto z = detail::torus_epstein_at_zero(m, A * A, P + 5);
    return {make_real(c * z.value, P), make_real(c * z.derivative / 2, P)};
  }
  throw UnsupportedError("zeta_shifted_at_zero: not available for file bases");
}

namespace detail {

// Riesz means R(x) = sum_{nu <= x} m (1 - nu^2/x^2)^kappa have the expansion
// sum_poles Res * G(s0) x^s0 with G(s) = Gamma(kappa+1) Gamma(s/2) / (2 Gamma(s/2+kappa+1)).
// A least-squares fit over the top half of the recorded range gives the
// residues at s0 = n, n-2, ..., 1.
inline std::vector<MeromorphicPoint> fitted_residues(const BaseManifold& m, int k, int P) {
  const int n = m.dimension();
  const Rational A = degree_data(n, k).A;
  std::vector<NuLine> lines;
  for (const auto& l : m.file_lines())
    if (l.k == k) lines.push_back({l.eta + A * A, l.mult});
  const int npoles = (n + 1) / 2;
  std::vector<MeromorphicPoint> out;
  if (lines.empty()) {
    for (int r = 0; r < npoles; ++r) {
      MeromorphicPoint p;
      p.location = make_real(2 * r + 1, P);
      p.residue = make_real(0, P);
      p.approximate = true;
      out.push_back(p);
    }
    return out;
  }
  if (lines.size() < 16) throw UnsupportedError("fitted residues need at least 16 distinct eigenvalues in degree " + std::to_string(k));
  const int wp = 2 * P + 20;
  const int kappa = n + 3;
  std::vector<BigReal> nus;
  for (const auto& l : lines) nus.push_back(l.nu(wp));
  const BigReal xmax = nus.back();
  // exponents: poles n..1, then 0, -1, -2, -3 for the lower-order terms
  std::vector<int> ex;
  for (int e = n; e >= 1; e -= 2) ex.push_back(e);
  for (int e = 0; e >= -3; --e) ex.push_back(e);
  const int U = static_cast<int>(ex.size());
  auto fit = [&](const BigReal& lo, const BigReal& hi) {
    const int S = 8 * U;
    std::vector<std::vector<BigReal>> ata(U, std::vector<BigReal>(U, make_real(0, wp)));
    std::vector<BigReal> atb(U, make_real(0, wp));
    for (int i = 0; i < S; ++i) {
      BigReal x = lo + (hi - lo) * i / (S - 1);
      BigReal r = make_real(0, wp);
      for (std::size_t q = 0; q < lines.size() && nus[q] <= x; ++q)
        r += make_real(lines[q].mult, wp) * pow(1 - nus[q] * nus[q] / (x * x), make_real(kappa, wp));
      // columns scaled by xmax^e to keep the normal equations balanced
      std::vector<BigReal> row(U);
      for (int u = 0; u < U; ++u) row[u] = pow(x / xmax, make_real(ex[u], wp));
      for (int u = 0; u < U; ++u) {
        atb[u] += row[u] * r;
        for (int v = 0; v < U; ++v) ata[u][v] += row[u] * row[v];
      }
    }
    // Gaussian elimination with partial pivoting
    for (int c = 0; c < U; ++c) {
      int piv = c;
      for (int r = c + 1; r < U; ++r)
        if (abs(ata[r][c]) > abs(ata[piv][c])) piv = r;
      std::swap(ata[c], ata[piv]);
      std::swap(atb[c], atb[piv]);
      for (int r = c + 1; r < U; ++r) {
        BigReal f = ata[r][c] / ata[c][c];
        for (int v = c; v < U; ++v) ata[r][v] -= f * ata[c][v];
        atb[r] -= f * atb[c];
      }
    }
    std::vector<BigReal> sol(U);
    for (int c = U - 1; c >= 0; --c) {
      BigReal acc = atb[c];
      for (int v = c + 1; v < U; ++v) acc -= ata[c][v] * sol[v];
      sol[c] = acc / ata[c][c];
    }
    std::vector<BigReal> res;
    for (int r = 0; r < npoles; ++r) {
      const int e = ex[r];
      BigReal coeff = sol[r] / pow(xmax, make_real(e, wp));
      BigReal s2 = make_real(e, wp) / 2;
      BigReal G = gamma_fn(make_real(kappa + 1, wp), wp) * gamma_fn(s2, wp) / (2 * gamma_fn(s2 + kappa + 1, wp));
      res.push_back(coeff / G);
    }
    return res;
  };
  auto wide = fit(xmax / 2, xmax);
  auto narrow = fit(xmax * 2 / 3, xmax);
  for (int r = 0; r < npoles; ++r) {
    const int e = ex[r];
    MeromorphicPoint p;
    p.location = make_real(e, P);
    p.residue = make_real(wide[r], P);
    p.approximate = true;
    p.uncertainty = 4 * std::abs(to_double(wide[r] - narrow[r]));
    out.push_back(p);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Residue (and finite part when available) of zeta(s, N_k) at s = 2r+1 <= n.
inline MeromorphicPoint zeta_shifted_residue(const BaseManifold& m, int k, int r, int P) {
  check_precision(P);
  detail::check_degree(m, k);
  const int n = m.dimension();
  if (r < 0 || 2 * r + 1 > n) throw DomainError("zeta_shifted_residue: s = 2r+1 must lie in [1, n]");
  const int s0 = 2 * r + 1;
  switch (m.family()) {
    case BaseFamily::sphere: {
      const auto rep = zeta_representation(m, k);
      const int wp = P + 10;
      const BigReal a = make_real(rep.shift, wp);
      MeromorphicPoint p;
      p.location = make_real(s0, P);
      BigReal res = make_real(0, wp), fp = make_real(0, wp);
      for (const auto& t : rep.terms) {
        if (t.offset == 2 * r) {
          res += make_real(t.weight, wp);
          fp -= make_real(t.weight, wp) * digamma(a, wp);  // zeta_H(1+d, a) = 1/d - psi(a) + O(d)
        } else {
          fp += make_real(t.weight, wp) *
                hurwitz_zeta(Complex(make_real(s0 - t.offset, wp)), a, wp).real();
        }
      }
      p.residue = make_real(res, P);
      p.finite_part = make_real(fp, P);
      return p;
    }
    case BaseFamily::torus: {
      MeromorphicPoint p;
      p.location = make_real(s0, P);
      if (k == n) {
        p.residue = make_real(0, P);
        p.finite_part = make_real(0, P);
        return p;
      }
      const Rational A = degree_data(n, k).A;
      const int mm = (n - s0) / 2;
      const BigReal c = make_real(binomial(n - 1, k) * m.rank(), P + 10);
      if (mm > 0 && A == 0) {
        // no pole: regular value
        p.residue = make_real(0, P);
        p.finite_part = make_real(c * detail::torus_epstein(m, Rational(0), make_real(s0, P + 10) / 2, P + 5), P);
        return p;
      }
      auto e = detail::torus_epstein_pole(m, A * A, mm, P + 5);
      // zeta(s) = c Z(s/2): residue doubles, finite part scales by c
      p.residue = make_real(2 * c * e.residue, P);
      p.finite_part = make_real(c * *e.finite_part, P);
      return p;
    }
    case BaseFamily::file: {
      auto all = detail::fitted_residues(m, k, P);
      return all.at(r);
    }
  }
  throw UnsupportedError("zeta_shifted_residue: unknown base family");
}

// Exact residue for spheres (a rational number).
inline Rational sphere_residue_rational(const BaseManifold& m, int k, int r) {
  const auto rep = zeta_representation(m, k);
  Rational res = 0;
  for (const auto& t : rep.terms)
    if (t.offset == 2 * r) res += t.weight;
  return res;
}

// --- coclosed Laplacian at s = 0 --------------------------------------------

namespace detail {

// zeta(0, Delta_k) and zeta'(0, Delta_k) for spheres, through
// zeta'(0, Delta) = 2 zeta'(0, N) + S with
// S = -sum_{nu <= nu_c} m log(1 - A^2/nu^2) + sum_j A^(2j)/j zeta_tail(2j, N).
inline ZetaAtZero sphere_ccl_at_zero(const BaseManifold& m, int k, int P) {
  const int n = m.dimension();
  const Rational A = degree_data(n, k).A;
  const auto rep = zeta_representation(m, k);
  const auto c = sphere_multiplicity_polynomial(n, k);
  const int deg = n - 1;
  Jet j0 = sphere_zeta_jet(m, k, Complex::zero(P + 10), P + 10);
  if (A == 0 || rep.terms.empty()) return {make_real(j0.v.real(), P), make_real(2 * j0.d.real(), P)};
  const double Ad = std::abs(A.convert_to<double>());
  const Rational a = rep.shift;
  long J = 0;  // nu_c = a + J
  while ((a + J + 1).convert_to<double>() < 8 * Ad + 2) ++J;
  const Rational nuc = a + J;
  const int wp = P + 15 + static_cast<int>(std::ceil((deg + 1) * std::log10(nuc.convert_to<double>() + 2)));
  const BigReal A2 = make_real(A * A, wp);
  BigReal S = make_real(0, wp);
  for (long j = 0; j <= J; ++j) {
    Rational nu = a + j;
    Rational mult = 0;
    for (int e = deg; e >= 0; --e) mult = mult * nu + c[e];
    BigReal nur = make_real(nu, wp);
    S -= make_real(mult * m.rank(), wp) * log(1 - A2 / (nur * nur));
  }
  const BigReal tail_shift = make_real(nuc + 1, wp);
  BigReal A2j = make_real(1, wp);
  const double ratio = to_double(A2 / (tail_shift * tail_shift));
  int small = 0;
  for (int j = 1; j < 2000; ++j) {
    A2j *= A2;
    BigReal zt = make_real(0, wp);
    for (const auto& t : rep.terms)
      zt += make_real(t.weight, wp) * hurwitz_zeta(Complex(make_real(2 * j - t.offset, wp)), tail_shift, wp).real();
    BigReal term = A2j / j * zt;
    S += term;
    // geometric tail with ratio A^2/(nu_c+1)^2 once the terms are decreasing
    if (log10_abs(term) - std::log10(1 - ratio) < log10_abs(S) - (wp - 5) || log10_abs(term) < -(wp + 5)) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  return {make_real(j0.v.real(), P), make_real(2 * j0.d.real() + S, P)};
}

}  // namespace detail

// zeta(0, Delta_k^ccl) and zeta'(0, Delta_k^ccl).
inline ZetaAtZero zeta_ccl_at_zero(const BaseManifold& m, int k, int P) {
  check_precision(P);
  detail::check_degree(m, k);
  const int n = m.dimension();
  switch (m.family()) {
    case BaseFamily::sphere:
      return detail::sphere_ccl_at_zero(m, k, P);
    case BaseFamily::torus: {
      if (k == n) return {make_real(0, P), make_real(0, P)};
      const BigReal c = make_real(binomial(n - 1, k) * m.rank(), P + 10);
      auto z = detail::torus_epstein_at_zero(m, Rational(0), P + 5);
      return {make_real(c * z.value, P), make_real(c * z.derivative, P)};
    }
    case BaseFamily::file:
      throw UnsupportedError("zeta_ccl_at_zero: derivative at zero needs a closed-form spectrum");
  }
  throw UnsupportedError("zeta_ccl_at_zero: unknown base family");
}

// log T(M) = -sum_{k <= (n-1)/2} (-1)^k delta_k zeta'(0, Delta_k^ccl).
inline BigReal base_torsion(const BaseManifold& m, int P) {
  const int n = m.dimension();
  BigReal acc = make_real(0, P + 5);
  for (int k = 0; 2 * k <= n - 1; ++k) {
    auto d = degree_data(n, k);
    BigReal z = zeta_ccl_at_zero(m, k, P + 5).derivative;
    acc -= make_real(d.delta, P + 5) * (k % 2 == 0 ? z : BigReal(-z));
  }
  return make_real(acc, P);
}

// The same quantity from the full form Laplacians over every degree:
// 1/2 sum_k (-1)^k k zeta'(0, Delta_k), with zeta(s, Delta_k) = zeta_k^ccl + zeta_{k-1}^ccl.
inline BigReal base_torsion_full_forms(const BaseManifold& m, int P) {
  const int n = m.dimension();
  std::vector<BigReal> z(n + 1);
  for (int k = 0; k <= n; ++k) z[k] = zeta_ccl_at_zero(m, k, P + 5).derivative;
  BigReal acc = make_real(0, P + 5);
  for (int k = 1; k <= n; ++k) {
    BigReal full = z[k] + z[k - 1];
    acc += (k % 2 == 0 ? full : BigReal(-full)) * k;
  }
  return make_real(acc / 2, P);
}

// --- direct sums ------------------------------------------------------------

struct DirectSum {
  BigReal value;
  BigReal tail_estimate;  // Weyl estimate of the omitted part
  std::size_t lines = 0;
};

// sum_{nu <= cutoff} m nu^(-s) for real s > n, with the Weyl tail
// C n X^(n-s)/(s-n) as an estimate of the rest.
inline DirectSum zeta_shifted_direct(const BaseManifold& m, int k, const BigReal& s_in, const Rational& cutoff, int P) {
  check_precision(P);
  const int n = m.dimension();
  if (!(s_in > n)) throw DomainError("zeta_shifted_direct: needs s > n");
  const int wp = P + 10;
  const BigReal s = make_real(s_in, wp);
  DirectSum out;
  BigReal acc = make_real(0, wp);
  for (const auto& l : nu_stream(m, k, cutoff)) {
    acc += make_real(l.mult, wp) * exp(-s * log(l.nu(wp)));
    ++out.lines;
  }
  out.value = make_real(acc, P);
  if (m.family() == BaseFamily::file) {
    out.tail_estimate = make_real(0, P);
  } else {
    BigReal X = make_real(cutoff, wp);
    out.tail_estimate =
        make_real(weyl_constant(m, k, wp) * n * pow(X, make_real(n, wp) - s) / (s - n), P);
  }
  return out;
}

// --- binomial route ---------------------------------------------------------

namespace detail {

// sum_{nu > nu_c} p(nu) (nu^2 - A^2)^(-sp) by Euler-Maclaurin, where nu runs
// over nu_c + 1, nu_c + 2, ... and p(nu) = sum c_i nu^i. Real sp, with the
// integral tail expanded binomially. Throws DomainError on a pole of the tail.
inline BigReal em_tail(const std::vector<Rational>& c, const Rational& A, const Rational& nuc, const BigReal& sp, int wp) {
  const int d = static_cast<int>(c.size()) - 1;
  const BigReal A2 = make_real(A * A, wp);
  const double spd = to_double(sp);
  double cmax = 0;
  for (const auto& ci : c) cmax = std::max(cmax, std::abs(ci.convert_to<double>()));
  const double sabs = 2 * std::abs(spd) + d + 1;
  const double sig = 2 * spd - d;
  long K = std::max<long>(10, static_cast<long>(wp * 0.6 + sabs));
  int M = std::max(4, static_cast<int>(std::ceil(wp * 0.6 + sabs / 2)));
  const double Ad = std::abs(A.convert_to<double>());
  Rational N = nuc + 1 + K;
  while (em_bound_log10(sabs, sig, N.convert_to<double>() - Ad, M) + std::log10(cmax + 1) > -(wp - 5)) {
    K += K / 2;
    N = nuc + 1 + K;
    if (K > 1000000) throw PrecisionError("em_tail: cut-off too large");
  }
  auto g = [&](const BigReal& nu) {
    BigReal p = make_real(0, wp);
    for (int e = d; e >= 0; --e) p = p * nu + make_real(c[e], wp);
    return p * exp(-sp * log(nu * nu - A2));
  };
  BigReal sum = make_real(0, wp);
  for (long j = 1; j <= K; ++j) sum += g(make_real(nuc + j, wp));
  const BigReal Nr = make_real(N, wp);
  // integral: sum_i c_i sum_l C(-sp, l) (-A^2)^l N^(i - 2sp - 2l + 1) / (2sp + 2l - i - 1)
  BigReal integral = make_real(0, wp);
  for (int i = 0; i <= d; ++i) {
    if (c[i] == 0) continue;
    BigReal bin = make_real(1, wp);  // C(-sp, l)
    BigReal mA = make_real(1, wp);   // (-A^2)^l
    for (int l = 0; l < 100000; ++l) {
      if (l > 0) {
        bin = bin * (-sp - (l - 1)) / l;
        mA *= -A2;
      }
      BigReal den = 2 * sp + 2 * l - i - 1;
      if (den == 0) {
        if (bin * mA == 0) continue;
        throw DomainError("em_tail: pole of the tail");
      }
      BigReal term = make_real(c[i], wp) * bin * mA * pow(Nr, i - 2 * sp - 2 * l + 1) / den;
      integral += term;
      if (A2 == 0 || (l > 2 && log10_abs(term) < log10_abs(integral) - wp - 5) || bin == 0) break;
    }
  }
  sum += integral;
  sum += g(Nr) / 2;
  // Taylor coefficients of g(N + h) up to order 2M - 1
  const int T = 2 * M;
  std::vector<BigReal> pc(T, make_real(0, wp));  // p(N + h)
  for (int l = 0; l <= d && l < T; ++l) {
    Rational acc = 0;
    for (int i = l; i <= d; ++i) acc += c[i] * binomial(i, l) * rational_pow(N, i - l);
    pc[l] = make_real(acc, wp);
  }
  // q(h) = (N^2 - A^2) + 2N h + h^2, f = q^(-sp) by the power recurrence
  std::vector<BigReal> qb{Nr * Nr - A2, 2 * Nr, make_real(1, wp)};
  std::vector<BigReal> f(T, make_real(0, wp));
  f[0] = exp(-sp * log(qb[0]));
  const BigReal alpha = -sp;
  for (int kk = 1; kk < T; ++kk) {
    BigReal acc = make_real(0, wp);
    for (int j = 1; j <= std::min(kk, 2); ++j) acc += ((alpha + 1) * j - kk) * qb[j] * f[kk - j];
    f[kk] = acc / (qb[0] * kk);
  }
  for (int kk = 1; kk <= M; ++kk) {
    const int o = 2 * kk - 1;
    BigReal gc = make_real(0, wp);
    for (int l = 0; l <= o; ++l) gc += pc[l] * f[o - l];
    // B_2k/(2k)! g^(2k-1)(N) = B_2k/(2k) * coefficient of h^(2k-1)
    sum -= make_real(bernoulli(2 * kk), wp) / (2 * kk) * gc;
  }
  return sum;
}

inline BigReal sphere_binomial_route_raw(const BaseManifold& m, int k, const BigReal& s, int wp) {
  const int n = m.dimension();
  const Rational A = degree_data(n, k).A;
  const auto rep = zeta_representation(m, k);
  std::vector<Rational> c = sphere_multiplicity_polynomial(n, k);
  for (auto& ci : c) ci *= m.rank();
  const double Ad = std::abs(A.convert_to<double>());
  const Rational a = rep.shift;
  long J = 0;
  while ((a + J + 1).convert_to<double>() < 8 * Ad + 2) ++J;
  const Rational nuc = a + J;
  BigReal head = make_real(0, wp);
  for (long j = 0; j <= J; ++j) {
    Rational nu = a + j, mult = 0;
    for (int e = static_cast<int>(c.size()) - 1; e >= 0; --e) mult = mult * nu + c[e];
    head += make_real(mult, wp) * exp(-2 * s * log(make_real(nu, wp)));
  }
  BigReal tail = make_real(0, wp);
  BigReal bin = make_real(1, wp), a2 = make_real(A * A, wp), a2j = make_real(1, wp);
  int small = 0;
  for (int j = 0; j <= 400; ++j) {
    if (j > 0) {
      bin = bin * (-s - (j - 1)) / j;
      a2j *= a2;
    }
    if (bin == 0) break;
    BigReal term = bin * a2j * em_tail(c, A, nuc, s + j, wp);
    tail += term;
    if (A == 0) break;
    if (log10_abs(term) < log10_abs(tail) - wp + 3) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  return head + tail;
}

}  // namespace detail

// zeta(2s, N_k) from the coclosed Laplacian zeta:
// sum_j C(-s, j) A^(2j) zeta(s + j, Delta_k), evaluated with an explicit head
// below nu_c and Euler-Maclaurin tails. Spheres only, real s. Where single
// terms of the expansion have cancelling poles the value is taken as a
// symmetric limit with Richardson correction.
inline BigReal zeta_shifted_binomial_route(const BaseManifold& m, int k, const BigReal& s_in, int P) {
  check_precision(P);
  detail::check_degree(m, k);
  if (m.family() != BaseFamily::sphere) throw UnsupportedError("binomial route: implemented for spheres");
  const int wp = 2 * P + 20;
  const BigReal s = make_real(s_in, wp);
  try {
    return make_real(detail::sphere_binomial_route_raw(m, k, s, wp), P);
  } catch (const DomainError&) {
  }
  const BigReal d = pow(make_real(10, wp), -make_real(P / 4 + 3, wp));
  auto avg = [&](const BigReal& h) {
    return (detail::sphere_binomial_route_raw(m, k, s + h, wp) + detail::sphere_binomial_route_raw(m, k, s - h, wp)) / 2;
  };
  BigReal a1 = avg(d), a2 = avg(2 * d);
  return make_real((4 * a1 - a2) / 3, P);
}

// Residue in s of zeta(2s, N_k) at s = s0 from the binomial route, as the
// symmetric-difference limit delta (F(s0 + delta) - F(s0 - delta)) / 2.
inline BigReal zeta_shifted_binomial_residue(const BaseManifold& m, int k, const BigReal& s0, int P) {
  check_precision(P);
  if (m.family() != BaseFamily::sphere) throw UnsupportedError("binomial route: implemented for spheres");
  const int wp = 2 * P + 20;
  const BigReal s = make_real(s0, wp);
  const BigReal d = pow(make_real(10, wp), -make_real(P / 4 + 3, wp));
  auto diff = [&](const BigReal& h) {
    return h * (detail::sphere_binomial_route_raw(m, k, s + h, wp) - detail::sphere_binomial_route_raw(m, k, s - h, wp)) / 2;
  };
  BigReal r1 = diff(d), r2 = diff(2 * d);
  return make_real((4 * r1 - r2) / 3, P);
}

// --- per-degree report ------------------------------------------------------

struct ZetaDegreeReport {
  int k = 0;
  std::optional<BigReal> zeta0;
  std::optional<BigReal> zeta0_prime;
  std::vector<MeromorphicPoint> residues;
};

inline std::vector<ZetaDegreeReport> zeta_report(const BaseManifold& m, int P) {
  std::vector<ZetaDegreeReport> out;
  const int n = m.dimension();
  for (int k = 0; k <= n; ++k) {
    ZetaDegreeReport r;
    r.k = k;
    if (m.has_closed_form()) {
      auto z = zeta_shifted_at_zero(m, k, P);
      r.zeta0 = z.value;
      r.zeta0_prime = z.derivative;
    }
    for (int q = 0; 2 * q + 1 <= n; ++q) r.residues.push_back(zeta_shifted_residue(m, k, q, P));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace conetorsion
