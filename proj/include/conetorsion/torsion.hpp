#pragma once

// Assembly of the cone torsion: topological term, base torsion, residual
// term from the zeta residues, harmonic sector and epsilon bookkeeping.

#include "conetorsion/berezin.hpp"
#include "conetorsion/model_operators.hpp"
#include "conetorsion/zeta.hpp"

#include <optional>
#include <vector>

namespace conetorsion {

namespace detail {

inline void check_eps(const BigReal& eps) {
  if (!(eps > 0 && eps < 1)) throw DomainError("eps must lie in (0,1)");
}

inline int half_range(const BaseManifold& m) { return (m.dimension() - 1) / 2; }

// psi(j + 1/2) = -gamma - 2 log 2 + rational part; the rational part.
inline Rational digamma_half_rational(int j) {
  Rational s = 0;
  for (int i = 1; i <= j; ++i) s += Rational(2, 2 * i - 1);
  return s;
}

}  // namespace detail

// sum_{k <= (n-1)/2} ((-1)^k / 2) b_k log(n - 2k + 1), b_k including the rank.
inline BigReal top_term(const BaseManifold& m, int P) {
  check_precision(P);
  const int n = m.dimension(), wp = P + 5;
  BigReal acc = make_real(0, wp);
  for (int k = 0; k <= detail::half_range(m); ++k) {
    BigReal t = make_real(m.betti(k), wp) * log(make_real(n - 2 * k + 1, wp)) / 2;
    acc += k % 2 ? BigReal(-t) : t;
  }
  return make_real(acc, P);
}

// sum_b [2 x_{m,b} - z_{m,b}(-A) - z_{m,b}(A)] psi(b + r + 1/2), m = 2r+1.
inline BigReal residual_bracket(int r, const Rational& A, int P) {
  const int mo = 2 * r + 1, wp = P + 10;
  XZCoefficients c = xz_coefficients(mo);
  BigReal acc = make_real(0, wp);
  for (int b = 0; b <= mo; ++b) {
    Rational w = 2 * c.x[b] - c.z[b].evaluate(-A) - c.z[b].evaluate(A);
    if (w != 0) acc += make_real(w, wp) * digamma(make_real(2 * (b + r) + 1, wp) / 2, wp);
  }
  return make_real(acc, P);
}

// The same bracket, exact: the gamma and log 2 parts cancel because the
// coefficients sum to zero.
inline Rational residual_bracket_exact(int r, const Rational& A) {
  const int mo = 2 * r + 1;
  XZCoefficients c = xz_coefficients(mo);
  Rational acc = 0, total = 0;
  for (int b = 0; b <= mo; ++b) {
    Rational w = 2 * c.x[b] - c.z[b].evaluate(-A) - c.z[b].evaluate(A);
    total += w;
    acc += w * detail::digamma_half_rational(b + r);
  }
  if (total != 0) throw StructuralError("residual bracket: coefficients do not sum to zero");
  return acc;
}

struct ResidualTerm {
  BigReal value;
  bool approximate = false;
  BigReal uncertainty;
};

// (1/2) sum_{r=1}^{(n-1)/2} Res zeta_{k,N}(2r+1) * residual_bracket(r, A_k).
inline ResidualTerm residual_degree(const BaseManifold& m, int k, int P) {
  check_precision(P);
  const int n = m.dimension(), wp = P + 10;
  if (k < 0 || k > detail::half_range(m)) throw DomainError("residual_degree: k must lie in [0, (n-1)/2]");
  const Rational A = degree_data(n, k).A;
  ResidualTerm out{make_real(0, wp), false, make_real(0, wp)};
  for (int r = 1; 2 * r + 1 <= n; ++r) {
    MeromorphicPoint p = zeta_shifted_residue(m, k, r, wp);
    BigReal br = residual_bracket(r, A, wp);
    out.value += p.residue * br / 2;
    if (p.approximate) {
      out.approximate = true;
      out.uncertainty += abs(p.uncertainty * br) / 2;
    }
  }
  out.value = make_real(out.value, P);
  out.uncertainty = make_real(out.uncertainty, P);
  return out;
}

// zeta'_k(0, eps) = -zeta'(0, Delta_k^ccl) - 2 log(eps) zeta(0, Delta_k^ccl) + residual_degree(k).
inline BigReal zeta_k_prime_zero(const BaseManifold& m, int k, const BigReal& eps, int P) {
  check_precision(P);
  detail::check_eps(eps);
  if (k < 0 || k > detail::half_range(m)) throw DomainError("zeta_k_prime_zero: k must lie in [0, (n-1)/2]");
  const int wp = P + 10;
  ZetaAtZero z = zeta_ccl_at_zero(m, k, wp);
  BigReal v = -z.derivative - 2 * log(make_real(eps, wp)) * z.value + residual_degree(m, k, wp).value;
  return make_real(v, P);
}

// (1/2) log(eps) sum_k (-1)^k k b_k - (1/2) sum_{k <= (n-1)/2} (-1)^k b_k log(n - 2k + 1).
inline BigReal harmonic_term(const BaseManifold& m, const BigReal& eps, int P) {
  check_precision(P);
  detail::check_eps(eps);
  const int n = m.dimension(), wp = P + 5;
  long weighted = 0;
  for (int k = 0; k <= n; ++k) weighted += (k % 2 ? -1 : 1) * k * m.betti(k);
  BigReal v = log(make_real(eps, wp)) * weighted / 2 - top_term(m, wp);
  return make_real(v, P);
}

// The same from the truncated harmonic determinants 2 eps^(k - n/2) plus the
// full-cone harmonic part.
inline BigReal harmonic_term_from_h_det(const BaseManifold& m, const BigReal& eps, int P) {
  check_precision(P);
  detail::check_eps(eps);
  const int n = m.dimension(), wp = P + 5;
  BigReal acc = make_real(0, wp);
  const BigReal e = make_real(eps, wp);
  for (int k = 0; k <= n; ++k) {
    BigReal t = make_real(m.betti(k), wp) * log(h_det(k, n, e)) / 2;
    acc += k % 2 ? BigReal(-t) : t;
  }
  return make_real(acc - top_term(m, wp), P);
}

struct EpsilonReport {
  BigReal eps;
  std::vector<BigReal> zeta_prime;  // zeta'_k(0, eps), k = 0..(n-1)/2
  BigReal harmonic;
  BigReal value;
  BigReal log_eps_coefficient;  // must vanish
  BigReal base_torsion_share;   // (1/2) log T(N)
};

// log T(C_eps(N)) - log T(C(N)) assembled from the per-degree zeta
// derivatives and the harmonic term.
inline EpsilonReport torsion_difference(const BaseManifold& m, const BigReal& eps, int P) {
  check_precision(P);
  detail::check_eps(eps);
  const int n = m.dimension(), wp = P + 10;
  EpsilonReport rep;
  rep.eps = eps;
  BigReal acc = make_real(0, wp), coeff = make_real(0, wp), tors = make_real(0, wp);
  for (int k = 0; k <= detail::half_range(m); ++k) {
    const BigReal delta = make_real(degree_data(n, k).delta, wp);
    const BigReal sign = make_real(k % 2 ? -1 : 1, wp);
    BigReal zp = zeta_k_prime_zero(m, k, eps, wp);
    rep.zeta_prime.push_back(make_real(zp, P));
    acc += sign * delta * zp / 2;
    ZetaAtZero z = zeta_ccl_at_zero(m, k, wp);
    coeff -= sign * delta * z.value;
    tors -= sign * delta * z.derivative;
  }
  long weighted = 0;
  for (int k = 0; k <= n; ++k) weighted += (k % 2 ? -1 : 1) * k * m.betti(k);
  coeff += make_real(weighted, wp) / 2;
  rep.harmonic = harmonic_term(m, eps, P);
  rep.value = make_real(acc + harmonic_term(m, eps, wp), P);
  rep.log_eps_coefficient = make_real(coeff, P);
  rep.base_torsion_share = make_real(tors / 2, P);
  return rep;
}

struct TruncatedTorsion {
  BigReal spectral;  // sum_k ((-1)^k / 2) delta_k sum_r Res ... psi
  std::optional<Rational> spectral_exact;
  bool approximate = false;
  BigReal uncertainty;
  std::optional<BigReal> anomaly;  // rank * int_N B
  std::optional<SurdPiMultiple> anomaly_exact;
};

// Spectral side, exact for spheres.
inline Rational truncated_spectral_exact(const BaseManifold& m) {
  if (m.family() != BaseFamily::sphere) throw UnsupportedError("truncated_spectral_exact: spheres only");
  const int n = m.dimension();
  Rational acc = 0;
  for (int k = 0; k <= detail::half_range(m); ++k) {
    const DegreeData d = degree_data(n, k);
    Rational s = 0;
    for (int r = 1; 2 * r + 1 <= n; ++r) s += sphere_residue_rational(m, k, r) * residual_bracket_exact(r, d.A);
    acc += (k % 2 ? -1 : 1) * d.delta * s / 2;
  }
  return acc;
}

inline TruncatedTorsion truncated_cone_torsion(const BaseManifold& m, int P) {
  check_precision(P);
  const int n = m.dimension(), wp = P + 10;
  TruncatedTorsion out;
  BigReal acc = make_real(0, wp), unc = make_real(0, wp);
  for (int k = 0; k <= detail::half_range(m); ++k) {
    const BigReal delta = make_real(degree_data(n, k).delta, wp);
    ResidualTerm r = residual_degree(m, k, wp);
    // residual_degree carries a factor 1/2 already
    BigReal t = delta * r.value;
    acc += k % 2 ? BigReal(-t) : t;
    if (r.approximate) {
      out.approximate = true;
      unc += delta * r.uncertainty;
    }
  }
  out.spectral = make_real(acc, P);
  out.uncertainty = make_real(unc, P);
  if (m.family() == BaseFamily::sphere) out.spectral_exact = truncated_spectral_exact(m);
  if (m.volume() && m.curvature()) {
    SurdPiMultiple b = integrated_b(m);
    b.coeff = b.coeff * QuadraticSurd{Rational(m.rank()), Rational(0), Rational(1)};
    out.anomaly_exact = b;
    out.anomaly = b.value(P);
  }
  return out;
}

struct TorsionBreakdown {
  BigReal top;
  std::optional<BigReal> tors;  // -(1/2) log T(N)
  BigReal res_spectral;         // (1/2) spectral side
  std::optional<BigReal> res_anomaly;  // (rank/2) int_N B
  std::optional<BigReal> total;        // top + tors + res_spectral
  std::optional<BigReal> headline_gap; // spectral side - rank int_N B
  std::optional<BigReal> eps_cancel;   // |difference(1/2) - difference(1/4)|
  bool approximate = false;
  BigReal res_uncertainty;
};

inline TorsionBreakdown cone_torsion(const BaseManifold& m, int P) {
  check_precision(P);
  const int wp = P + 10;
  TorsionBreakdown out;
  out.top = top_term(m, P);
  TruncatedTorsion tr = truncated_cone_torsion(m, wp);
  out.res_spectral = make_real(tr.spectral / 2, P);
  out.approximate = tr.approximate;
  out.res_uncertainty = make_real(tr.uncertainty / 2, P);
  if (tr.anomaly) {
    out.res_anomaly = make_real(*tr.anomaly / 2, P);
    out.headline_gap = make_real(tr.spectral - *tr.anomaly, P);
  }
  if (m.has_closed_form()) {
    BigReal lt = base_torsion(m, wp);
    out.tors = make_real(-lt / 2, P);
    out.total = make_real(out.top + *out.tors + tr.spectral / 2, P);
    const BigReal half = make_real(1, wp) / 2, quarter = make_real(1, wp) / 4;
    BigReal d1 = torsion_difference(m, half, wp).value, d2 = torsion_difference(m, quarter, wp).value;
    out.eps_cancel = make_real(abs(d1 - d2), P);
  }
  return out;
}

// cone torsion recovered as log T(C_eps(N)) - (log T(C_eps(N)) - log T(C(N))).
inline BigReal cone_torsion_from_difference(const BaseManifold& m, const BigReal& eps, int P) {
  const int wp = P + 10;
  TruncatedTorsion tr = truncated_cone_torsion(m, wp);
  return make_real(tr.spectral - torsion_difference(m, eps, wp).value, P);
}

// top - (1/2) log T(N) + log of the harmonic norm; the anomaly term drops out
// for the product metric near the boundary.
inline BigReal product_metric_norm_shift(const BaseManifold& m, const BigReal& harmonic_norm_log, int P) {
  check_precision(P);
  const int wp = P + 10;
  return make_real(top_term(m, wp) - base_torsion(m, wp) / 2 + harmonic_norm_log, P);
}

}  // namespace conetorsion
