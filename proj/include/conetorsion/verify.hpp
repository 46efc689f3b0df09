#pragma once

// Verification suites shared by the command line and the acceptance runner.

#include "conetorsion/torsion.hpp"

#include <chrono>
#include <functional>
#include <string>
#include <vector>

namespace conetorsion {

struct Check {
  std::string label;
  bool passed = false;
  std::string measured;
  std::string tolerance;
};

struct SuiteResult {
  std::string name;
  std::vector<Check> checks;
  double seconds = 0;
  std::string error;  // set when the suite itself threw

  bool passed() const {
    if (!error.empty()) return false;
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
};

struct VerifyOptions {
  int precision = 50;
  int rmax = kOlverMaxOrder;
  bool small_grid = false;
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

inline SuiteResult run_suite(const std::string& name, const std::function<void(std::vector<Check>&)>& body) {
  SuiteResult r;
  r.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r.checks);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

}  // namespace detail

// M_r(1, A) - D_r(1) + (-A)^r / r = 0 exactly.
inline SuiteResult suite_dm(const VerifyOptions& o) {
  return detail::run_suite("dm", [&](std::vector<Check>& out) {
    for (int r = 1; r <= o.rmax; ++r)
      for (const Rational& a : {Rational(0), Rational(1), Rational(-1), Rational(2), Rational(-2), Rational(7, 2)}) {
        Rational d = dm_defect(r, a);
        out.push_back({"r=" + std::to_string(r) + " A=" + to_string(a), d == 0, to_string(d), "exact"});
      }
  });
}

// z (K I' - K' I) = 1 at 50 digits.
inline SuiteResult suite_wronskian(const VerifyOptions&) {
  return detail::run_suite("wronskian", [&](std::vector<Check>& out) {
    const int P = 50, wp = 60;
    struct Pt {
      Rational nu;
      double re, im;
    };
    const std::vector<Pt> grid = {{Rational(0), 0.5, 0},   {Rational(1, 3), 1, 1},     {Rational(1), 2, 0},
                                  {Rational(1), 0.3, -2},  {Rational(5, 2), 7, 3},     {Rational(5, 2), 0, 4},
                                  {Rational(4), 0.01, 0},  {Rational(7), 15, -15},    {Rational(12), 3, 0},
                                  {Rational(20), 25, 10},  {Rational(37, 2), 60, 0},  {Rational(3, 2), 1e-3, 40}};
    for (const auto& g : grid) {
      Complex z(make_double(g.re, wp), make_double(g.im, wp));
      BigReal nu = make_real(g.nu, wp);
      BesselIK b = bessel_ik(nu, z, wp);
      Complex w = z * (b.k * b.ip - b.kp * b.i) - 1;
      BigReal gap = abs(w);
      bool ok = gap <= pow(make_real(10, P), make_real(-40, P));
      out.push_back({"nu=" + to_string(g.nu) + " z=" + to_decimal(z, 4), ok, to_decimal(gap, 3), "1e-40"});
    }
  });
}

// Truncated determinant ratios against products over oracle eigenvalues.
inline SuiteResult suite_detratio(const VerifyOptions& o) {
  return detail::run_suite("detratio", [&](std::vector<Check>& out) {
    std::vector<Rational> nus = {Rational(3, 2), Rational(5, 2), Rational(4)};
    std::vector<Rational> as = {Rational(-1, 2), Rational(0), Rational(1)};
    std::vector<Rational> eps = {Rational(1, 4), Rational(1, 3), Rational(1, 2)};
    if (o.small_grid) {
      nus = {Rational(3, 2)};
      as = {Rational(1, 2)};
      eps = {Rational(1, 3)};
    }
    const std::vector<double> zs = {0.5, 2.0};
    int idx = 0;
    for (const auto& nu : nus)
      for (const auto& a : as)
        for (const auto& e : eps)
          for (Variant v : {Variant::psi2, Variant::phi2, Variant::psi0, Variant::phi0}) {
            const BigReal nr = make_real(nu, 40), er = make_real(e, 40);
            ModelOperator op = make_model_operator(v, nr, a, er);
            OracleOptions oo;
            // the argument principle on the first grid point of each variant,
            // the oscillation theorem everywhere
            oo.check = idx++ < 4 ? CountCheck::argument_principle : CountCheck::oscillation;
            std::vector<double> lam = eigenvalues_oracle(op, 200, oo);
            for (double z : zs) {
              double est = log_det_ratio_from_eigenvalues(lam, to_double(nr) * z);
              Complex cf = det_ratio_truncated(v, nr, a, Complex(make_double(z, 40)), er, 30).value;
              double rel = std::abs(std::exp(est - to_double(log(cf).real())) - 1);
              out.push_back({op.descriptor() + " z=" + detail::sci(z), rel <= 1e-6, detail::sci(rel), "1e-6"});
            }
          }
  });
}

// det H^k_0 = 2 eps^(k - n/2) against the solution route.
inline SuiteResult suite_hdet(const VerifyOptions& o) {
  return detail::run_suite("hdet", [&](std::vector<Check>& out) {
    for (int n : {1, 3})
      for (int k = 0; k <= n; ++k)
        for (const Rational& e : {Rational(1, 2), Rational(1, 4)}) {
          BigReal er = make_real(e, o.precision + 10);
          BigReal gap = abs(h_det(k, n, er) - h_det_from_solution(k, n, er, o.precision));
          out.push_back({"n=" + std::to_string(n) + " k=" + std::to_string(k) + " eps=" + to_string(e),
                         to_double(gap) <= 1e-8, to_decimal(gap, 3), "1e-8"});
        }
  });
}

// t(0) = 0, also approached along the negative axis.
inline SuiteResult suite_tzero(const VerifyOptions& o) {
  return detail::run_suite("tzero", [&](std::vector<Check>& out) {
    const int P = std::max(o.precision, 40);
    struct Pt {
      int k, n;
      Rational nu, eps;
    };
    const std::vector<Pt> grid = {{0, 1, Rational(1), Rational(1, 2)},     {0, 3, Rational(2), Rational(1, 2)},
                                  {1, 3, Rational(1), Rational(1, 4)},     {0, 3, Rational(5, 2), Rational(1, 3)},
                                  {2, 5, Rational(3), Rational(1, 2)},     {1, 5, Rational(7, 2), Rational(1, 4)},
                                  {0, 5, Rational(9, 4), Rational(2, 3)},  {3, 7, Rational(5), Rational(1, 2)},
                                  {0, 7, Rational(4), Rational(1, 10)}};
    const BigReal tol = pow(make_real(10, P), make_real(-20, P));
    for (const auto& g : grid) {
      const BigReal nu = make_real(g.nu, P + 10), e = make_real(g.eps, P + 10);
      BigReal at0 = abs(t_function(g.k, g.n, nu, e, Complex::zero(P), P));
      Complex tiny(-pow(make_real(10, P + 10), make_real(-30, P + 10)));
      BigReal near0 = abs(t_function(g.k, g.n, nu, e, tiny, P));
      std::string lab = "k=" + std::to_string(g.k) + " n=" + std::to_string(g.n) + " nu=" + to_string(g.nu) +
                        " eps=" + to_string(g.eps);
      out.push_back({lab + " lambda=0", at0 <= tol, to_decimal(at0, 3), "1e-20"});
      out.push_back({lab + " lambda=-1e-30", near0 <= tol, to_decimal(near0, 3), "1e-20"});
    }
  });
}

// log-log slope of |t - log(-lambda) - b| over -lambda in [1e2, 1e6].
inline SuiteResult suite_ab(const VerifyOptions& o) {
  return detail::run_suite("ab", [&](std::vector<Check>& out) {
    const int P = o.precision;
    struct Pt {
      int k, n;
      Rational nu, eps;
    };
    for (const auto& g : std::vector<Pt>{{0, 3, Rational(5, 2), Rational(1, 2)}, {1, 3, Rational(2), Rational(1, 3)}}) {
      const BigReal nu = make_real(g.nu, P + 10), e = make_real(g.eps, P + 10);
      ABCoefficients ab = ab_coefficients(g.k, g.n, nu, e);
      std::vector<double> xs, ys;
      for (int d = 0; d <= 8; ++d) {
        double lam = std::pow(10.0, 2 + d * 0.5);
        Complex l(make_double(-lam, P + 10));
        Complex t = t_function(g.k, g.n, nu, e, l, P);
        Complex rem = t - log(-l) * ab.a - Complex(ab.b);
        xs.push_back(std::log10(lam));
        ys.push_back(to_double(log10(abs(rem))));
      }
      double slope = detail::least_squares_slope(xs, ys);
      out.push_back({"k=" + std::to_string(g.k) + " n=" + std::to_string(g.n) + " nu=" + to_string(g.nu),
                     std::abs(slope + 0.5) <= 0.1, detail::sci(slope), "-0.5 +- 0.1"});
    }
  });
}

// Remainder after R large-nu terms decays like nu^(-R-1).
inline SuiteResult suite_largenu(const VerifyOptions& o) {
  return detail::run_suite("largenu", [&](std::vector<Check>& out) {
    const int P = std::max(o.precision, 40);
    const BigReal e = make_real(Rational(1, 2), P + 10);
    const Complex lam(make_real(-1, P + 10));
    for (const Rational& a : {Rational(1, 2), Rational(-1)}) {
      for (int R = 1; R <= 4; ++R) {
        double err[3];
        int i = 0;
        for (int nu : {20, 40, 80}) {
          BigReal nr = make_real(nu, P + 10);
          err[i++] = to_double(abs(t_function(a, nr, e, lam, P) - t_large_nu_partial(a, nr, e, lam, R, P)));
        }
        double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
        bool ok = std::abs(o2 - (R + 1)) <= 0.2;
        out.push_back({"A=" + to_string(a) + " R=" + std::to_string(R), ok, detail::sci(o1) + "," + detail::sci(o2),
                       std::to_string(R + 1) + " +- 0.2"});
      }
    }
  });
}

// The assembled cone/cylinder difference does not depend on eps.
inline SuiteResult suite_eps(const VerifyOptions& o) {
  return detail::run_suite("eps", [&](std::vector<Check>& out) {
    const int P = o.precision;
    for (const char* b : {"sphere:1", "sphere:3"}) {
      BaseManifold m = parse_base(b);
      EpsilonReport d1 = torsion_difference(m, make_real(Rational(1, 2), P + 10), P);
      EpsilonReport d2 = torsion_difference(m, make_real(Rational(1, 4), P + 10), P);
      BigReal gap = abs(d1.value - d2.value);
      out.push_back({std::string(b) + " eps=1/2 vs 1/4", to_double(gap) <= 1e-10, to_decimal(gap, 3), "1e-10"});
      out.push_back({std::string(b) + " log eps coefficient", to_double(abs(d1.log_eps_coefficient)) <= 1e-15,
                     to_decimal(d1.log_eps_coefficient, 3), "1e-15"});
    }
  });
}

// Spectral residual of the truncated cone against rank * int_N B.
inline SuiteResult suite_headline(const VerifyOptions& o) {
  return detail::run_suite("headline", [&](std::vector<Check>& out) {
    for (const char* b : {"sphere:1", "sphere:3"}) {
      BaseManifold m = parse_base(b);
      TruncatedTorsion t = truncated_cone_torsion(m, o.precision);
      const SurdPiMultiple& an = *t.anomaly_exact;
      std::string anomaly = an.half_pi_power == 0 ? an.coeff.to_string() : to_decimal(*t.anomaly, 15);
      if (m.dimension() == 1) {
        bool ok = *t.spectral_exact == 0 && an.coeff == QuadraticSurd{} && an.half_pi_power == 0;
        out.push_back({std::string(b) + " spectral " + to_string(*t.spectral_exact) + " anomaly " + anomaly, ok,
                       "gap " + to_decimal(t.spectral - *t.anomaly, 10), "exact"});
      } else {
        BigReal gap = abs(t.spectral - *t.anomaly);
        out.push_back({std::string(b) + " spectral " + to_string(*t.spectral_exact) + " anomaly " + anomaly,
                       to_double(gap) <= 1e-6, to_decimal(gap, 10), "1e-6"});
      }
    }
  });
}

// b_class under metric scaling, exact in Q(sqrt s).
inline SuiteResult suite_scaling(const VerifyOptions&) {
  return detail::run_suite("scaling", [&](std::vector<Check>& out) {
    for (int n : {1, 3, 5, 7})
      for (const Rational& s : {Rational(2), Rational(1, 3), Rational(10)}) {
        PiMultiple vol = *BaseManifold::sphere(n).volume();
        CollarMetric base{n, Rational(1), Rational(-2), Rational(1)};
        CollarMetric scaled = base;
        scaled.scale = s;
        SurdPiMultiple a = integrated_b_class(base, vol), b = integrated_b_class(scaled, vol);
        bool ok = a.coeff == b.coeff && a.half_pi_power == b.half_pi_power;
        out.push_back({"S^" + std::to_string(n) + " s=" + to_string(s), ok,
                       b.coeff.to_string() + " vs " + a.coeff.to_string(), "exact"});
      }
  });
}

// Coclosed spectra of degrees k and n-1-k coincide.
inline SuiteResult suite_duality(const VerifyOptions&) {
  return detail::run_suite("duality", [&](std::vector<Check>& out) {
    for (const char* b : {"sphere:1", "sphere:3", "torus:3"}) {
      BaseManifold m = parse_base(b);
      const int n = m.dimension();
      for (int k = 0; 2 * k <= n - 1; ++k) {
        auto lhs = coclosed_spectrum(m, k, Rational(50));
        auto rhs = coclosed_spectrum(m, n - 1 - k, Rational(50));
        bool ok = lhs.size() == rhs.size() && !lhs.empty();
        for (std::size_t i = 0; ok && i < lhs.size(); ++i) ok = lhs[i].eta == rhs[i].eta && lhs[i].mult == rhs[i].mult;
        out.push_back({std::string(b) + " k=" + std::to_string(k) + " vs " + std::to_string(n - 1 - k), ok,
                       std::to_string(lhs.size()) + " eigenvalues", "exact"});
      }
    }
  });
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"dm",      "wronskian", "detratio", "hdet",    "tzero",  "ab",
                                                 "largenu", "eps",       "headline", "scaling", "duality"};
  return names;
}

inline SuiteResult run_named_suite(const std::string& name, const VerifyOptions& o) {
  if (name == "dm") return suite_dm(o);
  if (name == "wronskian") return suite_wronskian(o);
  if (name == "detratio") return suite_detratio(o);
  if (name == "hdet") return suite_hdet(o);
  if (name == "tzero") return suite_tzero(o);
  if (name == "ab") return suite_ab(o);
  if (name == "largenu") return suite_largenu(o);
  if (name == "eps") return suite_eps(o);
  if (name == "headline") return suite_headline(o);
  if (name == "scaling") return suite_scaling(o);
  if (name == "duality") return suite_duality(o);
  throw DomainError("unknown suite '" + name + "'");
}

}  // namespace conetorsion
