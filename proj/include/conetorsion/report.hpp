#pragma once

// JSON and table renderings of the computed quantities. Numbers are written
// as decimal strings.

#include "conetorsion/torsion.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>
#include <string>

namespace conetorsion {

using Json = nlohmann::ordered_json;

inline Json decimal_or_null(const std::optional<BigReal>& x, int P) {
  if (!x) return nullptr;
  return to_decimal(*x, P);
}

inline Json torsion_json(const BaseManifold& m, const TorsionBreakdown& b, int P) {
  Json j;
  j["base"] = m.descriptor();
  j["n"] = m.dimension();
  j["rank"] = m.rank();
  j["precision"] = P;
  j["mode"] = b.approximate ? "approximate" : "exact";
  Json br;
  br["top"] = to_decimal(b.top, P);
  br["tors"] = decimal_or_null(b.tors, P);
  br["res_spectral"] = to_decimal(b.res_spectral, P);
  br["res_anomaly"] = decimal_or_null(b.res_anomaly, P);
  br["total"] = decimal_or_null(b.total, P);
  j["breakdown"] = br;
  Json au;
  au["eps_cancel"] = decimal_or_null(b.eps_cancel, P);
  au["headline_gap"] = decimal_or_null(b.headline_gap, P);
  j["audits"] = au;
  if (b.approximate) j["res_uncertainty"] = to_decimal(b.res_uncertainty, 6);
  return j;
}

inline Json zeta_json(const std::vector<ZetaDegreeReport>& reps, int P) {
  Json arr = Json::array();
  for (const auto& r : reps) {
    Json j;
    j["k"] = r.k;
    j["zeta(0)"] = decimal_or_null(r.zeta0, P);
    j["zeta'(0)"] = decimal_or_null(r.zeta0_prime, P);
    Json res = Json::array();
    for (const auto& p : r.residues) {
      Json q;
      q["s"] = to_decimal(p.location, 6);
      q["residue"] = to_decimal(p.residue, P);
      q["finite_part"] = decimal_or_null(p.finite_part, P);
      q["approximate"] = p.approximate;
      if (p.approximate) q["uncertainty"] = to_decimal(p.uncertainty, 6);
      res.push_back(q);
    }
    j["residues"] = res;
    arr.push_back(j);
  }
  return arr;
}

inline Json polynomial_json(const RationalPolynomial& p) {
  Json j = Json::object();
  for (int e = 0; e <= p.degree(); ++e)
    if (p.coefficient(e) != 0) j["t^" + std::to_string(e)] = to_string(p.coefficient(e));
  return j;
}

inline Json olver_json(int rmax) {
  Json arr = Json::array();
  for (int r = 1; r <= rmax; ++r) {
    Json j;
    j["r"] = r;
    j["u"] = polynomial_json(u_poly(r));
    j["v"] = polynomial_json(v_poly(r));
    j["D"] = polynomial_json(d_poly(r));
    Json m = Json::object();
    const ShiftPolynomial& mp = m_poly(r);
    for (int e = 0; e <= mp.degree(); ++e) {
      RationalPolynomial c = mp.coefficient(e);
      if (c.degree() < 0 || (c.degree() == 0 && c.coefficient(0) == 0)) continue;
      Json ca = Json::object();
      for (int a = 0; a <= c.degree(); ++a)
        if (c.coefficient(a) != 0) ca["A^" + std::to_string(a)] = to_string(c.coefficient(a));
      m["t^" + std::to_string(e)] = ca;
    }
    j["M"] = m;
    arr.push_back(j);
  }
  return arr;
}

inline Json b_class_json(int n) {
  Json j;
  j["n"] = n;
  j["form"] = "-int_0^1 du/u Berezin[exp(-R/2 - u^2 S^2) sum_k (u S)^k / (2 Gamma(k/2+1))]";
  Json arr = Json::array();
  for (const auto& t : b_class_terms(n)) {
    Json q;
    q["kappa_power"] = t.kappa_power;
    q["fprime_power"] = t.fprime_power;
    q["coefficient"] = to_string(t.coefficient);
    q["pi_power"] = to_string(Rational(t.half_pi_power, 2));
    arr.push_back(q);
  }
  j["terms"] = arr;
  return j;
}

inline std::string torsion_table(const BaseManifold& m, const TorsionBreakdown& b, int P) {
  const int shown = std::min(P, 25);
  auto row = [&](const std::string& k, const std::string& v) {
    std::ostringstream os;
    os << std::left << std::setw(16) << k << v << "\n";
    return os.str();
  };
  auto opt = [&](const std::optional<BigReal>& x) { return x ? to_decimal(*x, shown) : std::string("n/a"); };
  std::string s = row("base", m.descriptor()) + row("n", std::to_string(m.dimension())) +
                  row("rank", std::to_string(m.rank())) + row("precision", std::to_string(P)) +
                  row("mode", b.approximate ? "approximate" : "exact");
  s += row("top", to_decimal(b.top, shown));
  s += row("tors", opt(b.tors));
  s += row("res_spectral", to_decimal(b.res_spectral, shown));
  s += row("res_anomaly", opt(b.res_anomaly));
  s += row("total", opt(b.total));
  s += row("eps_cancel", opt(b.eps_cancel));
  s += row("headline_gap", opt(b.headline_gap));
  return s;
}

}  // namespace conetorsion
