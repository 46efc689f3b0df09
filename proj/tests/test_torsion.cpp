// Torsion assembly and report rendering.

#include "conetorsion/conetorsion.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace conetorsion;

namespace {

Rational q(long a, long b = 1) { return Rational(a, b); }

double dist(const BigReal& a, const BigReal& b) { return to_double(abs(a - b)); }

}  // namespace

TEST(Torsion, TopTerm) {
  const int P = 40;
  EXPECT_LT(dist(top_term(parse_base("sphere:1"), P), log(make_real(2, P)) / 2), 1e-35);
  EXPECT_LT(dist(top_term(parse_base("sphere:3"), P), log(make_real(2, P))), 1e-35);
  // b_0 = 1, b_1 = 3 on the 3-torus
  EXPECT_LT(dist(top_term(parse_base("torus:3"), P), log(make_real(4, P)) / 2 - 3 * log(make_real(2, P)) / 2), 1e-35);
}

TEST(Torsion, ResidualBracketExactMatchesNumeric) {
  for (int r = 1; r <= 4; ++r)
    for (const Rational& a : {q(0), q(1), q(-1), q(3, 2), q(2)})
      EXPECT_LT(dist(residual_bracket(r, a, 40), make_real(residual_bracket_exact(r, a), 40)), 1e-35) << r;
}

TEST(Torsion, ThreeSphereSpectralFromResidues) {
  // Res zeta_0(3) = 1 (zeta_R(s-2)), Res zeta_1(3) = 2 (2 zeta_R(s-2) - 2 zeta_R(s)),
  // delta = (1, 1/2), A = (1, 0)
  const int P = 40;
  BigReal manual = (residual_bracket(1, q(1), P) - residual_bracket(1, q(0), P)) / 2;
  TruncatedTorsion t = truncated_cone_torsion(parse_base("sphere:3"), P);
  ASSERT_TRUE(t.spectral_exact.has_value());
  EXPECT_EQ(*t.spectral_exact, q(-1, 3));
  EXPECT_LT(dist(manual, t.spectral), 1e-35);
}

TEST(Torsion, CircleHasNoResidual) {
  TorsionBreakdown b = cone_torsion(parse_base("sphere:1"), 40);
  EXPECT_EQ(b.res_spectral, 0);
  ASSERT_TRUE(b.tors.has_value());
  EXPECT_LT(dist(*b.tors, -log(2 * pi(40)) / 2), 1e-35);
}

TEST(Torsion, EpsIndependence) {
  const int P = 50;
  for (const char* base : {"sphere:1", "sphere:3", "sphere:5", "torus:3"}) {
    BaseManifold m = parse_base(base);
    EpsilonReport a = torsion_difference(m, make_real(q(1, 2), P + 10), P);
    EpsilonReport b = torsion_difference(m, make_real(q(1, 7), P + 10), P);
    EXPECT_LT(dist(a.value, b.value), 1e-40) << base;
    EXPECT_LT(to_double(abs(a.log_eps_coefficient)), 1e-40) << base;
  }
}

TEST(Torsion, HarmonicTermRoutesAgree) {
  for (const char* base : {"sphere:1", "sphere:3", "torus:3"}) {
    BaseManifold m = parse_base(base);
    const BigReal e = make_real(q(1, 3), 50);
    EXPECT_LT(dist(harmonic_term(m, e, 40), harmonic_term_from_h_det(m, e, 40)), 1e-30) << base;
  }
}

TEST(Torsion, DifferenceRouteRecoversTotalResidual) {
  // spectral - (log T(C_eps) - log T(C)) is eps independent
  BaseManifold m = parse_base("sphere:3");
  BigReal a = cone_torsion_from_difference(m, make_real(q(1, 2), 50), 40);
  BigReal b = cone_torsion_from_difference(m, make_real(q(1, 5), 50), 40);
  EXPECT_LT(dist(a, b), 1e-30);
}

TEST(Torsion, TotalEqualsTruncatedMinusDifference) {
  for (const char* base : {"sphere:1", "sphere:3", "sphere:5", "torus:3"}) {
    BaseManifold m = parse_base(base);
    BigReal via = cone_torsion_from_difference(m, make_real(q(1, 3), 50), 40);
    EXPECT_LT(dist(*cone_torsion(m, 40).total, via), 1e-30) << base;
  }
}

TEST(Torsion, SpectralMinusAnomalyEqualsRank) {
  // the measured gap of the headline comparison, exactly rank on spheres
  for (const char* base : {"sphere:1", "sphere:3", "sphere:5", "sphere:3:rank=2"}) {
    BaseManifold m = parse_base(base);
    TorsionBreakdown b = cone_torsion(m, 40);
    ASSERT_TRUE(b.headline_gap.has_value());
    EXPECT_LT(dist(*b.headline_gap, make_real(m.rank(), 40)), 1e-30) << base;
  }
}

TEST(Torsion, RankScalesResidualTerms) {
  TorsionBreakdown one = cone_torsion(parse_base("sphere:3"), 40);
  TorsionBreakdown two = cone_torsion(parse_base("sphere:3:rank=2"), 40);
  EXPECT_LT(dist(two.res_spectral, 2 * one.res_spectral), 1e-35);
  EXPECT_LT(dist(*two.res_anomaly, 2 * *one.res_anomaly), 1e-35);
}

TEST(Torsion, BreakdownAddsUp) {
  TorsionBreakdown b = cone_torsion(parse_base("sphere:5"), 40);
  EXPECT_LT(dist(*b.total, b.top + *b.tors + b.res_spectral), 1e-35);
}

TEST(Torsion, FileBaseIsApproximate) {
  std::ostringstream os;
  write_spectrum(os, parse_base("sphere:3"), q(40));
  std::istringstream is(os.str());
  BaseManifold f = read_spectrum(is);
  TorsionBreakdown b = cone_torsion(f, 30);
  EXPECT_TRUE(b.approximate);
  EXPECT_FALSE(b.tors.has_value());
  EXPECT_FALSE(b.headline_gap.has_value());
  EXPECT_LT(to_double(abs(b.res_spectral + make_real(q(1, 6), 30))), 10 * to_double(b.res_uncertainty) + 1e-12);
}

TEST(Report, JsonNumbersAreStrings) {
  BaseManifold m = parse_base("sphere:3");
  Json j = torsion_json(m, cone_torsion(m, 30), 30);
  for (const char* k : {"top", "tors", "res_spectral", "res_anomaly", "total"}) EXPECT_TRUE(j["breakdown"][k].is_string()) << k;
  EXPECT_TRUE(j["audits"]["headline_gap"].is_string());
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["rank"], 1);
}

TEST(Report, ZetaJsonShape) {
  Json j = zeta_json(zeta_report(parse_base("sphere:3"), 30), 30);
  ASSERT_EQ(j.size(), 4u);  // degrees 0..n
  EXPECT_EQ(j[0]["k"], 0);
  EXPECT_TRUE(j[0]["zeta(0)"].is_string());
  EXPECT_TRUE(j[0]["zeta'(0)"].is_string());
  EXPECT_TRUE(j[0]["residues"].is_array());
}

TEST(Report, OlverAndBClassDumps) {
  Json o = olver_json(kOlverMaxOrder);
  EXPECT_EQ(o.size(), static_cast<std::size_t>(kOlverMaxOrder));
  EXPECT_EQ(o[0]["u"]["t^1"], "1/8");
  Json b = b_class_json(3);
  ASSERT_EQ(b["terms"].size(), 2u);
  EXPECT_EQ(b["terms"][0]["coefficient"], "-1/96");
  EXPECT_EQ(b["terms"][1]["coefficient"], "3/8");
}

TEST(Report, TableHasEveryField) {
  BaseManifold m = parse_base("sphere:1");
  std::string t = torsion_table(m, cone_torsion(m, 30), 30);
  for (const char* k : {"top", "tors", "res_spectral", "res_anomaly", "total", "eps_cancel", "headline_gap"})
    EXPECT_NE(t.find(k), std::string::npos) << k;
}
