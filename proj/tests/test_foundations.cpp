// precision, special functions, Bessel, Olver tables, base spectra, zeta.

#include "conetorsion/conetorsion.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include <sstream>

using namespace conetorsion;
using Ref = boost::multiprecision::cpp_bin_float_50;

namespace {

BigReal from_ref(const Ref& x, int P) { return make_real_from_string(x.str(55, std::ios_base::scientific), P); }

double rel_gap(const BigReal& a, const BigReal& b) { return to_double(abs(a - b) / abs(b)); }

Rational q(long a, long b = 1) { return Rational(a, b); }

}  // namespace

// --- precision ---------------------------------------------------------------

TEST(Precision, RejectsTooFewDigits) {
  EXPECT_THROW(check_precision(19), PrecisionError);
  EXPECT_NO_THROW(check_precision(20));
}

TEST(Precision, ParsesRationalText) {
  EXPECT_EQ(parse_rational("-12.375"), q(-99, 8));
  EXPECT_EQ(parse_rational("3e-5"), q(3, 100000));
  EXPECT_EQ(parse_rational("7/2"), q(7, 2));
  EXPECT_THROW(parse_rational("abc"), FormatError);
  EXPECT_THROW(parse_rational(""), FormatError);
}

TEST(Precision, ExactDecimalRoundTrip) {
  for (const Rational& x : {q(1, 8), q(-5, 4), q(1000), q(3, 7), q(1, 100), q(-9, 1000)})
    EXPECT_EQ(parse_rational(to_exact_decimal(x)), x);
  EXPECT_EQ(parse_rational("0.08"), q(2, 25));
  EXPECT_EQ(parse_rational("010/08"), q(5, 4));
  EXPECT_THROW(parse_rational("1/x"), FormatError);
}

// --- special functions -------------------------------------------------------

TEST(Special, BernoulliKnownValues) {
  EXPECT_EQ(bernoulli(1), q(-1, 2));
  EXPECT_EQ(bernoulli(2), q(1, 6));
  EXPECT_EQ(bernoulli(4), q(-1, 30));
  EXPECT_EQ(bernoulli(12), q(-691, 2730));
  EXPECT_EQ(bernoulli(7), 0);
}

TEST(Special, GammaDigammaAgainstBoost) {
  const int P = 50;
  for (const char* s : {"0.5", "1.25", "7", "13.75", "0.001"}) {
    Ref x(s);
    BigReal xr = make_real_from_string(s, P + 10);
    EXPECT_LT(rel_gap(gamma_fn(xr, P), from_ref(boost::math::tgamma(x), P)), 1e-45) << s;
    EXPECT_LT(rel_gap(digamma(xr, P), from_ref(boost::math::digamma(x), P)), 1e-45) << s;
  }
}

TEST(Special, RiemannZetaAgainstBoost) {
  const int P = 50;
  for (const char* s : {"2", "3.5", "-1.5", "0.25"}) {
    BigReal v = riemann_zeta_real(make_real_from_string(s, P + 10), P);
    EXPECT_LT(rel_gap(v, from_ref(boost::math::zeta(Ref(s)), P)), 1e-45) << s;
  }
}

TEST(Special, HurwitzAtNegativeIntegersIsBernoulli) {
  const int P = 40;
  for (int m = 0; m <= 6; ++m)
    for (const Rational& a : {q(1, 3), q(1), q(5, 2)}) {
      BigReal v = hurwitz_zeta(make_real(-m, P + 10), make_real(a, P + 10), P);
      BigReal expected = make_real(-bernoulli_poly(m + 1, a) / (m + 1), P);
      EXPECT_LT(to_double(abs(v - expected)), 1e-35) << "m=" << m << " a=" << to_string(a);
    }
}

TEST(Special, HurwitzAtIntegersIsPolygamma) {
  const int P = 50;
  for (int n : {1, 2, 4})
    for (const char* a : {"0.5", "2.25"}) {
      BigReal v = hurwitz_zeta(make_real(n + 1, P + 10), make_real_from_string(a, P + 10), P);
      Ref ref = boost::math::polygamma(n, Ref(a)) * ((n + 1) % 2 == 0 ? 1 : -1) / boost::math::factorial<Ref>(n);
      EXPECT_LT(rel_gap(v, from_ref(ref, P)), 1e-44) << n << " " << a;
    }
}

TEST(Special, HurwitzDerivativeAtZeroIsLogGamma) {
  const int P = 50;
  for (const char* a : {"0.5", "1", "3.75"}) {
    const BigReal ar = make_real_from_string(a, P + 10);
    Complex d = hurwitz_zeta_derivative(Complex::zero(P + 10), ar, P);
    BigReal expected = gamma_ln(ar, P) - log(2 * pi(P + 10)) / 2;
    EXPECT_LT(to_double(abs(d.real() - expected)), 1e-44) << a;
  }
}

// --- Bessel ------------------------------------------------------------------

TEST(Bessel, RealValuesAgainstBoost) {
  const int P = 50;
  struct Pt {
    const char *nu, *z;
  };
  for (const Pt& p : std::vector<Pt>{{"0", "0.5"}, {"0.5", "3"}, {"2.5", "10"}, {"7", "1.25"}, {"12.25", "40"}, {"1.5", "0.01"}}) {
    BesselIK b = bessel_ik(make_real_from_string(p.nu, P + 10), Complex(make_real_from_string(p.z, P + 10)), P);
    EXPECT_LT(rel_gap(b.i.real(), from_ref(boost::math::cyl_bessel_i(Ref(p.nu), Ref(p.z)), P)), 1e-40) << p.nu << " " << p.z;
    EXPECT_LT(rel_gap(b.k.real(), from_ref(boost::math::cyl_bessel_k(Ref(p.nu), Ref(p.z)), P)), 1e-40) << p.nu << " " << p.z;
    EXPECT_LT(rel_gap(b.ip.real(), from_ref(boost::math::cyl_bessel_i_prime(Ref(p.nu), Ref(p.z)), P)), 1e-40);
    EXPECT_LT(rel_gap(b.kp.real(), from_ref(boost::math::cyl_bessel_k_prime(Ref(p.nu), Ref(p.z)), P)), 1e-40);
  }
}

TEST(Bessel, HalfOrderClosedForm) {
  // I_{1/2}(z) = sqrt(2/(pi z)) sinh z, K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}, complex z
  const int P = 50, wp = 60;
  Complex z(make_real_from_string("1.5", wp), make_real_from_string("2.5", wp));
  BesselIK b = bessel_ik(make_real(q(1, 2), wp), z, P);
  Complex ez = exp(z), emz = exp(-z);
  Complex sinh_z = (ez - emz) / 2;
  Complex i_ref = sqrt(Complex(2 / pi(wp)) / z) * sinh_z;
  Complex k_ref = sqrt(Complex(pi(wp) / 2) / z) * emz;
  EXPECT_LT(to_double(abs(b.i - i_ref) / abs(i_ref)), 1e-45);
  EXPECT_LT(to_double(abs(b.k - k_ref) / abs(k_ref)), 1e-45);
}

TEST(Bessel, WronskianSpotCheckAt80Digits) {
  const int P = 80, wp = 90;
  for (const char* nu : {"0", "3.5", "11"})
    for (const char* re : {"0.75", "9"}) {
      Complex z(make_real_from_string(re, wp), make_real_from_string("1.5", wp));
      BesselIK b = bessel_ik(make_real_from_string(nu, wp), z, P);
      BigReal gap = abs(z * (b.k * b.ip - b.kp * b.i) - 1);
      EXPECT_LT(log10_abs(gap), -70) << nu << " " << re;
    }
}

TEST(Bessel, RejectsLeftHalfPlane) {
  EXPECT_THROW(bessel_ik(make_real(1, 30), Complex(make_real(-1, 30)), 30), DomainError);
}

// --- Olver -------------------------------------------------------------------

TEST(Olver, LowOrderPolynomials) {
  EXPECT_EQ(u_poly(1), RationalPolynomial({0, q(3, 24), 0, q(-5, 24)}));
  EXPECT_EQ(u_poly(2), RationalPolynomial({0, 0, q(81, 1152), 0, q(-462, 1152), 0, q(385, 1152)}));
  EXPECT_EQ(v_poly(1), RationalPolynomial({0, q(-9, 24), 0, q(7, 24)}));
}

TEST(Olver, DmIdentityAllOrders) {
  for (int r = 1; r <= kOlverMaxOrder; ++r)
    for (const Rational& a : {q(0), q(1), q(-1), q(2), q(-2), q(7, 2), q(-5, 3)}) EXPECT_EQ(dm_defect(r, a), 0) << r;
}

TEST(Olver, SupportOfCoefficients) {
  for (int r = 1; r <= kOlverMaxOrder; ++r) {
    XZCoefficients c = xz_coefficients(r);
    EXPECT_EQ(static_cast<int>(c.x.size()), r + 1);
  }
  EXPECT_THROW(u_poly(kOlverMaxOrder + 1), DomainError);
}

TEST(Olver, UniformExpansionConverges) {
  const int P = 50;
  const BigReal nu = make_real(40, P + 10), z = make_real_from_string("1.5", P + 10);
  BesselIK exact = bessel_ik(nu, Complex(nu * z), P + 10);
  double prev = 1;
  for (int terms : {1, 3, 5, 7}) {
    UniformIK u = uniform_asymptotic_ik(nu, z, terms, P);
    double err = rel_gap(u.i, exact.i.real());
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-12);
}

// --- spectrum ----------------------------------------------------------------

TEST(Spectrum, CircleFourierModes) {
  auto lines = coclosed_spectrum(parse_base("sphere:1"), 0, q(10));
  ASSERT_EQ(lines.size(), 10u);
  for (std::size_t j = 0; j < lines.size(); ++j) {
    EXPECT_EQ(lines[j].eta, Rational((j + 1) * (j + 1)));
    EXPECT_EQ(lines[j].mult, 2);
  }
}

TEST(Spectrum, ThreeSphereHarmonics) {
  BaseManifold s3 = parse_base("sphere:3");
  auto f = coclosed_spectrum(s3, 0, q(30));
  for (std::size_t i = 0; i < f.size(); ++i) {
    long j = static_cast<long>(i) + 1;
    EXPECT_EQ(f[i].eta, Rational(j * (j + 2)));
    EXPECT_EQ(f[i].mult, (j + 1) * (j + 1));
  }
  auto one = coclosed_spectrum(s3, 1, q(30));
  for (std::size_t i = 0; i < one.size(); ++i) {
    long j = static_cast<long>(i) + 1;
    EXPECT_EQ(one[i].eta, Rational((j + 1) * (j + 1)));
    EXPECT_EQ(one[i].mult, 2 * j * (j + 2));
  }
}

TEST(Spectrum, TorusAgainstLatticeEnumeration) {
  BaseManifold t = parse_base("torus:3");
  std::map<long, long> brute;
  for (long a = -6; a <= 6; ++a)
    for (long b = -6; b <= 6; ++b)
      for (long c = -6; c <= 6; ++c) {
        long e = a * a + b * b + c * c;
        if (e > 0 && e <= 30) ++brute[e];
      }
  for (int k = 0; k <= 2; ++k) {
    auto lines = coclosed_spectrum(t, k, q(6));  // A_k^2 <= 1 keeps eta <= 35 available
    long per = k == 1 ? 2 : 1;
    for (const auto& l : lines) {
      if (l.eta > 30) continue;
      long e = static_cast<long>(numerator(l.eta).convert_to<long>());
      EXPECT_EQ(l.mult, brute[e] * per) << "k=" << k << " eta=" << e;
    }
  }
}

TEST(Spectrum, WeylLaw) {
  BaseManifold s3 = parse_base("sphere:3");
  const int X = 200;
  BigReal c = weyl_constant(s3, 0, 30);
  double ratio = to_double(make_real(counting_function(s3, 0, q(X)), 30) / (c * pow(make_real(X, 30), 3)));
  EXPECT_NEAR(ratio, 1.0, 0.02);
}

TEST(Spectrum, FileRoundTripIsExact) {
  for (const char* b : {"sphere:3", "torus:3:1,1,1/2", "sphere:5:rank=2"}) {
    BaseManifold m = parse_base(b);
    std::ostringstream os;
    write_spectrum(os, m, q(12));
    std::istringstream is(os.str());
    BaseManifold back = read_spectrum(is);
    EXPECT_EQ(back.dimension(), m.dimension());
    EXPECT_EQ(back.rank(), m.rank());
    for (int k = 0; k <= m.dimension(); ++k) {
      EXPECT_EQ(back.betti(k), m.betti(k));
      EXPECT_EQ(coclosed_spectrum(back, k, q(12)), coclosed_spectrum(m, k, q(12))) << b << " k=" << k;
    }
  }
}

TEST(Spectrum, MalformedInputs) {
  EXPECT_THROW(parse_base("sphere:2"), Error);
  EXPECT_THROW(parse_base("klein:3"), Error);
  std::istringstream bad_header("dims=3\nbetti=1,0,0,1\n");
  EXPECT_THROW(read_spectrum(bad_header), FormatError);
  std::istringstream bad_line("dim=1 rank=1\nbetti=1,1\n0,-4,2\n");
  EXPECT_THROW(read_spectrum(bad_line), FormatError);
  EXPECT_THROW(read_spectrum_file("/nonexistent/spectrum.txt"), Error);
}

// --- zeta --------------------------------------------------------------------

TEST(Zeta, CircleValuesAtZero) {
  const int P = 50;
  ZetaAtZero z = zeta_shifted_at_zero(parse_base("sphere:1"), 0, P);
  EXPECT_LT(to_double(abs(z.value + 1)), 1e-45);
  EXPECT_LT(to_double(abs(z.derivative + log(2 * pi(P)))), 1e-45);
}

TEST(Zeta, ClosedFormAgainstDirectSum) {
  const int P = 30;
  for (const char* b : {"sphere:3", "torus:3"}) {
    BaseManifold m = parse_base(b);
    const BigReal s = make_real(6, P + 10);
    BigReal closed = zeta_shifted(m, 0, s, P);
    DirectSum d = zeta_shifted_direct(m, 0, s, q(60), P);
    EXPECT_LT(to_double(abs(closed - d.value - d.tail_estimate)), 0.1 * to_double(d.tail_estimate) + 1e-25) << b;
  }
}

TEST(Zeta, ThreeSphereResidue) {
  // zeta_0(s) = zeta_R(s - 2) on S^3, residue 1 at s = 3
  MeromorphicPoint p = zeta_shifted_residue(parse_base("sphere:3"), 0, 1, 40);
  EXPECT_FALSE(p.approximate);
  EXPECT_LT(to_double(abs(p.residue - 1)), 1e-35);
}

TEST(Zeta, BinomialRouteMatchesHurwitzRoute) {
  // the binomial route is in the nu^(-2s) normalization
  const int P = 40;
  BaseManifold m = parse_base("sphere:5");
  for (int k = 0; k <= 2; ++k)
    for (const char* s : {"-0.5", "0.75", "7.5"}) {
      BigReal sr = make_real_from_string(s, P + 10);
      BigReal hurwitz = zeta_shifted(m, k, BigReal(2 * sr), P);
      EXPECT_LT(to_double(abs(zeta_shifted_binomial_route(m, k, sr, P) - hurwitz)), 1e-30) << k << " " << s;
    }
}

TEST(Zeta, BaseTorsionRoutesAgree) {
  const int P = 40;
  EXPECT_LT(to_double(abs(base_torsion(parse_base("sphere:1"), P) - log(2 * pi(P)))), 1e-35);
  EXPECT_LT(to_double(abs(base_torsion(parse_base("sphere:3"), P) - log(2 * pi(P) * pi(P)))), 1e-35);
  for (const char* b : {"sphere:3", "sphere:5", "torus:3"}) {
    BaseManifold m = parse_base(b);
    EXPECT_LT(to_double(abs(base_torsion(m, P) - base_torsion_full_forms(m, P))), 1e-35) << b;
  }
}

TEST(Zeta, FileBaseResiduesAreFlaggedApproximate) {
  std::ostringstream os;
  write_spectrum(os, parse_base("sphere:3"), q(40));
  std::istringstream is(os.str());
  BaseManifold f = read_spectrum(is);
  auto reps = zeta_report(f, 30);
  ASSERT_FALSE(reps.empty());
  EXPECT_FALSE(reps[0].zeta0.has_value());
  for (const auto& p : reps[0].residues) EXPECT_TRUE(p.approximate);
}
