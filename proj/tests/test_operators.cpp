// Model operators, determinant ratios, t-functions, the B-class.

#include "conetorsion/conetorsion.hpp"

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <map>

using namespace conetorsion;

namespace {

Rational q(long a, long b = 1) { return Rational(a, b); }
BigReal R(const Rational& x, int P = 50) { return make_real(x, P); }
BigReal R(const char* s, int P = 50) { return make_real_from_string(s, P); }

// Boundary functional at eps of the solution of
// y'' = ((nu^2 - 1/4)/x^2 + w^2) y fixed by the right boundary condition.
double shoot(const ModelOperator& op, double w) {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  const double nu = to_double(op.nu), eps = to_double(*op.eps);
  const double qv = nu * nu - 0.25;
  State y = op.right.kind == BoundaryCondition::Kind::dirichlet ? State{0.0, -1.0}
                                                                : State{1.0, -op.right.c.convert_to<double>()};
  auto rhs = [&](const State& s, State& d, double x) {
    d[0] = s[1];
    d[1] = (qv / (x * x) + w * w) * s[0];
  };
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, y, 1.0, eps, -1e-4);
  if (op.left.kind == BoundaryCondition::Kind::dirichlet) return y[0];
  return y[1] + op.left.c.convert_to<double>() * y[0] / eps;
}

// Exterior algebra on e_1..e_n, hat e_1..hat e_n (bits 0..2n-1) with
// coefficients per power of u, used as an independent B-class oracle.
using Grass = std::map<std::pair<unsigned, int>, double>;

Grass mul(const Grass& a, const Grass& b) {
  Grass out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      if (ka.first & kb.first) continue;
      int swaps = 0;
      for (unsigned m = kb.first; m; m &= m - 1) {
        unsigned bit = m & -m;
        swaps += std::popcount(ka.first & ~(bit | (bit - 1)));
      }
      out[{ka.first | kb.first, ka.second + kb.second}] += (swaps % 2 ? -1 : 1) * ca * cb;
    }
  return out;
}

Grass add(Grass a, const Grass& b, double s = 1) {
  for (const auto& [k, c] : b) a[k] += s * c;
  return a;
}

double b_class_oracle(int n, double kappa, double fprime) {
  Grass S, Rd, one{{{0u, 0}, 1.0}};
  for (int k = 0; k < n; ++k) S[{(1u << k) | (1u << (n + k)), 0}] = fprime / 4;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) Rd[{(1u << a) | (1u << b) | (1u << (n + a)) | (1u << (n + b)), 0}] = kappa;
  Grass u2S2;
  for (const auto& [k, c] : mul(S, S)) u2S2[{k.first, k.second + 2}] = c;
  Grass X = add(Grass{}, Rd, -0.5);
  X = add(X, u2S2, -1);
  Grass E = one, term = one;
  for (int m = 1; m <= n; ++m) {
    term = mul(term, X);
    for (auto& [k, c] : term) c /= m;
    E = add(E, term);
  }
  Grass series, pw = one, uS;
  for (const auto& [k, c] : S) uS[{k.first, k.second + 1}] = c;
  for (int k = 1; k <= n; ++k) {
    pw = mul(pw, uS);
    series = add(series, pw, 1 / (2 * std::tgamma(k / 2.0 + 1)));
  }
  const unsigned top = (1u << (2 * n)) - 1;
  double acc = 0;
  for (const auto& [k, c] : mul(E, series))
    if (k.first == top) acc += -c / k.second;
  const double beta = ((n * (n + 1) / 2) % 2 ? -1 : 1) * std::pow(M_PI, -n / 2.0);
  return beta * acc;
}

}  // namespace

// --- normalized solutions and determinant ratios -----------------------------

TEST(NormalizedSolution, UnitAtRightEndpoint) {
  for (auto t : {SolutionType::psi, SolutionType::phi}) {
    Complex v = normalized_solution(t, R("2.5"), q(1, 2), R(1), Complex(R("1.5"), R("0.5")), 40);
    EXPECT_LT(to_double(abs(v - 1)), 1e-35);
  }
}

TEST(NormalizedSolution, ZeroArgumentClosedForm) {
  Complex v = normalized_solution(SolutionType::psi, R(1), q(0), R(q(1, 4)), Complex::zero(50), 40);
  EXPECT_LT(to_double(abs(v - R(q(17, 16)))), 1e-35);
}

TEST(NormalizedSolution, SmallArgumentLimit) {
  const BigReal nu = R("1.5"), x = R("0.5");
  Complex at0 = normalized_solution(SolutionType::psi, nu, q(1), x, Complex::zero(60), 50);
  Complex tiny = normalized_solution(SolutionType::psi, nu, q(1), x, Complex(R("1e-14", 60)), 50);
  EXPECT_LT(to_double(abs(tiny - at0)), 1e-25);
}

TEST(DetRatio, TruncatedAgainstShooting) {
  for (Variant v : {Variant::psi2, Variant::phi2, Variant::psi0, Variant::phi0})
    for (const char* nu : {"1.5", "4"})
      for (const Rational& a : {q(-1, 2), q(1)})
        for (const char* e : {"0.25", "0.5"}) {
          ModelOperator op = make_model_operator(v, R(nu), a, R(e));
          for (double z : {0.5, 2.0}) {
            double w = to_double(op.nu) * z;
            double expected = shoot(op, w) / shoot(op, 0);
            Complex got = det_ratio_truncated(v, op.nu, a, Complex(make_double(z, 50)), *op.eps, 30).value;
            EXPECT_LT(std::abs(to_double(got.real()) / expected - 1), 1e-9) << op.descriptor() << " z=" << z;
            EXPECT_LT(std::abs(to_double(got.imag())), 1e-20);
          }
        }
}

TEST(DetRatio, DisplayEqualsSolutionQuotient) {
  const Complex z(R("0.75"), R("0.25"));
  for (Variant v : {Variant::psi2, Variant::phi2, Variant::psi0, Variant::phi0}) {
    Complex a = det_ratio_truncated(v, R("2.5"), q(1, 2), z, R(q(1, 3)), 40).value;
    Complex b = det_ratio_truncated_display(v, R("2.5"), q(1, 2), z, R(q(1, 3)), 40);
    EXPECT_LT(to_double(abs(a - b) / abs(a)), 1e-30) << variant_name(v);
  }
}

TEST(DetRatio, TendsToOneAtZero) {
  const Complex z(R("1e-20", 60));
  for (Variant v : {Variant::psi2, Variant::phi2, Variant::psi0, Variant::phi0}) {
    EXPECT_LT(to_double(abs(det_ratio_full_cone(v, R("2.5"), q(1), z, 40).value - 1)), 1e-15);
    EXPECT_LT(to_double(abs(det_ratio_truncated(v, R("2.5"), q(1), z, R(q(1, 2)), 40).value - 1)), 1e-15);
  }
}

TEST(DetRatio, FullConeJZeroVariantsCoincide) {
  const Complex z(R("1.25"), R("-0.5"));
  Complex a = det_ratio_full_cone(Variant::psi0, R("3"), q(1, 2), z, 40).value;
  Complex b = det_ratio_full_cone(Variant::phi0, R("3"), q(1, 2), z, 40).value;
  EXPECT_LT(to_double(abs(a - b)), 1e-35);
}

TEST(DetRatio, DegenerateNormalization) {
  EXPECT_THROW(det_ratio_full_cone(Variant::psi2, R(1), q(-1), Complex(R(1)), 30), DomainError);
  EXPECT_THROW(make_model_operator(Variant::psi2, R(1), q(0), R(1)), DomainError);
}

TEST(DetRatio, FullConeAgainstEigenvalueProduct) {
  ModelOperator op = make_model_operator(Variant::psi2, R(1), q(0));
  std::vector<double> lam = eigenvalues_oracle(op, 200, {CountCheck::oscillation, 20});
  double est = log_det_ratio_from_eigenvalues(lam, 2.0);
  Complex cf = det_ratio_full_cone(Variant::psi2, R(1), q(0), Complex(R(2)), 30).value;
  EXPECT_LT(std::abs(std::exp(est - to_double(log(cf).real())) - 1), 1e-6);
}

// --- eigenvalue oracle ----------------------------------------------------------

TEST(EigenvalueOracle, OrderedAndWeylGrowth) {
  ModelOperator op = make_model_operator(Variant::phi2, R("2.5"), q(1, 2), R(q(1, 3)));
  std::vector<double> lam = eigenvalues_oracle(op, 120, {CountCheck::argument_principle, 20});
  for (std::size_t i = 1; i < lam.size(); ++i) EXPECT_LT(lam[i - 1], lam[i]);
  double weyl = std::pow(M_PI * 100 / (1 - 1.0 / 3), 2);
  EXPECT_NEAR(lam[99] / weyl, 1.0, 0.05);
}

TEST(EigenvalueOracle, CountChecksAgree) {
  ModelOperator op = make_model_operator(Variant::psi0, R("1.5"), q(-1, 2), R(q(1, 4)));
  auto a = eigenvalues_oracle(op, 40, {CountCheck::oscillation, 20});
  auto b = eigenvalues_oracle(op, 40, {CountCheck::argument_principle, 20});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i], b[i]);
}

TEST(EigenvalueOracle, RejectsNonPositiveSpectrum) {
  // a strongly negative Robin constant at x = 1 gives a negative eigenvalue
  ModelOperator op = make_model_operator(Variant::psi2, R("0.5"), q(-3), R(q(1, 2)));
  EXPECT_THROW(eigenvalues_oracle(op, 40), DomainError);
}

// --- harmonic sector ---------------------------------------------------------

TEST(Harmonic, ClosedFormExamples) {
  EXPECT_LT(to_double(abs(h_det(0, 1, R(q(1, 4))) - 4)), 1e-40);
  // d/d eps log h_det = (k - n/2) / eps
  const BigReal e = R("0.3"), h = R("1e-20");
  BigReal dlog = (log(h_det(1, 3, e + h)) - log(h_det(1, 3, e - h))) / (2 * h);
  EXPECT_LT(to_double(abs(dlog - (R(1) - R("1.5")) / e)), 1e-15);
}

TEST(Harmonic, RatioAgainstEigenvalueProduct) {
  ModelOperator op = harmonic_operator(Variant::h0, 0, 3, R(q(1, 2)));
  std::vector<double> lam = eigenvalues_oracle(op, 200, {CountCheck::oscillation, 20});
  double est = log_det_ratio_from_eigenvalues(lam, 1.5);
  Complex got = h_det_ratio(0, 3, R(q(1, 2)), Complex(R("1.5")), 30);
  EXPECT_LT(std::abs(std::exp(est - to_double(log(got).real())) - 1), 1e-6);
}

// --- t-functions ---------------------------------------------------------------

TEST(TFunction, VanishesAtZero) {
  for (int n : {1, 3, 5})
    for (int k = 0; 2 * k <= n - 1; ++k) {
      Complex t = t_function(k, n, R("2.25"), R(q(1, 3)), Complex::zero(50), 40);
      EXPECT_LT(to_double(abs(t)), 1e-30);
    }
}

TEST(TFunction, AssembledFormAgrees) {
  for (const char* lam : {"-0.5", "-30", "-2000"}) {
    Complex l(R(lam));
    Complex a = t_function(1, 5, R("3.5"), R(q(1, 4)), l, 40);
    Complex b = t_function_assembled(1, 5, R("3.5"), R(q(1, 4)), l, 40);
    EXPECT_LT(to_double(abs(a - b)), 1e-20) << lam;
  }
  Complex l(R(-2), R(3));
  EXPECT_LT(to_double(abs(t_function(0, 3, R(2), R(q(1, 2)), l, 40) - t_function_assembled(0, 3, R(2), R(q(1, 2)), l, 40))),
            1e-20);
}

TEST(TFunction, BranchCut) {
  EXPECT_THROW(t_function(0, 3, R(2), R(q(1, 2)), Complex(R(1)), 30), BranchError);
}

TEST(TFunction, LargeLambdaCoefficients) {
  ABCoefficients ab = ab_coefficients(q(1, 2), R(2), R(q(1, 2)));
  EXPECT_EQ(ab.a, 1);
  BigReal b = 2 * log(R(q(1, 2))) - log(1 - R(q(1, 16)));
  EXPECT_LT(to_double(abs(ab.b - b)), 1e-40);
}

TEST(TFunction, LargeNuOrders) {
  const BigReal e = R(q(1, 2));
  const Complex lam(R(-1));
  for (int r = 1; r <= 5; ++r) {
    double err[2];
    int i = 0;
    for (int nu : {40, 80}) err[i++] = to_double(abs(t_function(q(1, 2), R(nu), e, lam, 40) - t_large_nu_partial(q(1, 2), R(nu), e, lam, r, 40)));
    EXPECT_NEAR(std::log2(err[0] / err[1]), r + 1, 0.2) << "R=" << r;
  }
}

// --- B-class -------------------------------------------------------------------

TEST(Berezin, GradedSigns) {
  GradedElement e1 = GradedElement::generator(1, false), e2 = GradedElement::generator(2, false);
  GradedElement h1 = GradedElement::generator(1, true);
  EXPECT_TRUE((e1 * e1).terms().empty());
  EXPECT_TRUE((h1 * h1).terms().empty());
  EXPECT_TRUE((e1 * e2 + e2 * e1).terms().empty());
  EXPECT_TRUE((e1 * h1 + h1 * e1).terms().empty());
}

TEST(Berezin, SymbolicFormAgainstGrassmannOracle) {
  for (int n : {1, 3, 5, 7})
    for (auto [kappa, fp] : std::vector<std::pair<long, long>>{{1, -2}, {0, 3}, {2, 1}}) {
      CollarMetric cm{n, q(kappa), q(fp), q(1)};
      double lib = to_double(b_class(cm, 30));
      double ref = b_class_oracle(n, kappa, fp);
      EXPECT_NEAR(lib, ref, 1e-12 * std::max(1.0, std::abs(ref))) << "n=" << n << " kappa=" << kappa << " f'=" << fp;
    }
}

TEST(Berezin, IntegratedOverSpheres) {
  const std::vector<Rational> expected = {q(-1), q(-4, 3), q(-23, 15), q(-176, 105)};
  for (int i = 0; i < 4; ++i) {
    SurdPiMultiple b = integrated_b(BaseManifold::sphere(2 * i + 1));
    EXPECT_EQ(b.half_pi_power, 0);
    EXPECT_EQ(b.coeff.normalized().a, expected[i]);
    EXPECT_EQ(b.coeff.normalized().b, 0);
    // the same number from the Grassmann oracle and the sphere volume
    const int n = 2 * i + 1;
    double vol = to_double(BaseManifold::sphere(n).volume()->value(30));
    EXPECT_NEAR(b_class_oracle(n, 1, -2) * vol, expected[i].convert_to<double>(), 1e-12);
  }
}

TEST(Berezin, FlatTorus) {
  SurdPiMultiple b = integrated_b(parse_base("torus:3"));
  EXPECT_NEAR(to_double(b.value(30)), 2 * M_PI / 3, 1e-14);
}

TEST(Berezin, ScalingInvarianceIsExact) {
  for (int n : {1, 3, 5, 7})
    for (const Rational& s : {q(2), q(1, 3), q(10), q(7, 5)}) {
      PiMultiple vol = *BaseManifold::sphere(n).volume();
      CollarMetric a{n, q(1), q(-2), q(1)}, b = a;
      b.scale = s;
      SurdPiMultiple x = integrated_b_class(a, vol), y = integrated_b_class(b, vol);
      EXPECT_EQ(x.coeff, y.coeff);
      EXPECT_EQ(x.half_pi_power, y.half_pi_power);
    }
}

TEST(Berezin, SidesAreAntisymmetric) {
  AnomalySides s = anomaly_sides(parse_base("sphere:3"), q(1, 5));
  EXPECT_TRUE(s.antisymmetric);
}
