// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "conetorsion/conetorsion.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

namespace ct = conetorsion;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string summarize(const ct::SuiteResult& r) {
  if (!r.error.empty()) return "error: " + r.error;
  std::string s;
  for (const auto& c : r.checks)
    if (!c.passed) s += (s.empty() ? "" : "; ") + c.label + " measured " + c.measured + " tolerance " + c.tolerance;
  return s.empty() ? std::to_string(r.checks.size()) + " checks" : s;
}

Outcome from_suite(const ct::SuiteResult& r) { return {r.passed(), summarize(r)}; }

// det H^k_0 on [eps, 1] by integrating y'' = (A^2 - 1/4) y / x^2 inward from
// y(1) = 0, y'(1) = -1; the determinant is -2 (y'(eps) + c y(eps) / eps).
double h_det_odeint(int k, int n, double eps) {
  using State = std::array<double, 2>;
  const double A = (n - 1) / 2.0 - k;
  const double q = A * A - 0.25;
  const double c = -A - 0.5;
  State y{0.0, -1.0};
  auto rhs = [q](const State& s, State& d, double x) {
    d[0] = s[1];
    d[1] = q * s[0] / (x * x);
  };
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, y, 1.0, eps, -1e-4);
  return -2 * (y[1] + c * y[0] / eps);
}

Outcome criterion_hdet(const ct::VerifyOptions& o) {
  ct::SuiteResult r = ct::suite_hdet(o);
  if (!r.passed()) return from_suite(r);
  double worst = 0;
  for (int n : {1, 3})
    for (int k = 0; k <= n; ++k)
      for (double e : {0.5, 0.25}) {
        double closed = 2 * std::pow(e, k - n / 2.0);
        worst = std::max(worst, std::abs(closed - h_det_odeint(k, n, e)));
      }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu checks, odeint worst gap %.2e", r.checks.size(), worst);
  return {worst <= 1e-8, buf};
}

}  // namespace

int main() {
  ct::VerifyOptions o;
  o.precision = 50;

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "DM identity r=1..9", 10, [&] { return from_suite(ct::suite_dm(o)); }},
      {2, "Wronskian at 50 digits", 5, [&] { return from_suite(ct::suite_wronskian(o)); }},
      {3, "truncated det ratios vs eigenvalue oracle", 600, [&] { return from_suite(ct::suite_detratio(o)); }},
      {4, "harmonic determinant 2 eps^(k-n/2)", 60, [&] { return criterion_hdet(o); }},
      {5, "t(0) = 0", 60, [&] { return from_suite(ct::suite_tzero(o)); }},
      {6, "large-lambda remainder slope -1/2", 120, [&] { return from_suite(ct::suite_ab(o)); }},
      {7, "large-nu remainder orders", 120, [&] { return from_suite(ct::suite_largenu(o)); }},
      {8, "eps independence of the difference", 120, [&] { return from_suite(ct::suite_eps(o)); }},
      {9, "spectral residual = rank * int B", 300, [&] { return from_suite(ct::suite_headline(o)); }},
      {10, "B-class scaling invariance", 1, [&] { return from_suite(ct::suite_scaling(o)); }},
      {11, "coclosed spectrum duality", 60, [&] { return from_suite(ct::suite_duality(o)); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget_seconds;
    bool ok = out.passed && in_time;
    if (!ok) ++failed;
    std::printf("%s criterion %2d  %-44s %8.2fs  %s%s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.c_str(), in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
