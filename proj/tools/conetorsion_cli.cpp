// conetorsion: cone torsion, verification suites and base spectra.
//
//   conetorsion torsion --base sphere:3 [--format table]
//   conetorsion torsion --spectrum-file s.txt
//   conetorsion verify --suite dm --suite scaling
//   conetorsion spectrum --base sphere:1 --cutoff 10 --out s1.txt
//
// Exit codes: 0 success, 1 configuration or IO error, 2 audit failure.

#include "conetorsion/conetorsion.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ct = conetorsion;

namespace {

constexpr double kHeadlineTolerance = 1e-6;
constexpr double kEpsTolerance = 1e-10;

struct RunConfig {
  std::string base;
  std::string spectrum_file;
  int precision = 50;
  std::vector<std::string> eps;
  std::string cutoff = "20";
  std::string out;
  std::string format = "json";
  std::vector<std::string> suites;
  int rmax = ct::kOlverMaxOrder;
  std::string grid = "full";
  std::string zeta_out, olver_out, bclass_out;
};

int default_precision() {
  const char* env = std::getenv("CONETORSION_PRECISION");
  if (!env || !*env) return 50;
  try {
    std::size_t used = 0;
    int p = std::stoi(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    return p;
  } catch (const std::exception&) {
    throw ct::FormatError(std::string("CONETORSION_PRECISION is not an integer: '") + env + "'");
  }
}

ct::BaseManifold load_base(const RunConfig& cfg) {
  if (!cfg.base.empty() && !cfg.spectrum_file.empty())
    throw ct::DomainError("give either --base or --spectrum-file, not both");
  if (!cfg.spectrum_file.empty()) return ct::read_spectrum_file(cfg.spectrum_file);
  if (cfg.base.empty()) throw ct::DomainError("a base is required (--base or --spectrum-file)");
  return ct::parse_base(cfg.base);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ct::Error("cannot open '" + cfg.out + "' for writing");
  f << text;
  if (!f) throw ct::Error("write to '" + cfg.out + "' failed");
}

void dump_json(const std::string& path, const ct::Json& j) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ct::Error("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
}

int cmd_torsion(const RunConfig& cfg) {
  ct::check_precision(cfg.precision);
  ct::BaseManifold m = load_base(cfg);
  const int P = cfg.precision;
  ct::TorsionBreakdown b = ct::cone_torsion(m, P);

  ct::Json eps_reports = ct::Json::array();
  if (!cfg.eps.empty() && m.has_closed_form()) {
    std::vector<ct::BigReal> values;
    for (const auto& e : cfg.eps) {
      ct::BigReal er = ct::make_real(ct::parse_rational(e), P + 10);
      ct::EpsilonReport r = ct::torsion_difference(m, er, P);
      values.push_back(r.value);
      ct::Json j;
      j["eps"] = e;
      j["difference"] = ct::to_decimal(r.value, P);
      j["log_eps_coefficient"] = ct::to_decimal(r.log_eps_coefficient, 6);
      eps_reports.push_back(j);
    }
    if (values.size() >= 2) {
      ct::BigReal spread = ct::make_real(0, P);
      for (const auto& v : values) spread = std::max(spread, ct::BigReal(abs(v - values.front())));
      b.eps_cancel = spread;
    }
  }

  std::string text;
  if (cfg.format == "table") {
    text = ct::torsion_table(m, b, P);
  } else {
    ct::Json j = ct::torsion_json(m, b, P);
    if (!eps_reports.empty()) j["eps_reports"] = eps_reports;
    text = j.dump(2) + "\n";
  }
  emit(cfg, text);
  if (!cfg.zeta_out.empty()) dump_json(cfg.zeta_out, ct::zeta_json(ct::zeta_report(m, P), P));
  if (!cfg.olver_out.empty()) dump_json(cfg.olver_out, ct::olver_json(ct::kOlverMaxOrder));
  if (!cfg.bclass_out.empty()) dump_json(cfg.bclass_out, ct::b_class_json(m.dimension()));

  bool failed = false;
  if (b.headline_gap && ct::to_double(abs(*b.headline_gap)) > kHeadlineTolerance) {
    std::cerr << "audit failed: headline gap " << ct::to_decimal(*b.headline_gap, 12) << " exceeds 1e-6\n";
    failed = true;
  }
  if (b.eps_cancel && ct::to_double(*b.eps_cancel) > kEpsTolerance) {
    std::cerr << "audit failed: eps dependence " << ct::to_decimal(*b.eps_cancel, 6) << " exceeds 1e-10\n";
    failed = true;
  }
  return failed ? 2 : 0;
}

int cmd_verify(const RunConfig& cfg) {
  ct::check_precision(cfg.precision);
  ct::VerifyOptions o;
  o.precision = cfg.precision;
  o.rmax = cfg.rmax;
  if (o.rmax < 1 || o.rmax > ct::kOlverMaxOrder) throw ct::DomainError("--rmax must lie in [1, 9]");
  if (cfg.grid != "full" && cfg.grid != "small") throw ct::DomainError("--grid must be full or small");
  o.small_grid = cfg.grid == "small";
  std::vector<std::string> names = cfg.suites.empty() ? ct::suite_names() : cfg.suites;
  for (const auto& n : names) {
    bool known = false;
    for (const auto& k : ct::suite_names()) known = known || k == n;
    if (!known) throw ct::DomainError("unknown suite '" + n + "'");
  }
  std::ostringstream os;
  bool all = true;
  for (const auto& n : names) {
    ct::SuiteResult r = ct::run_named_suite(n, o);
    all = all && r.passed();
    if (cfg.format == "table") {
      os << (r.passed() ? "PASS " : "FAIL ") << r.name << "\n";
      if (!r.error.empty()) os << "  error: " << r.error << "\n";
      for (const auto& c : r.checks)
        os << "  " << (c.passed ? "ok   " : "FAIL ") << c.label << "  " << c.measured << "  (" << c.tolerance << ")\n";
      continue;
    }
    // one JSON line per check
    for (const auto& c : r.checks) {
      ct::Json j;
      j["suite"] = r.name;
      j["check"] = c.label;
      j["passed"] = c.passed;
      j["measured"] = c.measured;
      j["tolerance"] = c.tolerance;
      os << j.dump() << "\n";
    }
    if (!r.error.empty()) {
      ct::Json j;
      j["suite"] = r.name;
      j["error"] = r.error;
      j["passed"] = false;
      os << j.dump() << "\n";
    }
  }
  emit(cfg, os.str());
  return all ? 0 : 2;
}

int cmd_spectrum(const RunConfig& cfg) {
  ct::BaseManifold m = load_base(cfg);
  ct::Rational cutoff = ct::parse_rational(cfg.cutoff);
  std::ostringstream os;
  ct::write_spectrum(os, m, cutoff);
  emit(cfg, os.str());
  // degrees k and n-1-k must carry the same spectrum
  const int n = m.dimension();
  auto same = [](const std::vector<ct::SpectralLine>& a, const std::vector<ct::SpectralLine>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].eta != b[i].eta || a[i].mult != b[i].mult) return false;
    return true;
  };
  for (int k = 0; 2 * k < n - 1; ++k) {
    auto lo = ct::coclosed_spectrum(m, k, cutoff), hi = ct::coclosed_spectrum(m, n - 1 - k, cutoff);
    // hand-written files may list only the lower degrees
    if (m.family() == ct::BaseFamily::file && (lo.empty() || hi.empty())) continue;
    if (!same(lo, hi)) {
      std::cerr << "audit failed: spectra of degrees " << k << " and " << n - 1 - k << " differ\n";
      return 2;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Analytic torsion of a bounded cone over a closed odd-dimensional base"};
  app.require_subcommand(1);

  try {
    cfg.precision = default_precision();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--precision", cfg.precision, "working precision in decimal digits (>= 20)");
    sub->add_option("--out", cfg.out, "write the output to this file");
    sub->add_option("--format", cfg.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  };
  auto add_base = [&](CLI::App* sub) {
    sub->add_option("--base", cfg.base, "sphere:N, torus:N[:a1,...,aN], optional :rank=R");
    sub->add_option("--spectrum-file", cfg.spectrum_file, "base spectrum file");
  };

  CLI::App* torsion = app.add_subcommand("torsion", "torsion breakdown with audits");
  add_common(torsion);
  add_base(torsion);
  torsion->add_option("--eps", cfg.eps, "truncation parameters for the difference report");
  torsion->add_option("--cutoff", cfg.cutoff, "unused by torsion; accepted for symmetry");
  torsion->add_option("--zeta-out", cfg.zeta_out, "write per-degree zeta data as JSON");
  torsion->add_option("--olver-out", cfg.olver_out, "write the Olver polynomial tables as JSON");
  torsion->add_option("--bclass-out", cfg.bclass_out, "write the expanded B-class terms as JSON");

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify);
  verify->add_option("--suite", cfg.suites, "suite name (repeatable); default all");
  verify->add_option("--rmax", cfg.rmax, "largest order for the dm suite");
  verify->add_option("--grid", cfg.grid, "full or small grid for detratio");

  CLI::App* spectrum = app.add_subcommand("spectrum", "write a base spectrum file");
  add_common(spectrum);
  add_base(spectrum);
  spectrum->add_option("--cutoff", cfg.cutoff, "largest nu written");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (torsion->parsed()) return cmd_torsion(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
