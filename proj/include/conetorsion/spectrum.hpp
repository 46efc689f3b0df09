#pragma once

// Coclosed-form spectra of the supported bases.
//
//   sphere:n          round unit sphere, n odd, n <= 7
//   torus:n           R^n / (2 pi Z)^n
//   torus:n:a1,...,an R^n / (2 pi a1 Z + ... + 2 pi an Z), a_i positive rationals
//   file bases        read from a spectrum file
//
// A trailing ":rank=R" selects the trivial flat bundle of rank R. Eigenvalues
// are kept exact: integers for spheres, rationals for tori with rational a_i.

#include "conetorsion/special.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace conetorsion {

struct DegreeData {
  int k = 0;
  Rational A;      // (n-1)/2 - k
  Rational delta;  // 1/2 in the middle degree, 1 otherwise
  Rational c;      // (-1)^k (k - n/2)
};

inline DegreeData degree_data(int n, int k) {
  if (n < 1 || n % 2 == 0) throw DomainError("degree_data: base dimension must be odd");
  if (k < 0 || k > n) throw DomainError("degree_data: degree outside [0, n]");
  DegreeData d;
  d.k = k;
  d.A = Rational(n - 1, 2) - k;
  d.delta = (2 * k == n - 1) ? Rational(1, 2) : Rational(1);
  d.c = Rational(k % 2 == 0 ? 1 : -1) * (Rational(k) - Rational(n, 2));
  return d;
}

struct SpectralLine {
  int k = 0;
  Rational eta;  // > 0
  BigInt mult;   // > 0, bundle rank included
  bool operator==(const SpectralLine& o) const { return k == o.k && eta == o.eta && mult == o.mult; }
  bool operator<(const SpectralLine& o) const {
    if (k != o.k) return k < o.k;
    if (eta != o.eta) return eta < o.eta;
    return mult < o.mult;
  }
};

// nu = sqrt(eta + A_k^2), stored through its exact square.
struct NuLine {
  Rational nu_sq;
  BigInt mult;
  BigReal nu(int digits) const { return sqrt(make_real(nu_sq, digits)); }
};

// coeff * pi^(half_pi_power / 2)
struct PiMultiple {
  Rational coeff;
  int half_pi_power = 0;
  BigReal value(int digits) const {
    BigReal p = pow(pi(digits + 5), make_real(half_pi_power, digits + 5) / 2);
    return make_real(make_real(coeff, digits + 5) * p, digits);
  }
};

enum class BaseFamily { sphere, torus, file };

class BaseManifold {
 public:
  BaseFamily family() const { return family_; }
  int dimension() const { return n_; }
  int rank() const { return rank_; }
  const std::string& descriptor() const { return descriptor_; }
  const std::vector<Rational>& torus_sides() const { return sides_; }
  const std::vector<SpectralLine>& file_lines() const { return lines_; }
  bool has_closed_form() const { return family_ != BaseFamily::file; }

  // b_k times the bundle rank.
  long betti(int k) const {
    if (k < 0 || k > n_) throw DomainError("betti: degree outside [0, n]");
    return betti_[k];
  }
  const std::vector<long>& betti_numbers() const { return betti_; }

  // Riemannian volume, exact up to a power of pi. Absent for file bases.
  std::optional<PiMultiple> volume() const {
    if (family_ == BaseFamily::sphere) {
      // 2 pi^((n+1)/2) / ((n-1)/2)!
      Rational f = 1;
      for (int i = 2; i <= (n_ - 1) / 2; ++i) f *= i;
      return PiMultiple{Rational(2) / f, n_ + 1};
    }
    if (family_ == BaseFamily::torus) {
      Rational c = 1;
      for (const auto& a : sides_) c *= 2 * a;
      return PiMultiple{c, 2 * n_};
    }
    return std::nullopt;
  }

  // Constant curvature of the base metric (spheres 1, tori 0).
  std::optional<Rational> curvature() const {
    if (family_ == BaseFamily::sphere) return Rational(1);
    if (family_ == BaseFamily::torus) return Rational(0);
    return std::nullopt;
  }

  static BaseManifold sphere(int n, int rank = 1) {
    if (n < 1 || n % 2 == 0 || n > 7) throw UnsupportedError("sphere: dimension must be odd and at most 7");
    check_rank(rank);
    BaseManifold m;
    m.family_ = BaseFamily::sphere;
    m.n_ = n;
    m.rank_ = rank;
    m.betti_.assign(n + 1, 0);
    m.betti_[0] = m.betti_[n] = rank;
    m.descriptor_ = "sphere:" + std::to_string(n) + rank_suffix(rank);
    return m;
  }

  static BaseManifold torus(int n, std::vector<Rational> sides = {}, int rank = 1) {
    if (n < 1 || n % 2 == 0 || n > 5) throw UnsupportedError("torus: dimension must be odd and at most 5");
    check_rank(rank);
    if (sides.empty()) sides.assign(n, Rational(1));
    if (static_cast<int>(sides.size()) != n) throw DomainError("torus: expected " + std::to_string(n) + " side factors");
    for (const auto& a : sides)
      if (a <= 0) throw DomainError("torus: side factors must be positive");
    BaseManifold m;
    m.family_ = BaseFamily::torus;
    m.n_ = n;
    m.rank_ = rank;
    m.sides_ = sides;
    m.betti_.resize(n + 1);
    for (int k = 0; k <= n; ++k) m.betti_[k] = rank * numerator(binomial(n, k)).convert_to<long>();
    bool unit = std::all_of(sides.begin(), sides.end(), [](const Rational& a) { return a == 1; });
    m.descriptor_ = "torus:" + std::to_string(n);
    if (!unit) {
      m.descriptor_ += ":";
      for (int i = 0; i < n; ++i) m.descriptor_ += (i ? "," : "") + to_string(sides[i]);
    }
    m.descriptor_ += rank_suffix(rank);
    return m;
  }

  static BaseManifold from_lines(int n, int rank, std::vector<long> betti, std::vector<SpectralLine> lines,
                                 std::string descriptor) {
    if (n < 1 || n % 2 == 0) throw FormatError("spectrum file: dimension must be odd");
    check_rank(rank);
    if (static_cast<int>(betti.size()) != n + 1) throw FormatError("spectrum file: betti line needs n+1 entries");
    for (long b : betti)
      if (b < 0) throw FormatError("spectrum file: negative Betti number");
    for (const auto& l : lines) {
      if (l.k < 0 || l.k > n) throw FormatError("spectrum file: degree outside [0, n]");
      if (l.eta <= 0) throw FormatError("spectrum file: eigenvalues must be positive");
      if (l.mult <= 0) throw FormatError("spectrum file: multiplicities must be positive");
    }
    std::sort(lines.begin(), lines.end());
    BaseManifold m;
    m.family_ = BaseFamily::file;
    m.n_ = n;
    m.rank_ = rank;
    m.betti_ = std::move(betti);
    m.lines_ = std::move(lines);
    m.descriptor_ = std::move(descriptor);
    return m;
  }

 private:
  static void check_rank(int rank) {
    if (rank < 1) throw DomainError("bundle rank must be positive");
  }
  static std::string rank_suffix(int rank) { return rank == 1 ? "" : ":rank=" + std::to_string(rank); }

  BaseFamily family_ = BaseFamily::sphere;
  int n_ = 1;
  int rank_ = 1;
  std::vector<long> betti_;
  std::vector<Rational> sides_;
  std::vector<SpectralLine> lines_;
  std::string descriptor_;
};

// "sphere:3", "torus:3", "torus:3:1,1,1/2", each optionally followed by ":rank=R".
inline BaseManifold parse_base(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2) throw FormatError("base selector '" + text + "' needs family:dimension");
  int rank = 1;
  if (parts.back().rfind("rank=", 0) == 0) {
    try {
      rank = std::stoi(parts.back().substr(5));
    } catch (const std::exception&) {
      throw FormatError("bad rank in '" + text + "'");
    }
    parts.pop_back();
  }
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw FormatError("bad dimension");
  } catch (const std::exception&) {
    throw FormatError("bad dimension in '" + text + "'");
  }
  if (parts[0] == "sphere" && parts.size() == 2) return BaseManifold::sphere(n, rank);
  if (parts[0] == "torus" && parts.size() <= 3) {
    std::vector<Rational> sides;
    if (parts.size() == 3) {
      std::stringstream s2(parts[2]);
      for (std::string a; std::getline(s2, a, ',');) sides.push_back(parse_rational(a));
    }
    return BaseManifold::torus(n, sides, rank);
  }
  throw UnsupportedError("unsupported base '" + text + "'");
}

namespace detail {

// Number of dual-lattice vectors xi != 0 with |xi|^2 = q, for every q <= max_norm.
// Dual lattice of the torus with sides 2 pi a_i: xi_i = m_i / a_i.
inline std::map<Rational, BigInt> torus_norm_counts(const std::vector<Rational>& sides, const Rational& max_norm) {
  const int n = static_cast<int>(sides.size());
  std::vector<Rational> inv2(n);
  std::vector<long> bound(n);
  for (int i = 0; i < n; ++i) {
    inv2[i] = 1 / (sides[i] * sides[i]);
    // |m_i| <= a_i sqrt(max_norm)
    double b = std::sqrt(std::max(0.0, (max_norm * sides[i] * sides[i]).convert_to<double>()));
    bound[i] = static_cast<long>(std::floor(b)) + 1;
  }
  std::map<Rational, long> counts;
  std::vector<long> m(n, 0);
  // depth-first over coordinates with exact pruning
  std::vector<Rational> partial(n + 1, Rational(0));
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      if (partial[n] != 0) ++counts[partial[n]];
      return;
    }
    for (long v = -bound[i]; v <= bound[i]; ++v) {
      partial[i + 1] = partial[i] + inv2[i] * (v * v);
      if (partial[i + 1] > max_norm) continue;
      m[i] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  std::map<Rational, BigInt> out;
  for (const auto& [q, c] : counts) out.emplace(q, BigInt(c));
  return out;
}

// Multiplicity of the sphere family at level j >= 1 in degree k.
inline BigInt sphere_multiplicity(int n, int k, long j) {
  // (j+n-1)! (2j+n-1) / (k! (n-k-1)! (j-1)! (j+n-k-1) (j+k))
  BigInt num = 2 * j + n - 1;
  for (long i = j; i <= j + n - 1; ++i) num *= i;  // (j+n-1)!/(j-1)!
  BigInt den = BigInt(j + n - k - 1) * BigInt(j + k);
  for (int i = 2; i <= k; ++i) den *= i;
  for (int i = 2; i <= n - k - 1; ++i) den *= i;
  if (num % den != 0) throw StructuralError("sphere multiplicity is not an integer");
  return num / den;
}

inline void check_degree(const BaseManifold& m, int k) {
  if (k < 0 || k > m.dimension()) throw DomainError("degree outside [0, n]");
}

}  // namespace detail

// Coclosed spectrum in degree k with nu(eta) <= cutoff (inclusive), ascending in eta.
inline std::vector<SpectralLine> coclosed_spectrum(const BaseManifold& m, int k, const Rational& cutoff) {
  detail::check_degree(m, k);
  if (cutoff <= 0) throw DomainError("cutoff must be positive");
  const int n = m.dimension();
  const Rational a = degree_data(n, k).A;
  const Rational max_eta = cutoff * cutoff - a * a;
  std::vector<SpectralLine> out;
  if (max_eta <= 0) return out;
  switch (m.family()) {
    case BaseFamily::sphere: {
      if (k == n) return out;  // coclosed n-forms are harmonic
      for (long j = 1;; ++j) {
        Rational eta = Rational((j + k) * (j + n - k - 1));
        if (eta > max_eta) break;
        out.push_back({k, eta, detail::sphere_multiplicity(n, k, j) * m.rank()});
      }
      return out;
    }
    case BaseFamily::torus: {
      if (k == n) return out;
      BigInt per = numerator(binomial(n - 1, k)) * m.rank();
      for (const auto& [q, c] : detail::torus_norm_counts(m.torus_sides(), max_eta)) out.push_back({k, q, c * per});
      return out;
    }
    case BaseFamily::file:
      for (const auto& l : m.file_lines())
        if (l.k == k && l.eta <= max_eta) out.push_back(l);
      return out;
  }
  return out;
}

inline std::vector<NuLine> nu_stream(const BaseManifold& m, int k, const Rational& cutoff) {
  const Rational a = degree_data(m.dimension(), k).A;
  std::vector<NuLine> out;
  for (const auto& l : coclosed_spectrum(m, k, cutoff)) out.push_back({l.eta + a * a, l.mult});
  return out;
}

// Counting function sum of multiplicities with nu <= x.
inline BigInt counting_function(const BaseManifold& m, int k, const Rational& x) {
  BigInt c = 0;
  for (const auto& l : coclosed_spectrum(m, k, x)) c += l.mult;
  return c;
}

// Leading Weyl constant C with N_k(nu) ~ C nu^n for coclosed k-forms.
inline BigReal weyl_constant(const BaseManifold& m, int k, int digits) {
  auto vol = m.volume();
  if (!vol) throw UnsupportedError("weyl_constant: volume unknown for file bases");
  const int n = m.dimension();
  BigReal ball = pow(pi(digits), make_real(n, digits) / 2) / gamma_fn(make_real(n, digits) / 2 + 1, digits);
  BigReal c = make_real(binomial(n - 1, k) * m.rank(), digits) * vol->value(digits) * ball /
              pow(2 * pi(digits), make_real(n, digits));
  return c;
}

// --- spectrum files ---------------------------------------------------------

inline std::string eta_text(const Rational& q) { return to_exact_decimal(q); }

inline void write_spectrum(std::ostream& os, const BaseManifold& m, const Rational& cutoff) {
  os << "dim=" << m.dimension() << " rank=" << m.rank() << "\n";
  os << "betti=";
  for (int k = 0; k <= m.dimension(); ++k) os << (k ? "," : "") << m.betti(k);
  os << "\n";
  for (int k = 0; k <= m.dimension(); ++k)
    for (const auto& l : coclosed_spectrum(m, k, cutoff)) os << l.k << "," << eta_text(l.eta) << "," << l.mult.str() << "\n";
}

inline BaseManifold read_spectrum(std::istream& is, const std::string& name = "file") {
  std::string line;
  int lineno = 0;
  auto next = [&](std::string& out) -> bool {
    while (std::getline(is, out)) {
      ++lineno;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      auto first = out.find_first_not_of(" \t");
      if (first == std::string::npos || out[first] == '#') continue;
      out = out.substr(first);
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    return FormatError(name + ":" + std::to_string(lineno) + ": " + what);
  };
  if (!next(line)) throw FormatError(name + ": empty spectrum file");
  int n = 0, rank = 0;
  {
    std::istringstream hs(line);
    std::string a, b, extra;
    hs >> a >> b;
    if (a.rfind("dim=", 0) != 0 || b.rfind("rank=", 0) != 0 || (hs >> extra)) throw fail("expected 'dim=n rank=R'");
    try {
      n = std::stoi(a.substr(4));
      rank = std::stoi(b.substr(5));
    } catch (const std::exception&) {
      throw fail("expected 'dim=n rank=R'");
    }
  }
  if (!next(line) || line.rfind("betti=", 0) != 0) throw fail("expected 'betti=b_0,...,b_n'");
  std::vector<long> betti;
  {
    std::stringstream bs(line.substr(6));
    for (std::string t; std::getline(bs, t, ',');) {
      try {
        std::size_t used = 0;
        betti.push_back(std::stol(t, &used));
        if (used != t.size()) throw fail("bad Betti number '" + t + "'");
      } catch (const std::logic_error&) {
        throw fail("bad Betti number '" + t + "'");
      }
    }
  }
  std::vector<SpectralLine> lines;
  while (next(line)) {
    std::stringstream ls(line);
    std::string kt, et, mt, extra;
    if (!std::getline(ls, kt, ',') || !std::getline(ls, et, ',') || !std::getline(ls, mt, ',') || std::getline(ls, extra, ','))
      throw fail("expected 'k,eta,mult'");
    SpectralLine l;
    try {
      std::size_t used = 0;
      l.k = std::stoi(kt, &used);
      if (used != kt.size()) throw fail("bad degree");
      l.eta = parse_rational(et);
      l.mult = BigInt(mt);
    } catch (const FormatError& e) {
      throw fail(e.what());
    } catch (const std::exception&) {
      throw fail("malformed record '" + line + "'");
    }
    lines.push_back(l);
  }
  try {
    return BaseManifold::from_lines(n, rank, std::move(betti), std::move(lines), "file:" + name);
  } catch (const FormatError& e) {
    throw FormatError(name + ": " + e.what());
  }
}

inline BaseManifold read_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open spectrum file '" + path + "'");
  return read_spectrum(in, path);
}

}  // namespace conetorsion
