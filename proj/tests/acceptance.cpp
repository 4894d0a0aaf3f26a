// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cdop/cli.hpp"
#include "cdop/errors.hpp"
#include "cdop/hypercomplex.hpp"
#include "cdop/inversion.hpp"
#include "cdop/io.hpp"
#include "cdop/kernel_ops.hpp"
#include "cdop/line_fourier.hpp"
#include "cdop/random.hpp"
#include "cdop/spectra.hpp"
#include "cdop/symbol.hpp"

using namespace cdop;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double circle_dist(double theta) { return std::abs(std::remainder(theta, kTwoPi)); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Weak associativity and norm laws.
Outcome algebra_identities() {
  Outcome o;
  Rng rng(1001);
  double norm_worst = 0, ident_worst = 0;
  for (int v = 0; v <= 3; ++v)
    for (int rep = 0; rep < 1000; ++rep) {
      const CdNumber a = random_number(rng, v), b = random_number(rng, v), c = random_number(rng, v);
      if (v >= 1) norm_worst = std::max(norm_worst, std::abs(cd_mul(a, b).norm() - a.norm() * b.norm()));
      ident_worst = std::max(ident_worst, identity_checks(a, b, c).max());
    }
  o.pass = norm_worst <= 1e-12 && ident_worst <= 1e-12;

  // Sedenion basis search: alternativity fails for (e_a + e_b, e_c).
  std::string counter = "none";
  for (std::size_t a = 1; a < 16 && counter == "none"; ++a)
    for (std::size_t b = a + 1; b < 16 && counter == "none"; ++b)
      for (std::size_t c = 1; c < 16 && counter == "none"; ++c) {
        const CdNumber x = CdNumber::basis(4, a) + CdNumber::basis(4, b);
        const IdentityReport r = identity_checks(x, CdNumber::basis(4, c), CdNumber::basis(4, c));
        if (r.left_alternative > 0.5)
          counter = "e" + std::to_string(a) + "+e" + std::to_string(b) + ", e" + std::to_string(c);
      }
  // Zero divisor (e_a ± e_b)(e_c ± e_d) = 0.
  std::string zd = "none";
  for (std::size_t a = 1; a < 16 && zd == "none"; ++a)
    for (std::size_t b = a + 1; b < 16 && zd == "none"; ++b)
      for (std::size_t c = 1; c < 16 && zd == "none"; ++c)
        for (std::size_t d = c + 1; d < 16 && zd == "none"; ++d)
          for (double s1 : {1.0, -1.0})
            for (double s2 : {1.0, -1.0}) {
              const CdNumber x = CdNumber::basis(4, a) + CdNumber::basis(4, b, s1);
              const CdNumber y = CdNumber::basis(4, c) + CdNumber::basis(4, d, s2);
              if (zd == "none" && cd_mul(x, y).is_zero()) {
                zd = "(e" + std::to_string(a) + (s1 > 0 ? "+" : "-") + "e" + std::to_string(b) + ")(e" + std::to_string(c) +
                     (s2 > 0 ? "+" : "-") + "e" + std::to_string(d) + ")";
              }
            }
  o.pass = o.pass && counter != "none" && zd != "none";
  o.detail = "norm " + fmt("%.2e", norm_worst) + ", identities " + fmt("%.2e", ident_worst) + ", v=4 counterexample (" +
             counter + "), zero divisor " + zd;
  return o;
}

// 2. symbol(AB) = symbol(A) symbol(B).
Outcome symbol_homomorphism() {
  Rng rng(1002);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const auto d = static_cast<std::size_t>(rng.integer(1, 2));
    const BandPeriodicOp a = random_op(rng, 2, d, n, static_cast<std::size_t>(rng.integer(0, 3)));
    const BandPeriodicOp b = random_op(rng, 2, d, n, static_cast<std::size_t>(rng.integer(0, 3)));
    const BlockedCoeffs ca = block(a), cb = block(b), cab = block(compose(a, b));
    for (int k = 0; k < 64; ++k) {
      const SymbolPoint p = SymbolPoint::at(kTwoPi * k / 64.0);
      worst = std::max(worst, (symbol_eval(cab, p) - symbol_eval(ca, p) * symbol_eval(cb, p)).op_norm_bound());
    }
  }
  return {worst <= 1e-10, "max residual " + fmt("%.2e", worst)};
}

// 3. Dense block-circulant eigenvalues against the sampled symbol spectra.
Outcome circulant() {
  Rng rng(1003);
  double worst = 0;
  bool all = true;
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const auto d = static_cast<std::size_t>(rng.integer(1, 2));
    const BandPeriodicOp b = random_op(rng, 2, d, n, static_cast<std::size_t>(rng.integer(0, 3)));
    const Eigenvalues dense = circulant_oracle(b, 32);
    const Eigenvalues sampled = sampled_union_at_roots(b, 32);
    all = all && multiset_match(dense, sampled, 1e-8);
    worst = std::max(worst, bottleneck_distance(dense, sampled));
  }
  return {all, "max bottleneck distance " + fmt("%.2e", worst)};
}

// 4. Symbol criterion in both directions.
Outcome symbol_criterion() {
  Rng rng(1004);
  double res = 0, off = 0, min_margin = 1e300;
  int used = 0;
  while (used < 20) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const auto d = static_cast<std::size_t>(rng.integer(1, 2));
    const BandPeriodicOp b = add(BandPeriodicOp::identity(2, d, n), random_op(rng, 2, d, n, 2, true, rng.uniform(0.5, 1.5)));
    const InvertibilityResult t = invertibility_test(b, 64);
    if (t.margin < 0.2) continue;
    ++used;
    min_margin = std::min(min_margin, t.margin);
    const InverseReport r = wiener_invert(b);
    res = std::max({res, r.residual_left, r.residual_right});
    const BlockedCoeffs cb = block(b), cd = block(r.inverse);
    for (int k = 0; k < 17; ++k) {
      const SymbolPoint p = SymbolPoint::at(kTwoPi * (k + 0.37) / 17.0);
      off = std::max(off, (symbol_eval(cd, p) * symbol_eval(cb, p) - CdMatrix::identity(2, n * d)).op_norm_bound());
    }
  }
  const BandPeriodicOp sing = subtract(BandPeriodicOp::identity(2, 1), BandPeriodicOp::shift(2, 1, 1));
  double theta = 1e300;
  bool flagged = false;
  try {
    wiener_invert(sing);
  } catch (const IllConditionedError& e) {
    flagged = true;
    theta = e.witness().at("theta");
  }
  const bool pass = res <= 1e-8 && off <= 1e-8 && flagged && circle_dist(theta) <= 1e-3;
  return {pass, std::to_string(used) + " operators, min margin " + fmt("%.3f", min_margin) + ", window residual " + fmt("%.2e", res) + ", off-grid " +
                    fmt("%.2e", off) + ", I - S(1) witness theta " + fmt("%.2e", theta)};
}

// 5. D_k = c^k for B = I - cS(1).
Outcome geometric() {
  Rng rng(1005);
  double worst = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const CdComplex c = 0.5 * CdComplex(random_unit(rng, 2));
    const BandPeriodicOp cs = scale_left(c, BandPeriodicOp::shift(2, 1, 1));
    const InverseReport wr = wiener_invert(subtract(BandPeriodicOp::identity(2, 1), cs), 64, 1e-13);
    const NeumannResult nr = neumann_inverse(scale(cs, -1.0), 1e-14, 200, 64);
    CdComplex ck = CdComplex::scalar(2, 1.0);
    for (long k = 0; k <= 30; ++k) {
      worst = std::max(worst, (wr.inverse.block(0, k)(0, 0) - ck).norm());
      worst = std::max(worst, (nr.inverse.block(0, k)(0, 0) - ck).norm());
      ck = c * ck;
    }
  }
  return {worst <= 1e-10, "max |D_k - c^k| " + fmt("%.2e", worst)};
}

// 6. Kernel pipeline: torus margin against the dense periodization.
Outcome kernel_pipeline() {
  Rng rng(1006);
  const CdMatrix coeff = CdMatrix::scalar(CdComplex(random_unit(rng, 2)), 1);
  const CellGrid grid{{1.0}, 16, Quadrature::trapezoid};
  const KernelSpec k = KernelSpec::difference(coeff, 0.6, Profile::gaussian, {0.1}, {1.0});
  const BlockedKernelOp op = discretize(k, grid, {1});
  const TorusResult t = torus_invertibility(op, 32);
  const double dense = periodized_min_singular_value(op.to_band_op(), 32);
  const double gap = std::abs(t.margin - dense);

  const CdMatrix one = CdMatrix::scalar(CdComplex::scalar(2, 1.0), 1);
  const KernelSpec zm = KernelSpec::difference(one, 1.0, Profile::gaussian, {0.1}, {1.0});
  const TorusResult ts = torus_invertibility(discretize(zm, grid, {1}), 32);
  const bool pass = gap <= 1e-3 && t.invertible && !ts.invertible && circle_dist(ts.witness[0]) <= 1e-3;
  return {pass, "torus margin " + fmt("%.6f", t.margin) + " vs dense " + fmt("%.6f", dense) + ", zero-mean kernel margin " +
                    fmt("%.2e", ts.margin) + " at theta " + fmt("%.2e", ts.witness[0])};
}

CdMatrix quat(double a, double b, double c, double d) { return CdMatrix::scalar(CdComplex(CdNumber(2, {a, b, c, d})), 1); }

// 7. Window localisation of a two-mode series.
Outcome window() {
  PeriodicSeries x;
  x.coeffs.emplace(0, quat(1, 0.3, 0, 0.1));
  x.coeffs.emplace(1, quat(0.1, 0, 0.2, 0));
  double agree = 0, best_rho = 1e300, eps_found = 0;
  for (int k = 1; k <= 10; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const WindowResult r = window_localize(x, eps, 4096, 257);
    agree = std::max(agree, r.agreement);
    if (r.rho < 1.0 && eps_found == 0) eps_found = eps;
    best_rho = std::min(best_rho, r.rho);
  }
  return {eps_found > 0 && agree <= 1e-8, "first eps with rho < 1: " + fmt("%g", eps_found) + ", min rho " +
                                               fmt("%.3e", best_rho) + ", max |y - x| on the window " + fmt("%.2e", agree)};
}

// 8. Fejér error trend.
Outcome fejer() {
  const std::vector<std::pair<std::string, std::function<double(double)>>> suite{
      {"gauss", [](double t) { return std::exp(-0.5 * (t - 0.2) * (t - 0.2) / 0.16); }},
      {"hat", [](double t) { return std::max(0.0, 1.0 - std::abs(t)); }},
      {"box", [](double t) { return std::abs(t) <= 1.0 ? 1.0 : 0.0; }}};
  Outcome o;
  const CdMatrix amp = quat(1, 0.5, 0, 0);
  for (const auto& [name, p] : suite) {
    const LineFunction f =
        LineFunction::sample(2, 1, -3, 1.0 / 128, 769, [&](double t) { return p(t) * amp; });
    const FejerTrend tr = fejer_trend(f, {4, 16, 64, 256});
    o.pass = o.pass && tr.decreasing && tr.within_envelope;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += name + " C=" + fmt("%.3f", tr.envelope_c) + " errors";
    for (double e : tr.errors) o.detail += " " + fmt("%.2e", e);
  }
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

int cdop(const fs::path& dir, std::vector<std::string> args) {
  args.insert(args.begin(), {"cdop", "--out-dir", dir.string(), "--seed", "2024"});
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 9. The CLI pipeline twice with one seed.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "cdop_acceptance";
  auto pipeline = [&](std::map<std::string, std::string>& files) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    int bad = 0;
    auto step = [&](std::vector<std::string> args) {
      const std::string name = args[0] + (args.size() > 1 && args[1].rfind("--", 0) != 0 ? "_" + args[1] : "");
      bad += cdop(dir, std::move(args)) != 0;
      fs::rename(dir / "manifest.json", dir / ("manifest_" + name + ".json"));
    };
    const std::string d = dir.string() + "/";
    step({"op", "random", "--d", "2", "--n", "2", "--K", "2", "--norm", "0.4", "--plus-identity", "--out", "a.json"});
    step({"symbol", "--op", d + "a.json", "--samples", "32", "--out", "sym.json"});
    step({"invert", "--op", d + "a.json", "--out", "inv.json", "--report", "inv_report.json"});
    step({"op", "compose", "--in", d + "inv.json", "--in2", d + "a.json", "--out", "prod.json", "--report", "prod_report.json"});
    step({"spectrum", "--op", d + "a.json", "--samples", "32", "--out", "cloud.csv"});
    step({"spectrum", "oracle", "--op", d + "a.json", "--N", "16", "--out", "oracle.csv"});
    io::write_atomic(dir / "k.json", R"({"w":2,"axes":[0],"periods":[1.0],"d":1,"kind":"difference",
      "coeff":[[[1,0,0,0]]],"weight":0.5,"profile":"gaussian","widths":[0.15]})");
    step({"kernel", "invert", "--spec", d + "k.json", "--grid", "8", "--band", "1", "--samples", "16", "--out", "k_report.json"});
    io::write_atomic(dir / "x.json",
                     R"({"v":2,"d":1,"coeffs":[{"n":0,"matrix":[[[1,0.3,0,0.1]]]},{"n":1,"matrix":[[[0.1,0,0.2,0]]]}]})");
    step({"wiener", "localize", "--in", d + "x.json", "--n-max", "1024", "--out", "loc.json"});
    files = snapshot(dir);
    return bad;
  };
  std::map<std::string, std::string> first, second;
  const int bad1 = pipeline(first), bad2 = pipeline(second);
  fs::remove_all(dir);
  std::size_t bytes = 0;
  for (const auto& [k, v] : first) bytes += v.size();
  const bool same = first == second;
  return {bad1 == 0 && bad2 == 0 && same, std::to_string(first.size()) + " artifacts, " + std::to_string(bytes) + " bytes, " +
                                              (same ? "identical" : "differ") + ", failed steps " +
                                              std::to_string(bad1 + bad2)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
  };
  const Criterion all[] = {{1, "algebra identities", 5, algebra_identities},
                           {2, "symbol homomorphism", 10, symbol_homomorphism},
                           {3, "circulant oracle", 60, circulant},
                           {4, "symbol criterion", 30, symbol_criterion},
                           {5, "geometric inverse", 0, geometric},
                           {6, "kernel pipeline", 60, kernel_pipeline},
                           {7, "window localisation", 0, window},
                           {8, "fejer trend", 0, fejer},
                           {9, "determinism", 0, determinism}};
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += ", over the " + fmt("%g", c.budget_s) + " s budget";
    }
    failures += !o.pass;
    std::printf("criterion %d %-20s %s  [%.2f s]  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
