#include "cdop/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cdop/errors.hpp"
#include "cdop/hypercomplex.hpp"
#include "cdop/inversion.hpp"
#include "cdop/io.hpp"
#include "cdop/kernel_ops.hpp"
#include "cdop/line_fourier.hpp"
#include "cdop/random.hpp"
#include "cdop/sequence_ops.hpp"
#include "cdop/spectra.hpp"
#include "cdop/symbol.hpp"

namespace cdop::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

struct Session {
  std::string out_dir = ".";
  std::string format;  // empty: csv for point clouds, json otherwise

  bool cloud_csv(const std::string& path) const {
    return format == "csv" || (format.empty() && !path.ends_with(".json"));
  }
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::string error_report;  // where a failure report goes, when the command names one
  Json artifacts = Json::array();

  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : fs::path(out_dir) / q;
  }

  void emit(const std::string& path, const std::string& content, const std::string& role) {
    io::write_atomic(resolve(path), content);
    artifacts.push_back(Json{{"role", role}, {"path", path}, {"bytes", content.size()}, {"fnv1a64", hex(fnv1a(content))}});
  }
  void emit_json(const std::string& path, const Json& j, const std::string& role) { emit(path, io::dump(j), role); }
};

Json complex_list(const Eigenvalues& e) {
  Json a = Json::array();
  for (const auto& z : e) a.push_back(Json::array({z.real(), z.imag()}));
  return a;
}

Json cloud_json(const SpectrumCloud& c) {
  Json samples = Json::array();
  for (const auto& s : c.samples) samples.push_back(Json{{"theta", s.theta}, {"eigenvalues", complex_list(s.eigenvalues)}});
  return Json{{"v", c.level}, {"d", c.d}, {"n", c.n}, {"band", c.band}, {"samples", std::move(samples)}};
}

Json witness_json(const Error::Witness& w) {
  Json j = Json::object();
  for (const auto& [k, v] : w) j[k] = v;
  return j;
}

BandPeriodicOp load_op(const std::string& path) { return io::op_from_json(io::read_json_file(path)); }

std::vector<std::size_t> parse_list(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw DomainError(std::string("cannot read ") + what + " list '" + s + "'");
    }
  }
  if (out.empty()) throw DomainError(std::string("empty ") + what + " list");
  return out;
}

// Config echo: every option of the parsed command chain with its resolved value.
void echo_options(const CLI::App* app, Json& config) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      config[name] = res.size() == 1 ? Json(res.front()) : Json(res);
    } else {
      config[name] = opt->get_default_str();
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Session s;
  CLI::App app{"Operator calculus over Cayley-Dickson algebras", "cdop"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", s.seed, "seed for randomized fixtures");
  app.add_option("--tol", s.tol, "default tail tolerance");
  app.add_option("--out-dir", s.out_dir, "directory for artifacts and manifest.json");
  app.add_option("--format", s.format, "point-cloud output format")->check(CLI::IsMember({"json", "csv"}));

  // algebra
  int level = 2;
  std::string out_path;
  auto* algebra = app.add_subcommand("algebra", "hypercomplex arithmetic")->require_subcommand(1);
  auto* table = algebra->add_subcommand("table", "basis multiplication table as CSV");
  table->add_option("--level", level, "doubling level v")->check(CLI::Range(0, 8));
  table->add_option("--out", out_path, "CSV path (stdout when absent)");

  // op
  std::string in1, in2, report_path;
  std::size_t d = 1, n = 1, K = 1;
  double norm = 0;
  long ribbon_k = -1, ribbon_n = 0;
  auto* op = app.add_subcommand("op", "band-periodic operators")->require_subcommand(1);
  auto* compose_cmd = op->add_subcommand("compose", "product of two operators");
  compose_cmd->add_option("--in", in1)->required();
  compose_cmd->add_option("--in2", in2)->required();
  compose_cmd->add_option("--out", out_path)->required();
  compose_cmd->add_option("--report", report_path, "distance of the product to the identity");
  auto* apply_cmd = op->add_subcommand("apply", "apply an operator to a finitely supported sequence");
  apply_cmd->add_option("--in", in1)->required();
  apply_cmd->add_option("--in2", in2)->required();
  apply_cmd->add_option("--out", out_path)->required();
  auto* classify_cmd = op->add_subcommand("classify", "period, offsets, diagonality");
  classify_cmd->add_option("--in", in1)->required();
  classify_cmd->add_option("--out", out_path)->required();
  classify_cmd->add_option("--ribbon-k", ribbon_k, "test the (k, n)-ribbon property");
  classify_cmd->add_option("--ribbon-n", ribbon_n);
  auto* random_cmd = op->add_subcommand("random", "seeded random operator");
  random_cmd->add_option("--level", level)->check(CLI::Range(0, 4));
  random_cmd->add_option("--d", d)->check(CLI::Range(1, 16));
  random_cmd->add_option("--n", n)->check(CLI::Range(1, 64));
  random_cmd->add_option("--K", K)->check(CLI::Range(0, 64));
  random_cmd->add_option("--norm", norm, "rescale to this op-norm bound (0 keeps the raw scale)");
  bool plus_identity = false;
  random_cmd->add_flag("--plus-identity", plus_identity, "return I + A");
  random_cmd->add_option("--out", out_path)->required();

  // symbol
  std::string op_path;
  std::size_t samples = 64;
  auto* symbol = app.add_subcommand("symbol", "Fourier symbol samples")->require_subcommand(0, 1);
  symbol->add_option("--op", op_path);
  symbol->add_option("--samples", samples);
  symbol->add_option("--out", out_path);
  auto* coeffs_cmd = symbol->add_subcommand("coeffs", "blocked coefficients T_q");
  coeffs_cmd->add_option("--op", op_path)->required();
  coeffs_cmd->add_option("--out", out_path)->required();

  // invert
  double tail_tol = -1;
  auto* invert = app.add_subcommand("invert", "inverse via the inverted symbol");
  invert->add_option("--op", op_path)->required();
  invert->add_option("--samples", samples);
  invert->add_option("--tail-tol", tail_tol, "defaults to --tol");
  invert->add_option("--out", out_path)->required();
  invert->add_option("--report", report_path);

  // spectrum
  std::size_t N = 32;
  auto* spectrum = app.add_subcommand("spectrum", "union of pointwise symbol spectra")->require_subcommand(0, 1);
  spectrum->add_option("--op", op_path);
  spectrum->add_option("--samples", samples);
  spectrum->add_option("--out", out_path);
  auto* oracle_cmd = spectrum->add_subcommand("oracle", "eigenvalues of the block-circulant periodization");
  oracle_cmd->add_option("--op", op_path)->required();
  oracle_cmd->add_option("--N", N);
  oracle_cmd->add_option("--out", out_path)->required();

  // kernel
  std::string spec_path, band_list = "2", rule = "trapezoid", inverse_path;
  std::size_t G = 8;
  auto* kernel = app.add_subcommand("kernel", "periodic integral kernels")->require_subcommand(1);
  auto add_kernel_opts = [&](CLI::App* c) {
    c->add_option("--spec", spec_path)->required();
    c->add_option("--grid", G)->check(CLI::Range(1, 256));
    c->add_option("--band", band_list, "cell band per axis, comma separated");
    c->add_option("--samples", samples);
    c->add_option("--rule", rule)->check(CLI::IsMember({"trapezoid", "midpoint"}));
    c->add_option("--tail-tol", tail_tol, "defaults to --tol");
    c->add_option("--out", out_path)->required();
  };
  auto* kinvert = kernel->add_subcommand("invert", "torus invertibility test");
  add_kernel_opts(kinvert);
  kinvert->add_option("--inverse", inverse_path, "one active axis: write the inverse of I - Q");
  auto* kspectrum = kernel->add_subcommand("spectrum", "pointwise spectra over the torus");
  add_kernel_opts(kspectrum);

  // wiener
  double eps = 0, delta = 0.1;
  long n_max = 4096;
  std::size_t keep = 16, grid = 64, budget = 16, pad = 16;
  std::string orders = "4,16,64,256", target_path;
  auto* wiener = app.add_subcommand("wiener", "Wiener-type lemmas on the circle and the line")->require_subcommand(1);
  auto* localize = wiener->add_subcommand("localize", "window localisation of a series");
  localize->add_option("--in", in1)->required();
  localize->add_option("--eps", eps, "window half-width (sweep 2^-1 .. 2^-10 when absent)");
  localize->add_option("--n-max", n_max);
  localize->add_option("--keep", keep, "coefficients |n| <= keep written out");
  localize->add_option("--out", out_path)->required();
  auto* icircle = wiener->add_subcommand("invert-circle", "left inverse of a series");
  icircle->add_option("--in", in1)->required();
  icircle->add_option("--grid", grid);
  icircle->add_option("--tail-tol", tail_tol, "defaults to --tol");
  icircle->add_option("--out", out_path)->required();
  auto* fejer = wiener->add_subcommand("fejer", "Fejér smoothing errors");
  fejer->add_option("--in", in1)->required();
  fejer->add_option("--orders", orders);
  fejer->add_option("--pad", pad);
  fejer->add_option("--out", out_path)->required();
  auto* density = wiener->add_subcommand("density", "approximation by lattice translates");
  density->add_option("--in", in1)->required();
  density->add_option("--target", target_path)->required();
  density->add_option("--delta", delta);
  density->add_option("--budget", budget);
  density->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kPrecondition;
  }

  Json command = Json::array();
  Json config = Json::object();
  echo_options(&app, config);
  for (const CLI::App* c = &app; c != nullptr;) {
    const auto subs = c->get_subcommands();
    if (subs.empty()) break;
    c = subs.front();
    command.push_back(c->get_name());
    Json sub = Json::object();
    echo_options(c, sub);
    if (!sub.empty()) config[c->get_name()] = std::move(sub);
  }

  int status = kOk;
  Json error = nullptr;
  const double tail = tail_tol > 0 ? tail_tol : s.tol;
  try {
    if (*table) {
      const auto& t = SignTable::get(level);
      std::ostringstream os;
      os << "row,col,target,sign\n";
      for (std::size_t j = 0; j < t.dim(); ++j)
        for (std::size_t k = 0; k < t.dim(); ++k) os << j << ',' << k << ',' << t.target(j, k) << ',' << t.sign(j, k) << '\n';
      if (out_path.empty()) {
        out << os.str();
      } else {
        s.emit(out_path, os.str(), "table");
      }
    } else if (*compose_cmd) {
      const BandPeriodicOp a = load_op(in1), b = load_op(in2);
      const BandPeriodicOp c = compose(a, b);
      s.emit_json(out_path, io::to_json(c), "operator");
      if (!report_path.empty()) {
        const double dist = subtract(c, BandPeriodicOp::identity(c.level(), c.dim(), c.period())).op_norm_bound();
        s.emit_json(report_path, Json{{"distance_to_identity", dist}, {"op_norm_bound", c.op_norm_bound()}}, "report");
      }
    } else if (*apply_cmd) {
      const BandPeriodicOp a = load_op(in1);
      const SeqFin x = io::seq_from_json(io::read_json_file(in2));
      s.emit_json(out_path, io::to_json(a.apply(x)), "sequence");
    } else if (*classify_cmd) {
      const Classification c = classify(load_op(in1));
      Json j{{"min_period", c.min_period},       {"zero", c.zero},
             {"min_offset", c.min_offset},       {"max_offset", c.max_offset},
             {"diagonal_shape", c.diagonal_shape}, {"is_diagonal", c.is_diagonal},
             {"probe_residual", c.probe_residual}};
      if (ribbon_k >= 0) j["ribbon"] = Json{{"k", ribbon_k}, {"n", ribbon_n}, {"holds", c.is_ribbon(ribbon_k, ribbon_n)}};
      s.emit_json(out_path, j, "classification");
    } else if (*random_cmd) {
      Rng rng(s.seed);
      BandPeriodicOp a = random_op(rng, level, d, n, K, true, norm);
      if (plus_identity) a = add(BandPeriodicOp::identity(level, d, n), a);
      s.emit_json(out_path, io::to_json(a), "operator");
    } else if (*coeffs_cmd) {
      const BlockedCoeffs c = block(load_op(op_path));
      Json cs = Json::array();
      for (const auto& [q, t] : c.t) cs.push_back(Json{{"q", q}, {"matrix", io::to_json(t)}});
      s.emit_json(out_path, Json{{"v", c.level}, {"d", c.d}, {"n", c.n}, {"coeffs", std::move(cs)}}, "coefficients");
    } else if (*symbol) {
      if (op_path.empty()) throw PreconditionError("symbol needs --op");
      const BandPeriodicOp b = load_op(op_path);
      const std::vector<CdMatrix> vals = sample_symbol(b, samples);
      Json recs = Json::array();
      for (std::size_t r = 0; r < vals.size(); ++r) {
        const double theta = 2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(samples);
        recs.push_back(Json{{"theta", theta}, {"matrix", io::to_json(vals[r])}});
      }
      s.emit_json(out_path.empty() ? "symbol.json" : out_path, Json{{"samples", std::move(recs)}}, "symbol");
    } else if (*invert) {
      s.error_report = report_path;
      const InverseReport r = wiener_invert(load_op(op_path), samples, tail);
      s.emit_json(out_path, io::to_json(r.inverse), "operator");
      if (!report_path.empty()) {
        s.emit_json(report_path,
                    Json{{"margin", r.margin},
                         {"witness", Json{{"theta", r.witness.theta}}},
                         {"residual_right", r.residual_right},
                         {"residual_left", r.residual_left},
                         {"tail_mass", r.tail_mass},
                         {"samples", r.samples},
                         {"band_q", r.band_q}},
                    "report");
      }
    } else if (*oracle_cmd) {
      const Eigenvalues e = circulant_oracle(load_op(op_path), N);
      if (s.cloud_csv(out_path)) {
        std::ostringstream os;
        write_eigen_csv(os, e);
        s.emit(out_path, os.str(), "eigenvalues");
      } else {
        s.emit_json(out_path, Json{{"N", N}, {"eigenvalues", complex_list(e)}}, "eigenvalues");
      }
    } else if (*spectrum) {
      if (op_path.empty()) throw PreconditionError("spectrum needs --op");
      const SpectrumCloud cloud = operator_spectrum(load_op(op_path), samples);
      if (s.cloud_csv(out_path)) {
        std::ostringstream os;
        write_cloud_csv(os, cloud);
        s.emit(out_path.empty() ? "cloud.csv" : out_path, os.str(), "cloud");
      } else {
        s.emit_json(out_path.empty() ? "cloud.json" : out_path, cloud_json(cloud), "cloud");
      }
    } else if (*kinvert || *kspectrum) {
      s.error_report = out_path;
      const KernelSpec spec = io::kernel_from_json(io::read_json_file(spec_path));
      CellGrid cg{spec.periods, G, rule == "midpoint" ? Quadrature::midpoint : Quadrature::trapezoid};
      std::vector<long> band;
      for (std::size_t b : parse_list(band_list, "band")) band.push_back(static_cast<long>(b));
      if (band.size() == 1 && spec.active() > 1) band.assign(spec.active(), band.front());
      const BlockedKernelOp bop = discretize(spec, cg, band, tail);
      if (*kspectrum) {
        const SpectrumCloud cloud = kernel_spectrum(bop, samples);
        if (s.cloud_csv(out_path)) {
          std::ostringstream os;
          write_cloud_csv(os, cloud);
          s.emit(out_path, os.str(), "cloud");
        } else {
          s.emit_json(out_path, cloud_json(cloud), "cloud");
        }
      } else {
        const TorusResult t = torus_invertibility(bop, samples);
        Error::Witness w;
        for (std::size_t a = 0; a < t.witness.size(); ++a) w["theta_" + std::to_string(a)] = t.witness[a];
        w["margin"] = t.margin;
        if (!t.invertible) throw IllConditionedError("symbol of I - Q is singular on the torus", w);
        Json rep{{"invertible", true},   {"margin", t.margin},         {"witness", t.witness},
                 {"samples", t.samples}, {"q_norm_bound", bop.q_norm_bound()}, {"decay", bop.decay},
                 {"block_dim", bop.block_dim()}};
        if (!inverse_path.empty()) {
          if (bop.axes() != 1) throw PreconditionError("--inverse needs exactly one active axis");
          const InverseReport inv = wiener_invert(bop.to_band_op(), std::max<std::size_t>(samples, 64), tail);
          rep["inverse"] = Json{{"residual_left", inv.residual_left}, {"residual_right", inv.residual_right},
                                {"tail_mass", inv.tail_mass}, {"band_q", inv.band_q}};
          s.emit_json(inverse_path, io::to_json(inv.inverse), "operator");
        }
        s.emit_json(out_path, rep, "report");
      }
    } else if (*localize) {
      s.error_report = out_path;
      const PeriodicSeries x = io::series_from_json(io::read_json_file(in1));
      std::vector<double> eps_list;
      if (eps > 0) {
        eps_list.push_back(eps);
      } else {
        for (int k = 1; k <= 10; ++k) eps_list.push_back(std::ldexp(1.0, -k));
      }
      Json curve = Json::array();
      const WindowResult* chosen = nullptr;
      std::vector<WindowResult> results;
      results.reserve(eps_list.size());
      for (double e : eps_list) {
        results.push_back(window_localize(x, e, n_max));
        const WindowResult& r = results.back();
        curve.push_back(Json{{"eps", r.eps},           {"rho", r.rho},         {"rho_bound", r.rho_bound},
                             {"tail_bound", r.tail_bound}, {"b0_norm", r.b0_norm}, {"q0_norm", r.q0_norm},
                             {"agreement", r.agreement}});
        if (chosen == nullptr && r.rho_bound < 1.0) chosen = &r;
      }
      if (chosen == nullptr) {
        double best = std::numeric_limits<double>::infinity(), at = 0;
        for (const auto& r : results)
          if (r.rho_bound < best) {
            best = r.rho_bound;
            at = r.eps;
          }
        throw InconclusiveError("no window with dominance ratio below 1", {{"eps", at}, {"rho_bound", best}});
      }
      PeriodicSeries kept{chosen->b.level, chosen->b.d, {}};
      for (const auto& [k, m] : chosen->b.coeffs)
        if (std::labs(k) <= static_cast<long>(keep)) kept.coeffs.emplace(k, m);
      s.emit_json(out_path,
                  Json{{"x0_norm", chosen->x0_norm},
                       {"eps", chosen->eps},
                       {"rho", chosen->rho},
                       {"rho_bound", chosen->rho_bound},
                       {"agreement", chosen->agreement},
                       {"curve", std::move(curve)},
                       {"b", io::to_json(kept)}},
                  "report");
    } else if (*icircle) {
      s.error_report = out_path;
      const CircleInverse r = circle_left_inverse(io::series_from_json(io::read_json_file(in1)), grid, tail);
      s.emit_json(out_path,
                  Json{{"inverse", io::to_json(r.inverse)},
                       {"margin", r.margin},
                       {"witness", Json{{"t", r.witness}}},
                       {"tail_mass", r.tail_mass},
                       {"residual", r.residual},
                       {"samples", r.samples}},
                  "report");
    } else if (*fejer) {
      const FejerTrend t = fejer_trend(io::line_from_json(io::read_json_file(in1)), parse_list(orders, "order"), pad);
      s.emit_json(out_path,
                  Json{{"orders", t.orders},
                       {"errors", t.errors},
                       {"envelope_c", t.envelope_c},
                       {"decreasing", t.decreasing},
                       {"within_envelope", t.within_envelope}},
                  "report");
    } else if (*density) {
      s.error_report = out_path;
      const LineFunction f = io::line_from_json(io::read_json_file(in1));
      const LineFunction g = io::line_from_json(io::read_json_file(target_path));
      const DensityResult r = translate_density_residual(f, g, delta, budget);
      Json weights = Json::array();
      for (const auto& w : r.weights) weights.push_back(io::to_json(w));
      s.emit_json(out_path,
                  Json{{"residual", r.residual},
                       {"fejer_error", r.fejer_error},
                       {"discretisation_error", r.discretisation_error},
                       {"n0", r.n0},
                       {"lattice_step", r.lattice_step},
                       {"margin", r.margin},
                       {"witness", Json{{"u", r.witness}}},
                       {"resolved", r.resolved},
                       {"budget_exhausted", r.budget_exhausted},
                       {"shifts", r.shifts},
                       {"weights", std::move(weights)}},
                  "report");
    }
  } catch (const Error& e) {
    status = e.error_class() == ErrorClass::precondition ? kPrecondition : kNumerical;
    error = io::to_json(e);
    err << "error (" << e.kind() << "): " << e.what();
    if (!e.witness().empty()) err << " " << witness_json(e.witness()).dump();
    err << "\n";
    if (!s.error_report.empty()) {
      try {
        s.emit_json(s.error_report, Json{{"error", error}}, "error");
      } catch (const std::exception&) {
      }
    }
  } catch (const fs::filesystem_error& e) {
    status = kPrecondition;
    error = Json{{"kind", "io"}, {"message", e.what()}};
    err << "error (io): " << e.what() << "\n";
  }

  try {
    Json manifest{{"tool", "cdop"},         {"command", command}, {"config", config},
                  {"exit_code", status},    {"status", status == kOk ? "ok" : "error"},
                  {"artifacts", s.artifacts}};
    if (!error.is_null()) manifest["error"] = error;
    io::write_atomic(fs::path(s.out_dir) / "manifest.json", io::dump(manifest));
  } catch (const std::exception& e) {
    err << "cannot write manifest: " << e.what() << "\n";
    if (status == kOk) status = kPrecondition;
  }
  return status;
}

}  // namespace cdop::cli
