#include "cdop/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cdop/errors.hpp"

namespace cdop {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::size_t truncation_order(double norm, double tol, std::size_t max_terms) {
  if (norm == 0.0) return 0;
  // smallest m with norm^{m+1} / (1 - norm) <= tol
  const double m = std::ceil(std::log(tol * (1.0 - norm)) / std::log(norm) - 1.0);
  return static_cast<std::size_t>(std::clamp(m, 0.0, static_cast<double>(max_terms)));
}

std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

// Sum of -A powers 0..m, with the band of each power capped.
BandPeriodicOp geometric_sum(const BandPeriodicOp& minus_a, std::size_t m, std::size_t max_band, double& dropped) {
  BandPeriodicOp sum = BandPeriodicOp::identity(minus_a.level(), minus_a.dim(), minus_a.period());
  BandPeriodicOp power = sum;
  for (std::size_t k = 1; k <= m; ++k) {
    power = compose(power, minus_a);
    if (power.band() > max_band) {
      const BandPeriodicOp cut = power.with_band(max_band);
      dropped += subtract(power, cut).op_norm_bound();
      power = cut;
    }
    sum = add(sum, power);
  }
  return sum;
}

double distance_to_identity(const BandPeriodicOp& op) {
  return subtract(op, BandPeriodicOp::identity(op.level(), op.dim(), op.period())).op_norm_bound();
}

}  // namespace

NeumannResult neumann_inverse(const BandPeriodicOp& a, double tol, std::size_t max_terms, std::size_t max_band) {
  NeumannResult r;
  r.norm_a = a.op_norm_bound();
  if (r.norm_a >= 1.0) {
    throw DivergenceError("Neumann series needs ||A|| < 1", {{"norm_bound", r.norm_a}});
  }
  r.terms = truncation_order(r.norm_a, tol, max_terms);
  r.bound = std::pow(r.norm_a, static_cast<double>(r.terms + 1)) / (1.0 - r.norm_a);
  r.inverse = geometric_sum(scale(a, -1.0), r.terms, max_band, r.truncation_mass);
  const BandPeriodicOp ipa = add(BandPeriodicOp::identity(a.level(), a.dim(), a.period()), a);
  r.residual_left = distance_to_identity(compose(r.inverse, ipa));
  r.residual_right = distance_to_identity(compose(ipa, r.inverse));
  return r;
}

PerturbedInverse perturbed_left_inverse(const BandPeriodicOp& q, const BandPeriodicOp& b, const BandPeriodicOp* a,
                                        double tol, std::size_t max_terms) {
  PerturbedInverse r;
  r.contraction = b.op_norm_bound() * q.op_norm_bound();
  if (r.contraction >= 1.0) {
    throw DivergenceError("perturbation too large: ||B|| ||Q|| >= 1", {{"contraction", r.contraction}});
  }
  r.terms = truncation_order(r.contraction, tol, max_terms);
  double dropped = 0;
  const BandPeriodicOp bq = compose(b, q);
  r.inverse = compose(q, geometric_sum(scale(bq, -1.0), r.terms, std::numeric_limits<std::size_t>::max(), dropped));
  if (a != nullptr) r.residual = distance_to_identity(compose(r.inverse, add(*a, b)));
  return r;
}

double symbol_margin(const BlockedCoeffs& c, const SymbolPoint& p) { return min_singular_value(symbol_eval(c, p)); }

InvertibilityResult invertibility_test(const BandPeriodicOp& b, std::size_t n_samples, double threshold) {
  const long Q = blocked_radius(b);
  const std::size_t need = 4 * static_cast<std::size_t>(Q + 1);
  if (n_samples < need) {
    throw PreconditionError("too few circle samples for the band", {{"n_samples", static_cast<double>(n_samples)},
                                                                    {"required", static_cast<double>(need)}});
  }
  const BlockedCoeffs c = block(b);
  InvertibilityResult r;
  r.samples = n_samples;
  const double h = kTwoPi / static_cast<double>(n_samples);
  std::size_t arg = 0;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double s = symbol_margin(c, SymbolPoint::at(h * static_cast<double>(k)));
    if (s < r.margin) {
      r.margin = s;
      arg = k;
    }
  }
  double best_t = h * static_cast<double>(arg);
  // Golden-section refinement on the two neighbouring cells.
  double lo = best_t - h, hi = best_t + h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = symbol_margin(c, SymbolPoint::at(x1)), f2 = symbol_margin(c, SymbolPoint::at(x2));
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = symbol_margin(c, SymbolPoint::at(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = symbol_margin(c, SymbolPoint::at(x2));
    }
  }
  const double t_ref = f1 < f2 ? x1 : x2;
  const double f_ref = std::min(f1, f2);
  if (f_ref < r.margin) {
    r.margin = f_ref;
    best_t = t_ref;
  }
  best_t = std::fmod(best_t, kTwoPi);
  if (best_t < 0) best_t += kTwoPi;
  r.witness = SymbolPoint::at(best_t);
  r.invertible = r.margin > threshold;
  return r;
}

InverseReport wiener_invert(const BandPeriodicOp& b, std::size_t n_samples, double tail_tol, double threshold,
                            std::size_t max_samples) {
  const long Q = blocked_radius(b);
  std::size_t N = next_pow2(std::max<std::size_t>(n_samples, 4 * static_cast<std::size_t>(Q + 1)));
  const InvertibilityResult test = invertibility_test(b, N, threshold);
  if (!test.invertible) {
    throw IllConditionedError("symbol is (numerically) singular on the circle",
                              {{"theta", test.witness.theta}, {"margin", test.margin}});
  }
  const BlockedCoeffs c = block(b);
  std::map<long, CdMatrix> coeffs;
  std::map<long, double> norms;
  for (;;) {
    std::vector<CdMatrix> psi;
    psi.reserve(N);
    for (std::size_t r = 0; r < N; ++r) {
      psi.push_back(inverse(symbol_eval(c, SymbolPoint::at(kTwoPi * static_cast<double>(r) / static_cast<double>(N))), 0.0));
    }
    coeffs = fourier_coeffs(psi);
    norms.clear();
    double edge = 0;
    for (const auto& [k, m] : coeffs) {
      const double nk = m.op_norm_bound();
      norms[k] = nk;
      if (4 * static_cast<std::size_t>(std::labs(k)) > N) edge += nk;
    }
    if (edge <= tail_tol) break;
    N *= 2;
    if (N > max_samples) {
      throw ResourceError("inverse coefficients do not decay within the band budget",
                          {{"edge_mass", edge}, {"samples", static_cast<double>(N / 2)}});
    }
  }
  // Smallest radius whose dropped mass stays under tail_tol.
  long q_out = static_cast<long>(N / 2);
  double dropped = 0;
  while (q_out > 0) {
    double ring = 0;
    for (long s : {-q_out, q_out}) {
      const auto it = norms.find(s);
      if (it != norms.end()) ring += it->second;
    }
    if (dropped + ring > tail_tol) break;
    dropped += ring;
    --q_out;
  }
  BlockedCoeffs kept;
  kept.n = c.n;
  kept.d = c.d;
  kept.level = c.level;
  for (const auto& [k, m] : coeffs)
    if (std::labs(k) <= q_out) kept.t.emplace(k, m);

  InverseReport r;
  r.inverse = reconstruct(kept);
  r.tail_mass = dropped;
  r.margin = test.margin;
  r.witness = test.witness;
  r.samples = N;
  r.band_q = q_out;
  r.residual_right = distance_to_identity(compose(b, r.inverse));
  r.residual_left = distance_to_identity(compose(r.inverse, b));
  return r;
}

LimitInverse left_inverse_limit(const std::vector<BandPeriodicOp>& x_seq, const std::vector<BandPeriodicOp>& y_seq,
                                const BandPeriodicOp& x, double tol) {
  if (x_seq.empty() || x_seq.size() != y_seq.size()) throw DimensionError("x and y sequences must be non-empty and aligned");
  double sup_y = 0;
  for (const auto& y : y_seq) sup_y = std::max(sup_y, y.op_norm_bound());
  if (!std::isfinite(sup_y)) throw PreconditionError("left inverses are not uniformly bounded");

  std::size_t best = 0;
  double best_c = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x_seq.size(); ++k) {
    const double c = y_seq[k].op_norm_bound() * subtract(x_seq[k], x).op_norm_bound();
    if (c < best_c) {
      best_c = c;
      best = k;
    }
  }
  if (!(best_c < 1.0)) {
    throw InconclusiveError("no index with ||y_n|| ||x_n - x|| < 1", {{"best_contraction", best_c}, {"sup_y", sup_y}});
  }
  const BandPeriodicOp& y = y_seq[best];
  const BandPeriodicOp yx = compose(y, x);
  const BandPeriodicOp a = subtract(yx, BandPeriodicOp::identity(x.level(), x.dim(), yx.period()));
  LimitInverse r;
  r.index = best;
  r.contraction = best_c;
  if (a.op_norm_bound() == 0.0) {
    r.inverse = y;
  } else {
    r.inverse = compose(neumann_inverse(a, tol).inverse, y);
  }
  r.residual = distance_to_identity(compose(r.inverse, x));
  return r;
}

}  // namespace cdop
