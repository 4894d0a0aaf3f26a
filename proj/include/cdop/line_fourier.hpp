#ifndef CDOP_LINE_FOURIER_HPP
#define CDOP_LINE_FOURIER_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "cdop/cd_matrix.hpp"

namespace cdop {

/// x(t) = sum_n a_n e^{nt𝐢} with d x d coefficients.
struct PeriodicSeries {
  int level = 2;
  std::size_t d = 1;
  std::map<long, CdMatrix> coeffs;

  CdMatrix eval(double t) const;
  /// sum_n ||a_n||.
  double sum_norm() const;
  long max_abs_index() const;
};

/// Coefficients of the trapezoid window: 1 on [-ε, ε], linear down to 0 at
/// ±2ε, 0 beyond.
double window_coeff(double eps, long n);
/// sum_m window_coeff(eps, m) e^{imt}, summed exactly.
double window_value(double eps, double t);

struct WindowResult {
  double eps = 0;
  PeriodicSeries b;         ///< b_n for |n| <= n_max
  double b0_norm = 0;
  double x0_norm = 0;       ///< ||x(0)|| (= ||y(0)||)
  double q0_norm = 0;       ///< ||b_0^{-1}||
  double rho = 0;           ///< ||q_0|| sum_{1<=n<=n_max} ||b_n + b_{-n}||
  double tail_bound = 0;    ///< bound on sum_{|n|>n_max} ||b_n||
  double rho_bound = 0;     ///< rho + ||q_0|| tail_bound
  double agreement = 0;     ///< sup over samples in (-ε, ε) of ||y(t) - x(t)||
};

/// y_ε = w_ε x + (1 - w_ε) x(0): b_n = sum_k w_{n-k} a_k + (δ_{n0} - w_n) x(0).
/// Requires 0 < ε <= π/2 and x(0) invertible.
WindowResult window_localize(const PeriodicSeries& x, double eps, long n_max = 4096, std::size_t samples = 257);

/// y(t) = x(t)W(t) + x(0)(1 - W(t)) with W summed in closed form.
CdMatrix window_series_value(const PeriodicSeries& x, double eps, double t);

struct CircleInverse {
  PeriodicSeries inverse;
  double margin = 0;          ///< min over the circle of sigma_min(x(t))
  double witness = 0;         ///< t of the minimum
  double tail_mass = 0;       ///< dropped coefficient mass
  double residual = 0;        ///< sup over off-grid samples of ||y(t)x(t) - I||
  std::size_t samples = 0;
};

/// Pointwise inversion on a grid of `grid` points, transformed back; the
/// grid doubles until the coefficients near the Nyquist index are below
/// tail_tol.
CircleInverse circle_left_inverse(const PeriodicSeries& x, std::size_t grid = 64, double tail_tol = 1e-12,
                                  double threshold = 1e-8, std::size_t max_grid = 1 << 15);

/// Functions on the line sampled at t0 + i h, i = 0..size-1, zero outside.
struct LineFunction {
  int level = 2;
  std::size_t d = 1;
  double t0 = 0;
  double h = 1;
  std::vector<CdMatrix> values;

  std::size_t size() const noexcept { return values.size(); }
  double t(std::size_t i) const { return t0 + static_cast<double>(i) * h; }
  /// Trapezoid estimate of ∫||f||.
  double l1_norm() const;

  static LineFunction sample(int level, std::size_t d, double t0, double h, std::size_t count,
                             const std::function<CdMatrix(double)>& f);
};

/// ∫||f - g|| for two functions on the same lattice (supports may differ).
double l1_distance(const LineFunction& f, const LineFunction& g);

struct FejerResult {
  LineFunction smoothed;  ///< on the padded window
  double l1_error = 0;    ///< ∫||f - smoothed||
  std::size_t n = 0;
};

/// (1/πn) ∫ f(t + τ) sin²(nτ)/τ² dτ, applied as the multiplier (1 - |ξ|/2n)_+
/// on a periodic window `pad` times the support length.
FejerResult fejer_smooth(const LineFunction& f, std::size_t n, std::size_t pad = 64);

struct FejerTrend {
  std::vector<std::size_t> orders;
  std::vector<double> errors;
  double envelope_c = 0;        ///< C fitted on the smallest order
  bool decreasing = false;      ///< strictly
  bool within_envelope = false; ///< errors <= C n^{-1/2} ln n at every order
};

/// Smoothing errors over increasing orders, with C·n^{-1/2}·ln n anchored at
/// the first order (orders must be >= 2).
FejerTrend fejer_trend(const LineFunction& f, const std::vector<std::size_t>& orders, std::size_t pad = 16);

/// ∫||f(t + kh) - f(t)|| dt.
double translation_modulus(const LineFunction& f, long k);

struct FubiniCheck {
  double lhs = 0;  ///< ∫||f(t)∫h - ∫f(t + τ)h(τ)dτ|| dt
  double rhs = 0;  ///< (∫||h||) sup_{|u|<=ε} ∫||f(t + u) - f(t)|| dt
};
/// h must live on the same step with support inside [-ε, ε].
FubiniCheck fubini_bound_check(const LineFunction& f, const LineFunction& h, double eps);

enum class SupportFamily { zero, bump, hat, indicator };

/// x(τ) = amplitude e^{kτ𝐢} p((τ - center)/radius) with p a C^∞ bump, a hat
/// (1 - |u|)_+ or the indicator of [-1, 1].
struct CompactProfile {
  SupportFamily family = SupportFamily::bump;
  double center = 0;
  double radius = 1;
  long mode = 0;
  CdMatrix amplitude;
};

struct IntegrabilityReport {
  std::vector<double> sum_partial;       ///< sum_{|n|<=N} ||a_n|| at N_max/4, N_max/2, N_max
  std::vector<double> integral_partial;  ///< ∫_{-T}^{T} ||f|| at the same T = N
  double sum_ratio = 0;                  ///< ratio of successive increments
  double integral_ratio = 0;
  double sum_tail = 0;                   ///< geometric extrapolation of the remaining mass
  double integral_tail = 0;
  bool sum_converges = false;
  bool integral_converges = false;
  std::map<long, double> coeff_norms;    ///< ||a_n||
  std::vector<double> t;                 ///< f sample points (step 1/8)
  std::vector<double> f_norm;            ///< ||f(t)||
};

/// f(t) = (1/2π)∫x(τ)e^{-τt𝐢}dτ and a_n = f(n). The support must sit inside
/// (-π, π).
IntegrabilityReport coeff_integrability(const CompactProfile& x, long n_max = 4096, double ratio_cut = 0.75);

/// Scalar factor of f at t for a profile (f = factor · amplitude).
std::complex<double> profile_transform(const CompactProfile& x, double t);

struct DensityResult {
  double residual = 0;            ///< ∫||g - sum_k f(t + τ_k) b_k||
  double fejer_error = 0;         ///< ∫||g - g_δ||
  double discretisation_error = 0;  ///< ∫||g_δ - sum_k f(t + τ_k) b_k||
  std::size_t n0 = 0;             ///< Fejér order
  double lattice_step = 0;        ///< spacing of the shifts
  std::vector<double> shifts;     ///< τ_k
  std::vector<CdMatrix> weights;  ///< b_k
  double margin = 0;              ///< min sigma_min of f's transform on the band
  double witness = 0;
  bool resolved = true;           ///< lattice resolves the band |u| < 2n0
  bool budget_exhausted = false;  ///< residual above 2δ
};

/// Approximates g by right-weighted lattice translates of f:
/// g ≈ g_δ = ∫ f(t + x) Φ(x) dx ≈ sum_k f(t + kλ) λΦ(kλ), λ ≈ 1/m, k ∈ [-m², m²).
/// Φ̌(u) = x_f(u)^{-1}(1 - |u|/2n0)_+ x_g(u), x_f(u) = ∫ f(t) e^{ut𝐢} dt.
DensityResult translate_density_residual(const LineFunction& f, const LineFunction& g, double delta, std::size_t m,
                                         double threshold = 1e-8);

/// Transform x_f(u) = ∫ f(t) e^{ut𝐢} dt by trapezoid quadrature.
CdMatrix line_transform(const LineFunction& f, double u);

}  // namespace cdop

#endif  // CDOP_LINE_FOURIER_HPP
