#include "cdop/line_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "cdop/errors.hpp"
#include "cdop/symbol.hpp"

namespace cdop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Σ_{m>=1} cos(mx)/m².
double clausen_cos2(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  return kPi * kPi / 6.0 - kPi * y / 2.0 + y * y / 4.0;
}

// Entry coordinates re_c + 𝐢 im_c as complex numbers c = 0..2^v-1, entry-major.
Eigen::VectorXcd complex_coords(const CdMatrix& a) {
  const std::size_t half = a.entry_size() / 2;
  Eigen::VectorXcd z(static_cast<Eigen::Index>(a.rows() * a.cols() * half));
  Eigen::Index k = 0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const auto e = a.raw(r, c);
      for (std::size_t j = 0; j < half; ++j) z(k++) = {e[j], e[half + j]};
    }
  return z;
}

CdMatrix from_complex_coords(const Eigen::Ref<const Eigen::VectorXcd>& z, int level, std::size_t rows, std::size_t cols) {
  CdMatrix a(level, rows, cols);
  const std::size_t half = a.entry_size() / 2;
  Eigen::Index k = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      auto e = a.raw(r, c);
      for (std::size_t j = 0; j < half; ++j, ++k) {
        e[j] = z(k).real();
        e[half + j] = z(k).imag();
      }
    }
  return a;
}

// Integer offset of g's origin on f's lattice.
long lattice_offset(const LineFunction& f, const LineFunction& g) {
  if (f.level != g.level || f.d != g.d) throw DimensionError("line functions differ in level or fibre size");
  if (!(f.h > 0) || std::abs(f.h - g.h) > 1e-12 * f.h) {
    throw AlignmentError("line functions use different steps", {{"h_f", f.h}, {"h_g", g.h}});
  }
  const double off = (g.t0 - f.t0) / f.h;
  const double k = std::round(off);
  if (std::abs(off - k) > 1e-9) throw AlignmentError("line function origins are off the common lattice", {{"offset", off}});
  return static_cast<long>(k);
}

CdMatrix value_at(const LineFunction& f, long i) {
  if (i < 0 || i >= static_cast<long>(f.size())) return CdMatrix(f.level, f.d, f.d);
  return f.values[static_cast<std::size_t>(i)];
}

double norm(const CdMatrix& a) { return a.op_norm_bound(); }

void check_fibres(const LineFunction& f) {
  if (f.values.empty()) throw DimensionError("line function has no samples");
  if (!(f.h > 0)) throw DomainError("line function step must be positive", {{"h", f.h}});
  for (const auto& v : f.values)
    if (v.level() != f.level || v.rows() != f.d || v.cols() != f.d) throw DimensionError("sample has the wrong shape");
}

}  // namespace

// ------------------------------------------------------------ periodic series

CdMatrix PeriodicSeries::eval(double t) const {
  CdMatrix out(level, d, d);
  for (const auto& [n, a] : coeffs) out += std::polar(1.0, static_cast<double>(n) * t) * a;
  return out;
}

double PeriodicSeries::sum_norm() const {
  double s = 0;
  for (const auto& [n, a] : coeffs) s += norm(a);
  return s;
}

long PeriodicSeries::max_abs_index() const {
  long k = 0;
  for (const auto& [n, a] : coeffs) k = std::max(k, std::labs(n));
  return k;
}

// --------------------------------------------------------------------- window

double window_coeff(double eps, long n) {
  if (n == 0) return 3.0 * eps / kTwoPi;
  const double dn = static_cast<double>(n);
  return (std::cos(eps * dn) - std::cos(2.0 * eps * dn)) / (kPi * eps * dn * dn);
}

double window_value(double eps, double t) {
  return window_coeff(eps, 0) + (clausen_cos2(t + eps) + clausen_cos2(t - eps) - clausen_cos2(t + 2 * eps) -
                                 clausen_cos2(t - 2 * eps)) /
                                    (kPi * eps);
}

CdMatrix window_series_value(const PeriodicSeries& x, double eps, double t) {
  const double w = window_value(eps, t);
  return w * x.eval(t) + (1.0 - w) * x.eval(0.0);
}

WindowResult window_localize(const PeriodicSeries& x, double eps, long n_max, std::size_t samples) {
  if (x.coeffs.empty()) throw DimensionError("series has no coefficients");
  if (!(eps > 0) || eps > kPi / 2) throw DomainError("window half-width must lie in (0, π/2]", {{"eps", eps}});
  const long kmax = x.max_abs_index();
  if (n_max <= kmax + 1) {
    throw PreconditionError("coefficient budget below the series degree",
                            {{"n_max", static_cast<double>(n_max)}, {"degree", static_cast<double>(kmax)}});
  }
  const CdMatrix x0 = x.eval(0.0);
  WindowResult r;
  r.eps = eps;
  r.x0_norm = norm(x0);
  if (min_singular_value(x0) <= 1e-14) {
    throw PreconditionError("x(0) is not invertible", {{"sigma_min", min_singular_value(x0)}});
  }
  r.b.level = x.level;
  r.b.d = x.d;
  for (long n = -n_max; n <= n_max; ++n) {
    CdMatrix bn = (n == 0 ? 1.0 : 0.0) * x0 - window_coeff(eps, n) * x0;
    for (const auto& [k, a] : x.coeffs) bn += window_coeff(eps, n - k) * a;
    r.b.coeffs.emplace(n, std::move(bn));
  }
  const CdMatrix& b0 = r.b.coeffs.at(0);
  r.b0_norm = norm(b0);
  r.q0_norm = norm(inverse(b0));
  double s = 0;
  for (long n = 1; n <= n_max; ++n) s += norm(r.b.coeffs.at(n) + r.b.coeffs.at(-n));
  r.rho = r.q0_norm * s;
  const double dn = static_cast<double>(n_max);
  r.tail_bound = 4.0 / (kPi * eps) * (x.sum_norm() / (dn - static_cast<double>(kmax) - 1.0) + r.x0_norm / dn);
  r.rho_bound = r.rho + r.q0_norm * r.tail_bound;
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = -eps + 2.0 * eps * (static_cast<double>(j) + 0.5) / static_cast<double>(samples);
    r.agreement = std::max(r.agreement, norm(window_series_value(x, eps, t) - x.eval(t)));
  }
  return r;
}

// ------------------------------------------------------------- circle inverse

CircleInverse circle_left_inverse(const PeriodicSeries& x, std::size_t grid, double tail_tol, double threshold,
                                  std::size_t max_grid) {
  if (x.coeffs.empty()) throw DimensionError("series has no coefficients");
  const long kmax = x.max_abs_index();
  std::size_t N = next_pow2(std::max<std::size_t>(grid, 4 * static_cast<std::size_t>(kmax + 1)));

  CircleInverse r;
  {
    const double h = kTwoPi / static_cast<double>(N);
    std::size_t arg = 0;
    r.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < N; ++k) {
      const double s = min_singular_value(x.eval(h * static_cast<double>(k)));
      if (s < r.margin) {
        r.margin = s;
        arg = k;
      }
    }
    const double t = h * static_cast<double>(arg);
    const auto [tm, sm] = golden_min([&](double u) { return min_singular_value(x.eval(u)); }, t - h, t + h);
    if (sm < r.margin) {
      r.margin = sm;
      r.witness = std::fmod(tm + kTwoPi, kTwoPi);
    } else {
      r.witness = t;
    }
  }
  if (r.margin <= threshold) {
    throw IllConditionedError("x(t) is singular on the circle", {{"t", r.witness}, {"margin", r.margin}});
  }

  std::map<long, CdMatrix> coeffs;
  std::map<long, double> norms;
  for (;;) {
    std::vector<CdMatrix> psi;
    psi.reserve(N);
    for (std::size_t k = 0; k < N; ++k) psi.push_back(inverse(x.eval(kTwoPi * static_cast<double>(k) / static_cast<double>(N)), 0.0));
    coeffs = fourier_coeffs(psi);
    norms.clear();
    double edge = 0;
    for (const auto& [k, m] : coeffs) {
      norms[k] = norm(m);
      if (4 * static_cast<std::size_t>(std::labs(k)) > N) edge += norms[k];
    }
    if (edge <= tail_tol) break;
    N *= 2;
    if (N > max_grid) {
      throw ResourceError("inverse coefficients do not decay within the grid budget",
                          {{"edge_mass", edge}, {"grid", static_cast<double>(N / 2)}});
    }
  }
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
  r.inverse.level = x.level;
  r.inverse.d = x.d;
  for (auto& [k, m] : coeffs)
    if (std::labs(k) <= q_out) r.inverse.coeffs.emplace(k, std::move(m));
  r.tail_mass = dropped;
  r.samples = N;
  const CdMatrix id = CdMatrix::identity(x.level, x.d);
  const std::size_t probes = 97;
  for (std::size_t j = 0; j < probes; ++j) {
    const double t = kTwoPi * (static_cast<double>(j) + 0.37) / static_cast<double>(probes);
    r.residual = std::max(r.residual, norm(r.inverse.eval(t) * x.eval(t) - id));
  }
  return r;
}

// -------------------------------------------------------------- line functions

double LineFunction::l1_norm() const {
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
    s += w * norm(values[i]);
  }
  return s * h;
}

LineFunction LineFunction::sample(int level, std::size_t d, double t0, double h, std::size_t count,
                                  const std::function<CdMatrix(double)>& f) {
  LineFunction out{level, d, t0, h, {}};
  out.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.values.push_back(f(out.t(i)));
  check_fibres(out);
  return out;
}

double l1_distance(const LineFunction& f, const LineFunction& g) {
  const long off = lattice_offset(f, g);
  const long lo = std::min(0L, off);
  const long hi = std::max(static_cast<long>(f.size()), off + static_cast<long>(g.size()));
  double s = 0;
  for (long i = lo; i < hi; ++i) {
    const double w = (i == lo || i + 1 == hi) ? 0.5 : 1.0;
    s += w * norm(value_at(f, i) - value_at(g, i - off));
  }
  return s * f.h;
}

FejerResult fejer_smooth(const LineFunction& f, std::size_t n, std::size_t pad) {
  check_fibres(f);
  if (n == 0) throw DomainError("Fejér order must be positive");
  const std::size_t M = f.size();
  const std::size_t L = next_pow2(std::max<std::size_t>(pad, 2) * M);
  const std::size_t off = (L - M) / 2;
  const std::size_t C = f.d * f.d * (std::size_t{1} << f.level);

  Eigen::MatrixXcd data = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(C));
  for (std::size_t i = 0; i < M; ++i) data.row(static_cast<Eigen::Index>(off + i)) = complex_coords(f.values[i]).transpose();

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> col(L), spec(L), back(L);
  const double two_n = 2.0 * static_cast<double>(n);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < L; ++i) col[i] = data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    fft.fwd(spec, col);
    for (std::size_t k = 0; k < L; ++k) {
      const long kk = k <= L / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(L);
      const double xi = kTwoPi * static_cast<double>(kk) / (static_cast<double>(L) * f.h);
      spec[k] *= std::max(0.0, 1.0 - std::abs(xi) / two_n);
    }
    fft.inv(back, spec);
    for (std::size_t i = 0; i < L; ++i) data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = back[i];
  }

  FejerResult r;
  r.n = n;
  r.smoothed = LineFunction{f.level, f.d, f.t0 - static_cast<double>(off) * f.h, f.h, {}};
  r.smoothed.values.reserve(L);
  for (std::size_t i = 0; i < L; ++i)
    r.smoothed.values.push_back(from_complex_coords(data.row(static_cast<Eigen::Index>(i)).transpose(), f.level, f.d, f.d));
  r.l1_error = l1_distance(f, r.smoothed);
  return r;
}

FejerTrend fejer_trend(const LineFunction& f, const std::vector<std::size_t>& orders, std::size_t pad) {
  if (orders.empty()) throw DomainError("no Fejér orders given");
  FejerTrend r;
  r.orders = orders;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k] < 2 || (k > 0 && orders[k] <= orders[k - 1])) {
      throw DomainError("Fejér orders must be increasing and at least 2", {{"order", static_cast<double>(orders[k])}});
    }
    r.errors.push_back(fejer_smooth(f, orders[k], pad).l1_error);
  }
  auto env = [](std::size_t n) { return std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n)); };
  r.envelope_c = r.errors[0] / env(orders[0]);
  r.decreasing = true;
  r.within_envelope = true;
  for (std::size_t k = 1; k < orders.size(); ++k) {
    if (!(r.errors[k] < r.errors[k - 1])) r.decreasing = false;
    if (r.errors[k] > r.envelope_c * env(orders[k]) * (1 + 1e-12)) r.within_envelope = false;
  }
  return r;
}

double translation_modulus(const LineFunction& f, long k) {
  check_fibres(f);
  const long M = static_cast<long>(f.size());
  const long lo = std::min(0L, -k), hi = std::max(M, M - k);
  double s = 0;
  for (long i = lo; i < hi; ++i) s += norm(value_at(f, i + k) - value_at(f, i));
  return s * f.h;
}

FubiniCheck fubini_bound_check(const LineFunction& f, const LineFunction& h, double eps) {
  check_fibres(f);
  check_fibres(h);
  (void)lattice_offset(f, h);
  // Sample j of h is the shift τ_j = h.t(j) = (o0 + j) steps.
  const long o0 = static_cast<long>(std::round(h.t0 / f.h));
  if (std::abs(h.t0 / f.h - static_cast<double>(o0)) > 1e-9) {
    throw AlignmentError("kernel lattice does not contain τ = 0", {{"t0", h.t0}});
  }
  CdMatrix total(f.level, f.d, f.d);
  double h_mass = 0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double nj = norm(h.values[j]);
    if (nj > 0 && std::abs(h.t(j)) > eps + 1e-12 * std::max(1.0, eps)) {
      throw PreconditionError("kernel support exceeds [-ε, ε]", {{"tau", h.t(j)}, {"eps", eps}});
    }
    total += f.h * h.values[j];
    h_mass += f.h * nj;
  }
  const long M = static_cast<long>(f.size());
  const long jmin = o0, jmax = o0 + static_cast<long>(h.size()) - 1;
  FubiniCheck r;
  for (long i = -jmax; i < M - jmin; ++i) {
    CdMatrix conv(f.level, f.d, f.d);
    for (std::size_t j = 0; j < h.size(); ++j) {
      const long src = i + o0 + static_cast<long>(j);
      if (src < 0 || src >= M) continue;
      CdMatrix::mul_acc(f.values[static_cast<std::size_t>(src)], h.values[j], conv, f.h);
    }
    CdMatrix lhs = value_at(f, i) * total;
    lhs -= conv;
    r.lhs += f.h * norm(lhs);
  }
  const long kmax = static_cast<long>(std::floor(eps / f.h + 1e-9));
  double sup = 0;
  for (long k = -kmax; k <= kmax; ++k) sup = std::max(sup, translation_modulus(f, k));
  r.rhs = h_mass * sup;
  return r;
}

// ------------------------------------------------------ coefficient integrability

namespace {

double bump(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

// P(ω) = ∫ p(u) e^{-iωu} du for the hat and the indicator (real, even).
double closed_form(SupportFamily fam, double w) {
  switch (fam) {
    case SupportFamily::indicator:
      return std::abs(w) < 1e-8 ? 2.0 - w * w / 3.0 : 2.0 * std::sin(w) / w;
    case SupportFamily::hat: {
      if (std::abs(w) < 1e-6) return 1.0 - w * w / 12.0;
      const double s = std::sin(w / 2.0);
      return 4.0 * s * s / (w * w);
    }
    default:
      return 0.0;
  }
}

// Bump transform by trapezoid quadrature (spectrally accurate for a C^∞ profile).
double bump_transform(double w) {
  constexpr int n = 4096;
  const double hu = 2.0 / n;
  double s = 0;
  for (int k = 1; k < n; ++k) {
    const double u = -1.0 + k * hu;
    s += bump(u) * std::cos(w * u);
  }
  return s * hu;
}

void check_profile(const CompactProfile& x) {
  if (x.family == SupportFamily::zero) return;
  if (!(x.radius > 0)) throw DomainError("profile radius must be positive", {{"radius", x.radius}});
  if (x.center - x.radius <= -kPi || x.center + x.radius >= kPi) {
    throw PreconditionError("support is not inside (-π, π)",
                            {{"lo", x.center - x.radius}, {"hi", x.center + x.radius}});
  }
}

}  // namespace

std::complex<double> profile_transform(const CompactProfile& x, double t) {
  check_profile(x);
  if (x.family == SupportFamily::zero) return 0.0;
  const double s = t - static_cast<double>(x.mode);
  const double w = x.radius * s;
  const double p = x.family == SupportFamily::bump ? bump_transform(w) : closed_form(x.family, w);
  return x.radius / kTwoPi * std::polar(1.0, -x.center * s) * p;
}

IntegrabilityReport coeff_integrability(const CompactProfile& x, long n_max, double ratio_cut) {
  check_profile(x);
  if (n_max < 8 || n_max % 4 != 0) throw DomainError("n_max must be a positive multiple of 4, at least 8");
  const double amp = x.family == SupportFamily::zero ? 0.0 : x.amplitude.op_norm_bound();
  // |P(r s)| on s = j/8, |j| <= J.
  const long J = 8 * (n_max + std::labs(x.mode));
  std::vector<double> P(static_cast<std::size_t>(2 * J + 1), 0.0);
  if (x.family == SupportFamily::bump) {
    // P(r j/8) = hu Σ_m p(u_m) e^{-i r j hu m / 8}; hu = 16π/(rL) turns it into a DFT.
    const std::size_t L = next_pow2(std::max<std::size_t>(std::size_t{1} << 20, static_cast<std::size_t>(4 * J)));
    const double hu = 16.0 * kPi / (x.radius * static_cast<double>(L));
    std::vector<std::complex<double>> in(L, 0.0), out(L);
    const long mmax = static_cast<long>(1.0 / hu);
    for (long m = -mmax; m <= mmax; ++m) {
      const std::size_t idx = m >= 0 ? static_cast<std::size_t>(m) : L - static_cast<std::size_t>(-m);
      in[idx] = bump(static_cast<double>(m) * hu);
    }
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    for (long j = -J; j <= J; ++j) {
      const std::size_t idx = j >= 0 ? static_cast<std::size_t>(j) : L - static_cast<std::size_t>(-j);
      P[static_cast<std::size_t>(j + J)] = std::abs(out[idx].real()) * hu;
    }
  } else if (x.family != SupportFamily::zero) {
    for (long j = -J; j <= J; ++j)
      P[static_cast<std::size_t>(j + J)] = std::abs(closed_form(x.family, x.radius * static_cast<double>(j) / 8.0));
  }
  // ||f(t)|| = (r/2π)|P(r(t - k))| ||amplitude||, the phase being a central unit scalar.
  auto f_norm = [&](long j8) {  // t = j8 / 8
    const long s = j8 - 8 * x.mode;
    return x.radius / kTwoPi * P[static_cast<std::size_t>(s + J)] * amp;
  };

  IntegrabilityReport r;
  for (long n = -n_max; n <= n_max; ++n) r.coeff_norms[n] = f_norm(8 * n);
  r.t.reserve(static_cast<std::size_t>(16 * n_max + 1));
  for (long j = -8 * n_max; j <= 8 * n_max; ++j) {
    r.t.push_back(static_cast<double>(j) / 8.0);
    r.f_norm.push_back(f_norm(j));
  }
  for (long N : {n_max / 4, n_max / 2, n_max}) {
    double s = 0;
    for (long n = -N; n <= N; ++n) s += r.coeff_norms[n];
    r.sum_partial.push_back(s);
    double integral = 0;
    for (long j = -8 * N; j <= 8 * N; ++j) integral += (std::labs(j) == 8 * N ? 0.5 : 1.0) * f_norm(j);
    r.integral_partial.push_back(integral / 8.0);
  }
  auto judge = [&](const std::vector<double>& p, double& ratio, double& tail) {
    const double d1 = p[1] - p[0], d2 = p[2] - p[1];
    const double floor = 1e-12 * std::max(p[2], 1e-300);
    ratio = d1 > 0 ? d2 / d1 : 0.0;
    if (d2 <= floor) {
      tail = std::max(d2, 0.0);
      return true;
    }
    if (ratio <= ratio_cut) {
      tail = d2 * ratio / (1.0 - ratio);
      return true;
    }
    tail = std::numeric_limits<double>::infinity();
    return false;
  };
  r.sum_converges = judge(r.sum_partial, r.sum_ratio, r.sum_tail);
  r.integral_converges = judge(r.integral_partial, r.integral_ratio, r.integral_tail);
  return r;
}

// ------------------------------------------------------------------- density

CdMatrix line_transform(const LineFunction& f, double u) {
  check_fibres(f);
  CdMatrix out(f.level, f.d, f.d);
  for (std::size_t i = 0; i < f.size(); ++i) out += std::polar(f.h, u * f.t(i)) * f.values[i];
  return out;
}

DensityResult translate_density_residual(const LineFunction& f, const LineFunction& g, double delta, std::size_t m,
                                         double threshold) {
  check_fibres(f);
  check_fibres(g);
  (void)lattice_offset(f, g);
  if (!(delta > 0)) throw DomainError("δ must be positive", {{"delta", delta}});
  if (m == 0) throw DomainError("lattice budget must be positive");

  DensityResult r;
  const double f_mass = f.l1_norm();
  if (l1_distance(f, g) <= 1e-14 * std::max(f_mass, 1e-300)) {
    r.residual = l1_distance(f, g);
    r.lattice_step = f.h;
    r.shifts = {0.0};
    r.weights = {CdMatrix::identity(f.level, f.d)};
    r.margin = std::numeric_limits<double>::quiet_NaN();
    return r;
  }

  // Fejér regularisation of the target.
  FejerResult reg;
  for (std::size_t n = 1;; n *= 2) {
    reg = fejer_smooth(g, n);
    r.n0 = n;
    r.fejer_error = reg.l1_error;
    if (r.fejer_error < delta || n >= 4096) break;
  }
  const double B = 2.0 * static_cast<double>(r.n0);

  const std::size_t q = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / (static_cast<double>(m) * f.h))));
  const double lambda = static_cast<double>(q) * f.h;
  r.lattice_step = lambda;
  const std::size_t L = next_pow2(std::max<std::size_t>(256, 4 * m * m));
  const double du = kTwoPi / (static_cast<double>(L) * lambda);
  const long lmax = static_cast<long>(L / 2) - 1;
  const long lband = std::min(lmax, static_cast<long>(std::ceil(B / du)));
  r.resolved = B < kPi / lambda;
  const long lmargin = std::min(lmax, static_cast<long>(std::ceil(std::max(kPi, B) / du)));

  // Transforms of f and g on |u_l| <= lmargin·du by direct quadrature.
  const long U = 2 * lmargin + 1;
  auto transform_rows = [&](const LineFunction& fn, double t_origin) {
    const Eigen::Index M = static_cast<Eigen::Index>(fn.size());
    Eigen::MatrixXcd F(M, 0);
    for (Eigen::Index i = 0; i < M; ++i) {
      const Eigen::VectorXcd z = complex_coords(fn.values[static_cast<std::size_t>(i)]);
      if (F.cols() == 0) F.resize(M, z.size());
      F.row(i) = z.transpose();
    }
    Eigen::MatrixXcd E(U, M);
    for (long l = -lmargin; l <= lmargin; ++l)
      for (Eigen::Index i = 0; i < M; ++i)
        E(l + lmargin, i) = std::polar(fn.h, static_cast<double>(l) * du * (t_origin + static_cast<double>(i) * fn.h));
    return Eigen::MatrixXcd(E * F);
  };
  const Eigen::MatrixXcd XF = transform_rows(f, f.t0);
  const Eigen::MatrixXcd XG = transform_rows(g, g.t0);

  r.margin = std::numeric_limits<double>::infinity();
  std::vector<CdMatrix> xf(static_cast<std::size_t>(U));
  for (long l = -lmargin; l <= lmargin; ++l) {
    xf[static_cast<std::size_t>(l + lmargin)] = from_complex_coords(XF.row(l + lmargin).transpose(), f.level, f.d, f.d);
    const double s = min_singular_value(xf[static_cast<std::size_t>(l + lmargin)]);
    if (s < r.margin) {
      r.margin = s;
      r.witness = static_cast<double>(l) * du;
    }
  }
  if (r.margin <= threshold) {
    throw IllConditionedError("transform of f is singular on the band", {{"u", r.witness}, {"margin", r.margin}});
  }

  // Φ̌ on the band, then Φ(jλ) by inverse DFT.
  const std::size_t C = static_cast<std::size_t>(XF.cols());
  Eigen::MatrixXcd spec = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(C));
  for (long l = -lband; l <= lband; ++l) {
    const double u = static_cast<double>(l) * du;
    const double fej = std::max(0.0, 1.0 - std::abs(u) / B);
    if (fej == 0.0) continue;
    const CdMatrix xg = from_complex_coords(XG.row(l + lmargin).transpose(), g.level, g.d, g.d);
    const CdMatrix phi = fej * (inverse(xf[static_cast<std::size_t>(l + lmargin)], 0.0) * xg);
    const std::size_t idx = l >= 0 ? static_cast<std::size_t>(l) : L - static_cast<std::size_t>(-l);
    spec.row(static_cast<Eigen::Index>(idx)) = complex_coords(phi).transpose();
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> col(L), back(L);
  Eigen::MatrixXcd phi_x(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(C));
  const double scale = du / kTwoPi * static_cast<double>(L);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < L; ++i) col[i] = spec(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    fft.inv(back, col);
    for (std::size_t i = 0; i < L; ++i) phi_x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = scale * back[i];
  }

  const long mm = static_cast<long>(m * m);
  r.shifts.reserve(static_cast<std::size_t>(2 * mm));
  r.weights.reserve(static_cast<std::size_t>(2 * mm));
  for (long k = -mm; k < mm; ++k) {
    const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k) : L - static_cast<std::size_t>(-k);
    r.shifts.push_back(static_cast<double>(k) * lambda);
    r.weights.push_back(lambda * from_complex_coords(phi_x.row(static_cast<Eigen::Index>(idx)).transpose(), f.level, f.d, f.d));
  }

  // approx(t_i) = Σ_k f(t_i + kλ) b_k on f's lattice.
  const long M = static_cast<long>(f.size());
  const long lq = static_cast<long>(q);
  const long i_lo = -(mm - 1) * lq, i_hi = M + mm * lq;
  LineFunction approx{f.level, f.d, f.t0 + static_cast<double>(i_lo) * f.h, f.h,
                      std::vector<CdMatrix>(static_cast<std::size_t>(i_hi - i_lo), CdMatrix(f.level, f.d, f.d))};
  for (long k = -mm; k < mm; ++k) {
    const CdMatrix& b = r.weights[static_cast<std::size_t>(k + mm)];
    if (b.is_zero()) continue;
    for (long s = 0; s < M; ++s) {
      const long i = s - k * lq;  // t_i + kλ = t_s
      CdMatrix::mul_acc(f.values[static_cast<std::size_t>(s)], b, approx.values[static_cast<std::size_t>(i - i_lo)]);
    }
  }
  r.residual = l1_distance(g, approx);
  r.discretisation_error = l1_distance(reg.smoothed, approx);
  r.budget_exhausted = r.residual > 2.0 * delta;
  return r;
}

}  // namespace cdop
