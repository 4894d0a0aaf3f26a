#include "cdop/symbol.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "cdop/errors.hpp"

namespace cdop {

namespace {

long floor_div(long a, long n) {
  long q = a / n;
  if ((a % n != 0) && ((a < 0) != (n < 0))) --q;
  return q;
}

std::complex<double> cpow(std::complex<double> m, long q) {
  // Unit-modulus power by angle keeps |M^q| = 1 exactly enough for large q.
  if (std::abs(std::abs(m) - 1.0) < 1e-12) return std::polar(1.0, static_cast<double>(q) * std::arg(m));
  return std::pow(m, static_cast<double>(q));
}

}  // namespace

SymbolPoint SymbolPoint::at(double theta) { return {theta, std::polar(1.0, theta)}; }

SymbolPoint SymbolPoint::from_complex(std::complex<double> z) {
  const double r = std::abs(z);
  if (std::abs(r - 1.0) > 1e-12) throw DomainError("symbol point off the unit circle", {{"modulus", r}});
  double th = std::arg(z);
  if (th < 0) th += 2 * std::numbers::pi;
  return {th, z};
}

long BlockedCoeffs::max_q() const {
  long q = 0;
  for (const auto& [k, m] : t) q = std::max(q, std::labs(k));
  return q;
}

long blocked_radius(const BandPeriodicOp& b) {
  const long n = static_cast<long>(b.period());
  const long K = static_cast<long>(b.band());
  return (K + n - 1 + n - 1) / n;
}

BlockedCoeffs block(const BandPeriodicOp& b) {
  BlockedCoeffs out;
  out.n = b.period();
  out.d = b.dim();
  out.level = b.level();
  const long n = static_cast<long>(b.period());
  const long K = static_cast<long>(b.band());
  const long Q = blocked_radius(b);
  const std::size_t d = b.dim();
  for (long q = -Q; q <= Q; ++q) {
    CdMatrix tq(b.level(), out.n * d, out.n * d);
    for (long j = 0; j < n; ++j)
      for (long jp = 0; jp < n; ++jp) {
        const long m = q * n + jp - j;
        if (std::labs(m) > K) continue;
        tq.set_block(static_cast<std::size_t>(j) * d, static_cast<std::size_t>(jp) * d,
                     b.block(static_cast<std::size_t>(j), m));
      }
    out.t.emplace(q, std::move(tq));
  }
  return out;
}

BandPeriodicOp reconstruct(const BlockedCoeffs& c) {
  const long n = static_cast<long>(c.n);
  const std::size_t d = c.d;
  const long Q = c.max_q();
  const long K = Q * n + n - 1;
  BandPeriodicOp out(c.level, d, c.n, static_cast<std::size_t>(K));
  for (const auto& [q, tq] : c.t) {
    if (tq.rows() != c.n * d || tq.cols() != c.n * d || tq.level() != c.level)
      throw DimensionError("blocked coefficient of the wrong shape");
  }
  for (long j = 0; j < n; ++j)
    for (long m = -K; m <= K; ++m) {
      const long q = floor_div(j + m, n);
      const long jp = j + m - q * n;
      const auto it = c.t.find(q);
      if (it == c.t.end()) continue;
      out.block(static_cast<std::size_t>(j), m) =
          it->second.block(static_cast<std::size_t>(j) * d, static_cast<std::size_t>(jp) * d, d, d);
    }
  return out.trimmed(0.0).with_period(c.n);
}

CdMatrix symbol_eval(const BlockedCoeffs& c, const SymbolPoint& p) {
  CdMatrix out(c.level, c.n * c.d, c.n * c.d);
  for (const auto& [q, tq] : c.t) {
    CdMatrix term = tq;
    term *= cpow(p.m, q);
    out += term;
  }
  return out;
}

CdMatrix symbol_eval(const BandPeriodicOp& b, const SymbolPoint& p) { return symbol_eval(block(b), p); }

std::vector<VectorY> def37_eval(const BandPeriodicOp& b, std::complex<double> m, const VectorY& x) {
  if (x.level() != b.level() || x.dim() != b.dim()) throw DimensionError("def37_eval: vector of the wrong shape");
  const long K = static_cast<long>(b.band());
  std::vector<VectorY> out;
  for (std::size_t j = 0; j < b.period(); ++j) {
    CdMatrix acc(b.level(), b.dim(), 1);
    for (long k = -K; k <= K; ++k) {
      CdMatrix term = b.block(j, k) * x.as_column();
      term *= cpow(m, static_cast<long>(j) + k);
      acc += term;
    }
    out.push_back(VectorY::from_column(std::move(acc)));
  }
  return out;
}

CdMatrix breve_eval(const BandPeriodicOp& b, std::complex<double> m, long lo, long hi) {
  CdMatrix w = b.window_matrix(lo, hi);
  const std::size_t d = b.dim();
  const long K = static_cast<long>(b.band());
  for (long s = lo; s <= hi; ++s)
    for (long p = std::max(lo, s - K); p <= std::min(hi, s + K); ++p) {
      CdMatrix e = w.block(static_cast<std::size_t>(s - lo) * d, static_cast<std::size_t>(p - lo) * d, d, d);
      e *= cpow(m, s - p);
      w.set_block(static_cast<std::size_t>(s - lo) * d, static_cast<std::size_t>(p - lo) * d, e);
    }
  return w;
}

std::vector<CdMatrix> sample_symbol(const BandPeriodicOp& b, std::size_t n_grid) {
  const BlockedCoeffs c = block(b);
  std::vector<CdMatrix> out;
  out.reserve(n_grid);
  for (std::size_t r = 0; r < n_grid; ++r) {
    out.push_back(symbol_eval(c, SymbolPoint::at(2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n_grid))));
  }
  return out;
}

FourierCoeff fourier_coeff(const std::vector<CdMatrix>& samples, long k) {
  if (samples.empty()) throw DomainError("no samples");
  const std::size_t N = samples.size();
  FourierCoeff out{CdMatrix(samples[0].level(), samples[0].rows(), samples[0].cols()), false};
  out.aliased = 2 * static_cast<std::size_t>(std::labs(k)) >= N;
  for (std::size_t r = 0; r < N; ++r) {
    CdMatrix term = samples[r];
    const double th = 2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(N);
    term *= std::polar(1.0 / static_cast<double>(N), -static_cast<double>(k) * th);
    out.value += term;
  }
  return out;
}

std::map<long, CdMatrix> fourier_coeffs(const std::vector<CdMatrix>& samples) {
  if (samples.empty()) throw DomainError("no samples");
  const std::size_t N = samples.size();
  const CdMatrix& s0 = samples[0];
  const std::size_t half = s0.entry_size() / 2;
  const std::size_t ncoord = s0.data().size() / 2;  // complex coordinates per sample
  std::map<long, CdMatrix> out;
  const long lo = -static_cast<long>((N - 1) / 2);
  const long hi = static_cast<long>(N / 2);
  for (long k = lo; k <= hi; ++k) out.emplace(k, CdMatrix(s0.level(), s0.rows(), s0.cols()));

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(N), spec(N);
  const std::size_t es = s0.entry_size();
  for (std::size_t c = 0; c < ncoord; ++c) {
    const std::size_t entry = c / half;
    const std::size_t j = c % half;
    const std::size_t re_off = entry * es + j;
    const std::size_t im_off = entry * es + half + j;
    for (std::size_t r = 0; r < N; ++r) in[r] = {samples[r].data()[re_off], samples[r].data()[im_off]};
    fft.fwd(spec, in);
    for (long k = lo; k <= hi; ++k) {
      const std::size_t idx = static_cast<std::size_t>(k < 0 ? k + static_cast<long>(N) : k);
      const std::complex<double> z = spec[idx] / static_cast<double>(N);
      CdMatrix& dst = out.at(k);
      const std::size_t row = entry / s0.cols();
      const std::size_t col = entry % s0.cols();
      auto e = dst.raw(row, col);
      e[j] = z.real();
      e[half + j] = z.imag();
    }
  }
  return out;
}

CdMatrix cesaro_sum(const BlockedCoeffs& c, long m, const SymbolPoint& p) {
  if (m < 0) throw DomainError("cesaro_sum needs m >= 0");
  CdMatrix out(c.level, c.n * c.d, c.n * c.d);
  for (const auto& [k, tk] : c.t) {
    if (std::labs(k) > m) continue;
    CdMatrix term = tk;
    term *= cpow(p.m, k) * (1.0 - static_cast<double>(std::labs(k)) / static_cast<double>(m + 1));
    out += term;
  }
  return out;
}

}  // namespace cdop
