// Independent reference computations used by the tests. Nothing here calls
// the library's algorithms for the quantity being checked.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cdop/cd_matrix.hpp"
#include "cdop/sequence_ops.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline Vec conj(const Vec& x) {
  Vec r(x.size());
  r[0] = x[0];
  for (std::size_t j = 1; j < x.size(); ++j) r[j] = -x[j];
  return r;
}

/// Doubling product written directly from (x,y)(u,w) = (xu - w*y, wx + yu*).
inline Vec mul(const Vec& a, const Vec& b) {
  const std::size_t n = a.size();
  if (n == 1) return {a[0] * b[0]};
  const std::size_t h = n / 2;
  const Vec x(a.begin(), a.begin() + h), y(a.begin() + h, a.end());
  const Vec u(b.begin(), b.begin() + h), w(b.begin() + h, b.end());
  const Vec xu = mul(x, u), wsy = mul(conj(w), y), wx = mul(w, x), yus = mul(y, conj(u));
  Vec r(n);
  for (std::size_t j = 0; j < h; ++j) {
    r[j] = xu[j] - wsy[j];
    r[h + j] = wx[j] + yus[j];
  }
  return r;
}

inline Vec basis(std::size_t n, std::size_t j, double s = 1.0) {
  Vec r(n, 0.0);
  r[j] = s;
  return r;
}

inline double norm(const Vec& x) {
  double s = 0;
  for (double q : x) s += q * q;
  return std::sqrt(s);
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
  return r;
}

inline Vec coords(const cdop::CdNumber& a) { return Vec(a.coords().begin(), a.coords().end()); }

/// Complexified product from the real doubling product.
inline std::pair<Vec, Vec> cmul(const Vec& p, const Vec& q, const Vec& r, const Vec& s) {
  return {sub(mul(p, r), mul(q, s)), [&] {
            Vec a = mul(p, s), b = mul(q, r);
            for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
            return a;
          }()};
}

/// Entry B_{l,s} straight from the stored blocks, no library indexing.
inline cdop::CdMatrix entry(const cdop::BandPeriodicOp& b, long l, long s) {
  const long n = static_cast<long>(b.period());
  const long K = static_cast<long>(b.band());
  if (std::labs(s - l) > K) return cdop::CdMatrix(b.level(), b.dim(), b.dim());
  const long j = ((l % n) + n) % n;
  return b.blocks()[static_cast<std::size_t>(j * (2 * K + 1) + (s - l + K))];
}

/// Dense window of B with rows/cols l, s in [lo, hi].
inline cdop::CdMatrix dense(const cdop::BandPeriodicOp& b, long lo, long hi) {
  const std::size_t d = b.dim();
  const std::size_t w = static_cast<std::size_t>(hi - lo + 1);
  cdop::CdMatrix out(b.level(), w * d, w * d);
  for (long l = lo; l <= hi; ++l)
    for (long s = lo; s <= hi; ++s) out.set_block(static_cast<std::size_t>(l - lo) * d, static_cast<std::size_t>(s - lo) * d, entry(b, l, s));
  return out;
}

/// Dense N-point periodization: entry (l, s) sums B_{l, s + pN} over wraps.
inline cdop::CdMatrix periodized(const cdop::BandPeriodicOp& b, long N) {
  const std::size_t d = b.dim();
  const long K = static_cast<long>(b.band());
  cdop::CdMatrix out(b.level(), static_cast<std::size_t>(N) * d, static_cast<std::size_t>(N) * d);
  for (long l = 0; l < N; ++l)
    for (long m = -K; m <= K; ++m) {
      const long s = ((l + m) % N + N) % N;
      cdop::CdMatrix cur = out.block(static_cast<std::size_t>(l) * d, static_cast<std::size_t>(s) * d, d, d);
      cur += entry(b, l, l + m);
      out.set_block(static_cast<std::size_t>(l) * d, static_cast<std::size_t>(s) * d, cur);
    }
  return out;
}

/// Largest coordinate difference of two equally shaped matrices.
inline double max_diff(const cdop::CdMatrix& a, const cdop::CdMatrix& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace oracle
