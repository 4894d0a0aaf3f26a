#include <cmath>
#include <numbers>

#include "cdop/errors.hpp"
#include "cdop/random.hpp"
#include "cdop/symbol.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdop;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

double max_entry_diff(const CdMatrix& a, const CdMatrix& b) { return (a - b).max_entry_norm(); }
}  // namespace

TEST_CASE("blocking") {
  Rng rng(21);
  const BandPeriodicOp b1 = random_op(rng, 2, 2, 1, 3);
  const BlockedCoeffs c1 = block(b1);
  for (long q = -3; q <= 3; ++q) CHECK(c1.t.at(q) == b1.block(0, q));

  // S(1) with period 2: superdiagonal block in T_0, corner block in T_1.
  const BandPeriodicOp s = BandPeriodicOp::shift(2, 1, 1).with_period(2);
  const BlockedCoeffs cs = block(s);
  CHECK(cs.t.at(0)(0, 1) == CdComplex(CdNumber::real(2, 1.0)));
  CHECK(cs.t.at(0)(1, 0).is_zero());
  CHECK(cs.t.at(1)(1, 0) == CdComplex(CdNumber::real(2, 1.0)));
  CHECK(reconstruct(cs).max_abs_diff(s) == 0.0);

  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const BandPeriodicOp b = random_op(rng, 2, 2, n, static_cast<std::size_t>(rng.integer(0, 4)));
    const BlockedCoeffs c = block(b);
    CHECK(reconstruct(c).max_abs_diff(b) == 0.0);
    // Reassemble entries from T_q: row l = qn + j.
    const long nn = static_cast<long>(n);
    for (long l = -7; l <= 7; ++l)
      for (long s2 = l - 5; s2 <= l + 5; ++s2) {
        const long ql = (l >= 0 ? l / nn : -((-l + nn - 1) / nn));
        const long qs = (s2 >= 0 ? s2 / nn : -((-s2 + nn - 1) / nn));
        const long jl = l - ql * nn, js = s2 - qs * nn;
        const auto it = c.t.find(qs - ql);
        const CdMatrix got = it == c.t.end() ? CdMatrix(2, 2, 2)
                                             : it->second.block(static_cast<std::size_t>(jl) * 2, static_cast<std::size_t>(js) * 2, 2, 2);
        CHECK(got == oracle::entry(b, l, s2));
      }
  }
  BlockedCoeffs id;
  id.n = 1;
  id.d = 2;
  id.level = 2;
  id.t.emplace(0, CdMatrix::identity(2, 2));
  CHECK(reconstruct(id).max_abs_diff(BandPeriodicOp::identity(2, 2)) == 0.0);
}

TEST_CASE("symbol evaluation") {
  const SymbolPoint p = SymbolPoint::at(0.7);
  const CdMatrix s = symbol_eval(BandPeriodicOp::shift(2, 1, 1), p);
  CHECK(max_entry_diff(s, CdMatrix::scalar(CdComplex::scalar(2, p.m), 1)) <= 1e-15);
  CHECK(symbol_eval(BandPeriodicOp::identity(2, 3), p) == CdMatrix::identity(2, 3));
  CHECK_THROWS_AS(SymbolPoint::from_complex({1.1, 0.0}), DomainError);
  CHECK(SymbolPoint::from_complex(std::polar(1.0, -0.5)).theta == doctest::Approx(kTwoPi - 0.5));
}

TEST_CASE("product rule and linearity") {
  Rng rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t na = static_cast<std::size_t>(rng.integer(1, 2));
    const BandPeriodicOp a = random_op(rng, 2, 2, na, static_cast<std::size_t>(rng.integer(0, 3)));
    const BandPeriodicOp b = random_op(rng, 2, 2, na, static_cast<std::size_t>(rng.integer(0, 3)));
    const BandPeriodicOp ab = compose(a, b);
    const BandPeriodicOp apb = add(a, b);
    for (int k = 0; k < 64; ++k) {
      const SymbolPoint p = SymbolPoint::at(kTwoPi * k / 64.0 + 0.013);
      CHECK(max_entry_diff(symbol_eval(ab, p), symbol_eval(a, p) * symbol_eval(b, p)) <= 1e-10);
      CHECK(max_entry_diff(symbol_eval(apb, p), symbol_eval(a, p) + symbol_eval(b, p)) <= 1e-12);
    }
  }
}

TEST_CASE("unblocked transform matches blocked symbol") {
  Rng rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const BandPeriodicOp b = random_op(rng, 2, 2, n, 2);
    const std::complex<double> m = std::polar(1.0, rng.uniform(0, kTwoPi));
    const VectorY x = VectorY::from_column(random_matrix(rng, 2, 2, 1));
    const auto direct = def37_eval(b, m, x);
    // symbol(M^n) applied to (M^{j'} x)_{j'}.
    CdMatrix stacked(2, n * 2, 1);
    for (std::size_t jp = 0; jp < n; ++jp) {
      CdMatrix piece = x.as_column();
      piece *= std::pow(m, static_cast<double>(jp));
      stacked.set_block(jp * 2, 0, piece);
    }
    const CdMatrix via = symbol_eval(b, SymbolPoint::from_complex(std::pow(m, static_cast<double>(n)) / std::abs(std::pow(m, static_cast<double>(n))))) * stacked;
    for (std::size_t j = 0; j < n; ++j) CHECK(max_entry_diff(direct[j].as_column(), via.block(j * 2, 0, 2, 1)) <= 1e-12);
  }
}

TEST_CASE("conjugated window") {
  Rng rng(24);
  const BandPeriodicOp a = random_op(rng, 2, 1, 2, 1), b = random_op(rng, 2, 1, 2, 2);
  CHECK(breve_eval(a, 1.0, -5, 5) == a.window_matrix(-5, 5));
  const std::complex<double> m = std::polar(1.0, 0.4);
  const long lo = -10, hi = 10, inner = 3;
  const CdMatrix lhs = breve_eval(compose(a, b), m, lo, hi);
  const CdMatrix rhs = breve_eval(a, m, lo, hi) * breve_eval(b, m, lo, hi);
  const std::size_t off = static_cast<std::size_t>(inner - lo), w = static_cast<std::size_t>(2 * inner + 1);
  CHECK(max_entry_diff(lhs.block(off, off, w, w), rhs.block(off, off, w, w)) <= 1e-12);
  // Window norm stays under the block-sum bound.
  CHECK(breve_eval(b, m, lo, hi).op_norm_bound() <= b.op_norm_bound() * (1 + 1e-12));
}

TEST_CASE("fourier coefficients") {
  const auto shift_samples = sample_symbol(BandPeriodicOp::shift(2, 1, 1), 16);
  for (long k = -7; k <= 8; ++k) {
    const FourierCoeff fc = fourier_coeff(shift_samples, k);
    if (k == 1) {
      CHECK(max_entry_diff(fc.value, CdMatrix::identity(2, 1)) <= 1e-12);
    } else {
      CHECK(fc.value.max_entry_norm() <= 1e-12);
    }
  }
  CHECK(fourier_coeff(shift_samples, 8).aliased);
  CHECK_FALSE(fourier_coeff(shift_samples, 7).aliased);

  const auto const_samples = sample_symbol(scale(BandPeriodicOp::identity(2, 2), 3.0), 8);
  const auto all_c = fourier_coeffs(const_samples);
  for (const auto& [k, m] : all_c) CHECK(m.max_entry_norm() <= (k == 0 ? 3.0 + 1e-12 : 1e-12));

  Rng rng(25);
  const BandPeriodicOp b = random_op(rng, 2, 2, 2, 3);
  const BlockedCoeffs c = block(b);
  const auto samples = sample_symbol(b, 32);
  const auto all = fourier_coeffs(samples);
  for (long q = -c.max_q(); q <= c.max_q(); ++q) {
    CHECK(max_entry_diff(fourier_coeff(samples, q).value, c.t.at(q)) <= 1e-12);
    CHECK(max_entry_diff(all.at(q), c.t.at(q)) <= 1e-12);
  }
}

TEST_CASE("cesaro means") {
  Rng rng(26);
  const BandPeriodicOp b = random_op(rng, 2, 1, 2, 3);
  const BlockedCoeffs c = block(b);
  const long Q = c.max_q();
  CHECK(cesaro_sum(c, 0, SymbolPoint::at(1.0)) == c.t.at(0));
  double prev = 1e300;
  for (long m = 0; m <= 40; ++m) {
    double err = 0;
    double deficit = 0;
    for (const auto& [q, tq] : c.t)
      if (std::labs(q) <= m) deficit += static_cast<double>(std::labs(q)) / static_cast<double>(m + 1) * tq.frobenius();
    for (int k = 0; k < 64; ++k) {
      const SymbolPoint p = SymbolPoint::at(kTwoPi * k / 64.0);
      err = std::max(err, (cesaro_sum(c, m, p) - symbol_eval(c, p)).frobenius());
    }
    if (m >= Q) {
      CHECK(err <= deficit + 1e-12);
      CHECK(err <= prev + 1e-14);
    }
    prev = err;
  }
}

TEST_CASE("convolution form for one-periodic operators") {
  Rng rng(27);
  for (int v : {2, 3}) {
    const BandPeriodicOp b = random_op(rng, v, 1, 1, 2), d = random_op(rng, v, 1, 1, 2);
    SeqFin x(v, 1);
    for (long l = -3; l <= 3; ++l) x.set(l, VectorY::from_column(random_matrix(rng, v, 1, 1)));
    // (Bx)(l) = sum_s B_{s-l} x(s)
    const SeqFin bx = b.apply(x);
    for (long l = -5; l <= 5; ++l) {
      CdMatrix acc(v, 1, 1);
      for (long s = l - 2; s <= l + 2; ++s) acc += b.block(0, s - l) * x.at(s).as_column();
      CHECK(max_entry_diff(acc, bx.at(l).as_column()) <= 1e-12);
    }
    const SeqFin lhs = b.apply(d.apply(x));
    const SeqFin rhs = compose(b, d).apply(x);
    double res = 0;
    for (long l = -7; l <= 7; ++l) res = std::max(res, (lhs.at(l) - rhs.at(l)).norm());
    if (v == 2) {
      CHECK(res <= 1e-12);
    } else {
      MESSAGE("octonion convolution associativity residual: " << res);
    }
  }
}

TEST_CASE("circulant identity") {
  // Dense periodization acting on a discrete Fourier mode equals the symbol
  // at the matching root of unity.
  Rng rng(28);
  const BandPeriodicOp b = random_op(rng, 2, 1, 2, 2);
  const long N = 16, L = N / 2;
  const CdMatrix dense = oracle::periodized(b, N);
  for (long r = 0; r < L; ++r) {
    const std::complex<double> m = std::polar(1.0, kTwoPi * r / L);
    const CdMatrix sym = symbol_eval(b, SymbolPoint::from_complex(m));
    const CdMatrix u = random_matrix(rng, 2, 2, 1);
    CdMatrix x(2, static_cast<std::size_t>(N), 1);
    for (long q = 0; q < L; ++q) {
      CdMatrix piece = u;
      piece *= std::pow(m, static_cast<double>(q));
      x.set_block(static_cast<std::size_t>(q) * 2, 0, piece);
    }
    const CdMatrix dx = dense * x;
    const CdMatrix su = sym * u;
    for (long q = 0; q < L; ++q) {
      CdMatrix piece = su;
      piece *= std::pow(m, static_cast<double>(q));
      CHECK(max_entry_diff(dx.block(static_cast<std::size_t>(q) * 2, 0, 2, 1), piece) <= 1e-9);
    }
  }
}
