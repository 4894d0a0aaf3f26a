#include <cmath>
#include <numbers>

#include "cdop/errors.hpp"
#include "cdop/inversion.hpp"
#include "cdop/kernel_ops.hpp"
#include "cdop/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdop;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

CdMatrix real_coeff(double x) { return CdMatrix::scalar(CdComplex::scalar(2, x), 1); }

double gauss(double sigma, double u) { return std::exp(-0.5 * u * u / (sigma * sigma)) / (sigma * std::sqrt(kTwoPi)); }

double bump(double r, double u) {
  const double x = u / r;
  if (std::abs(x) >= 1) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x)) / (r * 0.44399381616807943);
}

CellGrid grid1(std::size_t G, double omega = 1.0) { return CellGrid{{omega}, G, Quadrature::trapezoid}; }

// Multiplier of the discretised difference operator on the mode e^{iξτ}:
// h sum_j f(jh) e^{-iξjh}.
std::complex<double> lattice_multiplier(double (*f)(double, double), double width, double weight, double h, double xi) {
  std::complex<double> acc = 0;
  for (long j = -4000; j <= 4000; ++j) acc += h * weight * f(width, j * h) * std::polar(1.0, -xi * j * h);
  return acc;
}

GridFunction random_grid_function(Rng& rng, const CellGrid& grid, std::vector<long> lo, std::vector<std::size_t> cells, std::size_t d) {
  GridFunction x;
  x.level = 2;
  x.d = d;
  x.grid = grid;
  x.cell_lo = std::move(lo);
  x.cells = std::move(cells);
  for (std::size_t i = 0; i < x.size(); ++i) x.values.push_back(VectorY::from_column(random_matrix(rng, 2, d, 1)));
  return x;
}
}  // namespace

TEST_CASE("zero kernel") {
  const KernelSpec k = KernelSpec::zero(2, {1.0});
  const BlockedKernelOp op = discretize(k, grid1(4), {2});
  CHECK(op.blocks().empty());
  CHECK(op.to_band_op().trimmed().max_abs_diff(BandPeriodicOp::identity(2, 8)) == 0.0);
  const TorusResult t = torus_invertibility(op, 16);
  CHECK(t.invertible);
  CHECK(t.margin == doctest::Approx(1.0));
  for (const auto& z : kernel_spectrum(op, 4).union_points()) CHECK(std::abs(z - 1.0) <= 1e-14);
}

TEST_CASE("difference kernel supported in one cell") {
  const double r = 0.4, weight = 0.7;
  const KernelSpec k = KernelSpec::difference(real_coeff(1.0), weight, Profile::bump, {r}, {1.0});
  const std::size_t G = 8;
  const double h = 1.0 / G;
  const BlockedKernelOp op = discretize(k, grid1(G), {2});
  for (long m = -2; m <= 2; ++m) {
    const CdMatrix q = op.q({m});
    if (std::labs(m) == 2) CHECK(q.is_zero());
    // Convolution-matrix oracle on the grid.
    for (std::size_t a = 0; a < G; ++a)
      for (std::size_t c = 0; c < G; ++c) {
        const double want = h * weight * bump(r, (static_cast<double>(a) - static_cast<double>(c)) * h - static_cast<double>(m));
        CHECK(std::abs(q(a, c).re().coords()[0] - want) <= 1e-14);
      }
  }
  CHECK(op.decay.size() == 4);
  CHECK(op.decay[3] == 0.0);
  // Symbol on a Fourier mode equals the discrete transform of the samples.
  for (double xi : {0.0, 1.3, -4.0}) {
    const std::complex<double> M = std::polar(1.0, xi);
    const CdMatrix s = op.symbol_q(std::vector<std::complex<double>>{M});
    CdMatrix mode(2, G, 1);
    for (std::size_t c = 0; c < G; ++c) mode.set(c, 0, CdComplex::scalar(2, std::polar(1.0, xi * c * h)));
    const CdMatrix out = s * mode;
    const std::complex<double> mu = lattice_multiplier(bump, r, weight, h, xi);
    CHECK((out - mu * mode).max_entry_norm() <= 1e-12);
  }
}

TEST_CASE("separable kernel") {
  Rng seed_rng(51);
  SeparableTerm t;
  t.coeff = random_matrix(seed_rng, 2, 2, 2);
  t.phi = {TrigPoly{{0.5, 0.2}, {0.0, 0.3}}};
  t.psi = {TrigPoly{{1.0}, {0.0, -0.4, 0.1}}};
  t.reach = 1;
  const KernelSpec k = KernelSpec::separable({t}, {2.0});
  const std::size_t G = 4;
  const CellGrid g = grid1(G, 2.0);
  const BlockedKernelOp op = discretize(k, g, {1});
  const double h = 0.5;
  for (long m = -1; m <= 1; ++m) {
    const CdMatrix q = op.q({m});
    for (std::size_t a = 0; a < G; ++a)
      for (std::size_t c = 0; c < G; ++c) {
        const double ta = a * h, sc = c * h + 2.0 * m;
        const double phi = 0.5 + 0.2 * std::cos(kTwoPi * ta / 2) + 0.3 * std::sin(kTwoPi * ta / 2);
        const double psi = 1.0 - 0.4 * std::sin(kTwoPi * sc / 2) + 0.1 * std::sin(2 * kTwoPi * sc / 2);
        CHECK((q.block(a * 2, c * 2, 2, 2) - t.coeff * (h * phi * psi)).max_entry_norm() <= 1e-13);
      }
  }
  // Too narrow a band for the reach.
  CHECK_THROWS_AS(discretize(k, g, {0}), ResourceError);
  Rng rng(52);
  CHECK(check_kernel(k, g, rng).periodicity_defect <= 1e-10);
}

TEST_CASE("difference-only dependence") {
  Rng rng(53);
  const KernelSpec k = KernelSpec::difference(random_matrix(rng, 2, 1, 1), 0.3, Profile::gaussian, {0.2, 0.15}, {1.0, 0.5});
  const CellGrid g{{1.0, 0.5}, 4, Quadrature::midpoint};
  const BlockedKernelOp op = discretize(k, g, {2, 2});
  const std::size_t P = g.points_per_cell();
  for (int rep = 0; rep < 20; ++rep) {
    const MultiIndex kk{rng.integer(-5, 5), rng.integer(-5, 5)};
    const MultiIndex diff{rng.integer(-1, 1), rng.integer(-2, 2)};
    const MultiIndex ss{kk[0] + diff[0], kk[1] + diff[1]};
    const CdMatrix q = op.q(diff);
    for (std::size_t a = 0; a < P; ++a)
      for (std::size_t c = 0; c < P; ++c) {
        const CdMatrix direct = k.eval(g.point(a, kk), g.point(c, ss)) * g.weight();
        CHECK((direct - q.block(a, c, 1, 1)).max_entry_norm() <= 1e-10);
      }
  }
  CHECK(check_kernel(k, g, rng).periodicity_defect <= 1e-10);
}

TEST_CASE("rearrangement") {
  Rng rng(54);
  const CellGrid g{{1.0, 2.0}, 3, Quadrature::trapezoid};
  const GridFunction x = random_grid_function(rng, g, {-1, 2}, {3, 2}, 2);
  const MultiSeq y = rearrange(x);
  CHECK(y.size() == 6);
  const GridFunction back = unrearrange(y, 2, 2, g);
  CHECK(back.cell_lo == x.cell_lo);
  CHECK(back.cells == x.cells);
  CHECK(back.values == x.values);
  double ymax = 0;
  for (const auto& [m, col] : y) ymax = std::max(ymax, col.max_entry_norm());
  CHECK(ymax == x.norm_inf());
  // y(m̄)[a] = x(τ_a + m̄ω).
  for (const auto& [m, col] : y)
    for (std::size_t a = 0; a < g.points_per_cell(); ++a) {
      const auto p = g.point(a, m);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const auto c = x.coords(i);
        if (std::abs(c[0] - p[0]) < 1e-12 && std::abs(c[1] - p[1]) < 1e-12) CHECK(col.block(a * 2, 0, 2, 1) == x.values[i].as_column());
      }
    }

  // Constant function: identical cell copies.
  GridFunction one = x;
  for (auto& v : one.values) v = VectorY::unit(2, 0, CdComplex::scalar(2, 1.0));
  const MultiSeq yc = rearrange(one);
  for (const auto& [m, col] : yc) CHECK(col == yc.begin()->second);

  // A shift by one full period is the sequence shift.
  GridFunction shifted = x;
  shifted.cell_lo = {x.cell_lo[0] - 1, x.cell_lo[1]};  // x'(t) = x(t + ω_0 i_0)
  const MultiSeq ys = rearrange(shifted);
  for (const auto& [m, col] : ys) CHECK(col == y.at(MultiIndex{m[0] + 1, m[1]}));
}

TEST_CASE("alignment errors") {
  const CellGrid g = grid1(4);
  std::vector<VectorY> v(8, VectorY(2, 1));
  CHECK_NOTHROW(GridFunction::from_samples(2, 1, g, {-1.0}, {0.25}, {8}, v));
  CHECK(GridFunction::from_samples(2, 1, g, {-1.0}, {0.25}, {8}, v).cell_lo[0] == -1);
  CHECK_THROWS_AS(GridFunction::from_samples(2, 1, g, {-0.9}, {0.25}, {8}, v), AlignmentError);
  CHECK_THROWS_AS(GridFunction::from_samples(2, 1, g, {-0.5}, {0.25}, {8}, v), AlignmentError);
  CHECK_THROWS_AS(GridFunction::from_samples(2, 1, g, {-1.0}, {0.2}, {8}, v), AlignmentError);
  std::vector<VectorY> v6(6, VectorY(2, 1));
  CHECK_THROWS_AS(GridFunction::from_samples(2, 1, g, {-1.0}, {0.25}, {6}, v6), AlignmentError);
  const CellGrid gm{{1.0}, 4, Quadrature::midpoint};
  CHECK_NOTHROW(GridFunction::from_samples(2, 1, gm, {0.125}, {0.25}, {8}, v));
}

TEST_CASE("blocked operator is the conjugated grid operator") {
  Rng rng(55);
  const KernelSpec k = KernelSpec::difference(random_matrix(rng, 2, 2, 2), 0.5, Profile::bump, {0.7, 0.4}, {1.0, 0.5});
  const CellGrid g{{1.0, 0.5}, 3, Quadrature::trapezoid};
  const BlockedKernelOp op = discretize(k, g, {1, 1});
  const GridFunction x = random_grid_function(rng, g, {-1, 0}, {3, 2}, 2);
  const MultiSeq lhs = rearrange(apply_direct(k, x));
  const MultiSeq rhs = op.apply_q(rearrange(x));
  REQUIRE(lhs.size() == rhs.size());
  for (const auto& [m, col] : lhs) CHECK((col - rhs.at(m)).max_entry_norm() <= 1e-12);
}

TEST_CASE("quadrature converges spectrally") {
  const double sigma = 0.12, weight = 0.6;
  const KernelSpec k = KernelSpec::difference(real_coeff(1.0), weight, Profile::gaussian, {sigma}, {1.0});
  const double xi = kTwoPi * 1.25;  // mode frequency: M = e^{iξω}
  std::vector<double> err;
  for (std::size_t G : {4, 8, 16}) {
    const BlockedKernelOp op = discretize(k, grid1(G), {1});
    const double h = 1.0 / static_cast<double>(G);
    CdMatrix mode(2, G, 1);
    for (std::size_t c = 0; c < G; ++c) mode.set(c, 0, CdComplex::scalar(2, std::polar(1.0, xi * c * h)));
    const CdMatrix out = op.symbol_q(std::vector<std::complex<double>>{std::polar(1.0, xi)}) * mode;
    const double exact = weight * std::exp(-0.5 * sigma * sigma * xi * xi);
    err.push_back((out - exact * mode).max_entry_norm());
  }
  MESSAGE("quadrature errors G=4,8,16: " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(err[1] <= 0.25 * err[0]);
  CHECK(err[2] <= 0.25 * err[1] + 1e-15);
}

TEST_CASE("small kernel is invertible and matches the Neumann series") {
  Rng rng(56);
  CdMatrix coeff = CdMatrix::scalar(CdComplex(random_unit(rng, 2)), 1);
  const KernelSpec k = KernelSpec::difference(coeff, 0.5, Profile::gaussian, {0.15}, {1.0});
  const BlockedKernelOp op = discretize(k, grid1(8), {1});
  const double qn = op.q_band_op().op_norm_bound();
  CHECK(qn < 1.0);
  const TorusResult t = torus_invertibility(op, 32);
  CHECK(t.invertible);
  CHECK(t.margin >= 1.0 - qn - 1e-10);
  const BandPeriodicOp a = op.to_band_op();
  const InverseReport w = wiener_invert(a, 64, 1e-12);
  const NeumannResult n = neumann_inverse(scale(op.q_band_op(), -1.0), 1e-13, 400, 256);
  CHECK(w.residual_left <= 1e-8);
  CHECK(w.residual_right <= 1e-8);
  CHECK(n.residual_left <= 1e-8);
  CHECK(subtract(w.inverse, n.inverse).op_norm_bound() <= 1e-8);
}

TEST_CASE("zero-mean engineered kernel is singular at the torus origin") {
  // A = I - Q with Q from a unit-mass profile: the symbol of A annihilates
  // the constant mode at M = 1.
  const KernelSpec k = KernelSpec::difference(real_coeff(1.0), 1.0, Profile::gaussian, {0.1}, {1.0});
  const BlockedKernelOp op = discretize(k, grid1(16), {1});
  const TorusResult t = torus_invertibility(op, 32);
  CHECK_FALSE(t.invertible);
  CHECK(std::min(t.witness[0], kTwoPi - t.witness[0]) <= 1e-3);
  // Two axes: witness at the origin of the 2-torus.
  const KernelSpec k2 = KernelSpec::difference(real_coeff(1.0), 1.0, Profile::gaussian, {0.2, 0.2}, {1.0, 1.0});
  const TorusResult t2 = torus_invertibility(discretize(k2, CellGrid{{1.0, 1.0}, 6, Quadrature::trapezoid}, {2, 2}), 12);
  CHECK_FALSE(t2.invertible);
  for (double th : t2.witness) CHECK(std::min(th, kTwoPi - th) <= 1e-3);
}

TEST_CASE("kernel spectrum") {
  const double sigma = 0.15, weight = 0.8;
  const std::size_t G = 8;
  const KernelSpec k = KernelSpec::difference(real_coeff(1.0), weight, Profile::gaussian, {sigma}, {1.0});
  const BlockedKernelOp op = discretize(k, grid1(G), {1});
  const SpectrumCloud cloud = kernel_spectrum(op, 16);
  CHECK(cloud.samples.size() == 16);
  for (const auto& s : cloud.samples) {
    // Discrete modes ξ_k = θ + 2πk on the cell (ω = 1).
    Eigenvalues want;
    for (long kk = -4; kk < 4; ++kk) {
      const std::complex<double> mu = lattice_multiplier(gauss, sigma, weight, 1.0 / G, s.theta[0] + kTwoPi * kk);
      for (int c = 0; c < 4; ++c) {
        want.push_back(1.0 - mu);
        want.push_back(std::conj(1.0 - mu));
      }
    }
    CHECK(multiset_match(s.eigenvalues, want, 1e-9));
  }
  // Dense periodization of the assembled operator.
  const BlockedKernelOp small = discretize(k, grid1(4), {1});
  const Eigenvalues dense = circulant_oracle(small.to_band_op(), 8);
  Eigenvalues sampled;
  for (const auto& s : kernel_spectrum(small, 8).samples) sampled.insert(sampled.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  CHECK(multiset_match(dense, sampled, 1e-7));
}

TEST_CASE("torus margin against the dense periodization") {
  Rng rng(57);
  const KernelSpec k = KernelSpec::difference(CdMatrix::scalar(CdComplex(random_unit(rng, 2)), 1), 0.6, Profile::gaussian,
                                              {0.15}, {1.0});
  const BlockedKernelOp op = discretize(k, grid1(4), {1});
  const TorusResult t = torus_invertibility(op, 8);
  const double dense = periodized_min_singular_value(op.to_band_op(), 8);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complex_rep(oracle::periodized(op.to_band_op(), 8)));
  CHECK(dense == doctest::Approx(svd.singularValues().minCoeff()).epsilon(1e-9));
  CHECK(std::abs(t.margin - dense) <= 1e-3);
}

TEST_CASE("kernel preconditions") {
  KernelSpec k = KernelSpec::difference(real_coeff(1.0), 1.0, Profile::gaussian, {1.0}, {1.0});
  CHECK_THROWS_AS(discretize(k, grid1(4), {1}), ResourceError);
  KernelSpec kb = KernelSpec::difference(real_coeff(1.0), 1.0, Profile::bump, {0.5}, {1.0});
  kb.c1 = 0.1;
  CHECK_THROWS_AS(discretize(kb, grid1(4), {1}), PreconditionError);
  kb.c1 = 10.0;
  CHECK_NOTHROW(discretize(kb, grid1(4), {1}));
  kb.axes = {7};
  CHECK_THROWS_AS(discretize(kb, grid1(4), {1}), DomainError);
  try {
    discretize(k, grid1(4), {1});
  } catch (const ResourceError& e) {
    CHECK(e.witness().count("m0") == 1);
    CHECK(e.witness().at("tail_norm") > 0);
  }
}

TEST_CASE("table kernels") {
  Rng rng(58);
  const std::size_t G = 2;
  KernelSpec k;
  k.kind = KernelKind::table;
  k.d = 1;
  k.table_grid = G;
  k.table[{0}] = random_matrix(rng, 2, G, G);
  k.table[{1}] = random_matrix(rng, 2, G, G);
  const BlockedKernelOp op = discretize(k, grid1(G), {1});
  CHECK((op.q({1}) - k.table[{1}] * 0.5).max_entry_norm() <= 1e-15);
  CHECK(op.q({-1}).is_zero());
  const GridFunction x = random_grid_function(rng, grid1(G), {0}, {3}, 1);
  const MultiSeq lhs = rearrange(apply_direct(k, x));
  const MultiSeq rhs = op.apply_q(rearrange(x));
  for (const auto& [m, col] : lhs) CHECK((col - rhs.at(m)).max_entry_norm() <= 1e-13);
  CHECK_THROWS_AS(discretize(k, grid1(4), {1}), PreconditionError);
}
