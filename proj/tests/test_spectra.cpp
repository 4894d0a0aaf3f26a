#include <cmath>
#include <numbers>
#include <sstream>

#include "cdop/errors.hpp"
#include "cdop/random.hpp"
#include "cdop/spectra.hpp"
#include "cdop/symbol.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdop;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

// Eigenvalues of the real representation computed directly in real arithmetic.
Eigenvalues real_eigs(const CdMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(real_rep(m), false);
  Eigenvalues out(es.eigenvalues().begin(), es.eigenvalues().end());
  return out;
}
}  // namespace

TEST_CASE("pointwise spectrum against the real representation") {
  Rng rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const CdMatrix m = random_matrix(rng, 2, 3, 3);
    const Eigenvalues a = pointwise_spectrum(m);
    CHECK(a.size() == 3 * 8);
    CHECK(multiset_match(a, real_eigs(m), 1e-8));
    // Closed under conjugation.
    Eigenvalues conj_a;
    for (auto z : a) conj_a.push_back(std::conj(z));
    CHECK(multiset_match(a, conj_a, 1e-12));
  }
  // A real scalar quaternion λ has eigenvalue λ with full multiplicity.
  const Eigenvalues s = pointwise_spectrum(CdMatrix::scalar(CdComplex::scalar(2, 2.5), 2));
  for (auto z : s) CHECK(std::abs(z - 2.5) <= 1e-14);
  // Unit quaternion i_1 (no 𝐢 part) has spectrum {±i}.
  const Eigenvalues q = pointwise_spectrum(CdMatrix::scalar(CdComplex(CdNumber::basis(2, 1)), 1));
  for (auto z : q) CHECK(std::abs(std::abs(z.imag()) - 1.0) <= 1e-14);
  CHECK_THROWS_AS(pointwise_spectrum(CdMatrix(2, 2, 3)), DimensionError);
}

TEST_CASE("matching") {
  const Eigenvalues a{{0, 0}, {1, 0}, {1, 0}};
  const Eigenvalues b{{1, 1e-9}, {0, 0}, {1, -1e-9}};
  CHECK(multiset_match(a, b, 1e-8));
  CHECK_FALSE(multiset_match(a, b, 1e-10));
  const Eigenvalues c{{0, 0}, {0, 0}, {1, 0}};
  CHECK_FALSE(multiset_match(a, c, 0.5));
  CHECK(hausdorff_one_sided(a, c) == 0.0);
  CHECK(bottleneck_distance(a, c) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(bottleneck_distance(a, b) <= 1.01e-9);
  CHECK(bottleneck_distance(a, b) >= 1e-9);
  CHECK_FALSE(multiset_match(a, Eigenvalues{{0, 0}}, 10.0));
}

TEST_CASE("circulant periodization matches sampled symbol spectra") {
  Rng rng(42);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 2));
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 2));
    const BandPeriodicOp b = random_op(rng, 2, d, n, static_cast<std::size_t>(rng.integer(0, 3)));
    const Eigenvalues dense = circulant_oracle(b, 16);
    const Eigenvalues sampled = sampled_union_at_roots(b, 16);
    CHECK(dense.size() == sampled.size());
    CHECK(multiset_match(dense, sampled, 1e-8));
    // Independent check: real-arithmetic eigenvalues of the test-side periodization.
    CHECK(multiset_match(real_eigs(oracle::periodized(b, 16)), sampled, 1e-7));
  }
  Rng r2(43);
  const BandPeriodicOp b = random_op(r2, 2, 1, 2, 3);
  CHECK_THROWS_AS(circulant_oracle(b, 7), PreconditionError);
  CHECK_THROWS_AS(circulant_oracle(b, 4), PreconditionError);
  CHECK_THROWS_AS(circulant_oracle(b, 4096), ResourceError);
}

TEST_CASE("operator spectrum cloud") {
  Rng rng(44);
  const BandPeriodicOp b = random_op(rng, 2, 2, 1, 2);
  const SpectrumCloud cloud = operator_spectrum(b, 32);
  CHECK(cloud.samples.size() == 32);
  CHECK(cloud.union_points().size() == 32 * 2 * 8);
  for (std::size_t r = 0; r < 32; ++r) {
    CHECK(cloud.samples[r].theta[0] == doctest::Approx(kTwoPi * r / 32.0));
    CHECK(multiset_match(cloud.samples[r].eigenvalues, real_eigs(symbol_eval(b, SymbolPoint::at(cloud.samples[r].theta[0]))), 1e-8));
  }
  CHECK_THROWS_AS(operator_spectrum(b, 8), PreconditionError);

  // The spectrum of the shift fills the unit circle.
  const SpectrumCloud sc = operator_spectrum(BandPeriodicOp::shift(2, 1, 1), 16);
  for (const auto& z : sc.union_points()) CHECK(std::abs(std::abs(z) - 1.0) <= 1e-12);
}

TEST_CASE("resolvent margin") {
  const BandPeriodicOp s = BandPeriodicOp::shift(2, 1, 1);
  CHECK(resolvent_margin(s, {0.0, 0.0}, 32) == doctest::Approx(1.0));
  CHECK(resolvent_margin(s, {3.0, 0.0}, 32) == doctest::Approx(2.0));
  CHECK(resolvent_margin(s, {1.0, 0.0}, 32) <= 1e-12);
}

TEST_CASE("csv output") {
  SpectrumCloud cloud{2, 1, 1, 0, {{{0.5}, {{1.0, 0.0}, {1.0, 0.0}, {0.0, -2.0}}}}};
  std::ostringstream os;
  write_cloud_csv(os, cloud);
  CHECK(os.str() == "theta,re,im,multiplicity\n0.5,0,-2,1\n0.5,1,0,2\n");
  std::ostringstream os2;
  write_eigen_csv(os2, {{0.25, 0.125}});
  CHECK(os2.str() == "re,im,multiplicity\n0.25,0.125,1\n");
  SpectrumCloud two{2, 1, 1, 0, {{{0.5, 1.5}, {{1.0, 0.0}}}}};
  std::ostringstream os3;
  write_cloud_csv(os3, two);
  CHECK(os3.str() == "theta_0,theta_1,re,im,multiplicity\n0.5,1.5,1,0,1\n");
}
