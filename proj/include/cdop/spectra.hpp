#ifndef CDOP_SPECTRA_HPP
#define CDOP_SPECTRA_HPP

#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

#include "cdop/cd_matrix.hpp"
#include "cdop/sequence_ops.hpp"

namespace cdop {

using Eigenvalues = std::vector<std::complex<double>>;

/// Eigenvalues of real_rep(s) with multiplicity, sorted by (re, im).
/// Obtained as eig(C) ∪ conj(eig(C)) for the complex representation C.
Eigenvalues pointwise_spectrum(const CdMatrix& s);

struct SpectrumSample {
  std::vector<double> theta;  ///< one angle per circle factor
  Eigenvalues eigenvalues;
};

struct SpectrumCloud {
  int level = 0;
  std::size_t d = 1;
  std::size_t n = 1;
  std::size_t band = 0;
  std::vector<SpectrumSample> samples;

  /// All eigenvalues of all samples, multiplicity kept.
  Eigenvalues union_points() const;
};

/// Pointwise spectra of the symbol on θ_r = 2πr/n_samples (n_samples >= 4(Q+1)).
SpectrumCloud operator_spectrum(const BandPeriodicOp& b, std::size_t n_samples);

/// Eigenvalues of the dense N-position wraparound of b; N must be a
/// multiple of the period and exceed 2Q. Throws ResourceError above
/// `max_dim` real-representation rows.
Eigenvalues circulant_oracle(const BandPeriodicOp& b, std::size_t N, std::size_t max_dim = 8192);

/// Dense N-position wraparound: entry (l, s) collects the blocks of b at
/// columns congruent to s mod N.
CdMatrix periodize(const BandPeriodicOp& b, std::size_t N);

/// Smallest singular value of periodize(b, N), by Lanczos on the inverse
/// Gram matrix with one LU factorisation. Returns 0 when the LU pivots vanish.
double periodized_min_singular_value(const BandPeriodicOp& b, std::size_t N, std::size_t max_dim = 8192);

/// Union of pointwise spectra at the roots of unity matching circulant_oracle(b, N).
Eigenvalues sampled_union_at_roots(const BandPeriodicOp& b, std::size_t N);

/// min over the θ-grid of sigma_min(symbol(M) - λ I).
double resolvent_margin(const BandPeriodicOp& b, std::complex<double> lambda, std::size_t n_samples);

/// True when a perfect matching pairs every point of `a` with a point of `b`
/// no farther than tol (bipartite threshold graph, Hopcroft-Karp).
bool multiset_match(const Eigenvalues& a, const Eigenvalues& b, double tol);
/// Smallest tol for which multiset_match succeeds (bottleneck pairing cost).
double bottleneck_distance(const Eigenvalues& a, const Eigenvalues& b);

/// One-sided Hausdorff distance sup_{x in a} inf_{y in b} |x - y|.
double hausdorff_one_sided(const Eigenvalues& a, const Eigenvalues& b);

/// CSV rows theta, re, im, multiplicity. Eigenvalues closer than 1e-9 are
/// grouped. Multi-axis clouds write theta_0..theta_{k-1}.
void write_cloud_csv(std::ostream& os, const SpectrumCloud& cloud);
void write_eigen_csv(std::ostream& os, const Eigenvalues& eig);

}  // namespace cdop

#endif  // CDOP_SPECTRA_HPP
