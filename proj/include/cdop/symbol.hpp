#ifndef CDOP_SYMBOL_HPP
#define CDOP_SYMBOL_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "cdop/cd_matrix.hpp"
#include "cdop/sequence_ops.hpp"

namespace cdop {

/// A point e^{θ𝐢} of the unit circle in C_𝐢.
struct SymbolPoint {
  double theta = 0;
  std::complex<double> m{1.0, 0.0};

  static SymbolPoint at(double theta);
  /// Throws DomainError unless | |z| - 1 | <= 1e-12.
  static SymbolPoint from_complex(std::complex<double> z);
};

/// Blocked (n·d x n·d) coefficients T_q, |q| <= Q, of an n-periodic operator.
struct BlockedCoeffs {
  std::size_t n = 1;
  std::size_t d = 1;
  int level = 0;
  std::map<long, CdMatrix> t;  ///< q -> T_q

  long max_q() const;
};

/// Q = ceil((K + n - 1) / n), the largest |q| with a possibly nonzero T_q.
long blocked_radius(const BandPeriodicOp& b);

/// T_q[(j, .), (j', .)] = C[j][q n + j' - j].
BlockedCoeffs block(const BandPeriodicOp& b);
/// Inverse of block(). Offsets that fall outside the stored coefficients are zero.
BandPeriodicOp reconstruct(const BlockedCoeffs& coeffs);

/// sum_q M^q T_q.
CdMatrix symbol_eval(const BandPeriodicOp& b, const SymbolPoint& p);
CdMatrix symbol_eval(const BlockedCoeffs& c, const SymbolPoint& p);

/// Unblocked transform: component j is sum_m C[j][m] M^{j+m} x, i.e.
/// B(D(M) x̃)(j) for the constant sequence x̃ = x. Relates to the blocked
/// symbol through def37_eval(M) x = symbol_eval(M^n) (M^{j'} x)_{j'}.
std::vector<VectorY> def37_eval(const BandPeriodicOp& b, std::complex<double> m, const VectorY& x);

/// Entries M^{s-p} B_{s,p} for s, p in [lo, hi].
CdMatrix breve_eval(const BandPeriodicOp& b, std::complex<double> m, long lo, long hi);

/// Samples symbol_eval(b) on θ_r = 2πr/N, r = 0..N-1.
std::vector<CdMatrix> sample_symbol(const BandPeriodicOp& b, std::size_t n_grid);

struct FourierCoeff {
  CdMatrix value;
  bool aliased = false;  ///< |k| >= N/2: the grid cannot separate k from k ± N
};

/// (1/N) sum_r e^{-k θ_r 𝐢} S_r for uniform samples S_r.
FourierCoeff fourier_coeff(const std::vector<CdMatrix>& samples, long k);
/// All coefficients k in (-N/2, N/2] at once, via FFT.
std::map<long, CdMatrix> fourier_coeffs(const std::vector<CdMatrix>& samples);

/// Fejér mean sum_{|k|<=m} (1 - |k|/(m+1)) M^k T_k.
CdMatrix cesaro_sum(const BlockedCoeffs& c, long m, const SymbolPoint& p);

}  // namespace cdop

#endif  // CDOP_SYMBOL_HPP
