#ifndef CDOP_INVERSION_HPP
#define CDOP_INVERSION_HPP

#include <cstddef>
#include <vector>

#include "cdop/sequence_ops.hpp"
#include "cdop/symbol.hpp"

namespace cdop {

struct NeumannResult {
  BandPeriodicOp inverse;
  std::size_t terms = 0;        ///< truncation order m: powers 0..m were summed
  double norm_a = 0;            ///< block-sum bound on ||A||
  double bound = 0;             ///< ||A||^{m+1} / (1 - ||A||)
  double truncation_mass = 0;   ///< norm mass dropped by the band cap
  double residual_left = 0;     ///< op-norm bound of C(I + A) - I
  double residual_right = 0;    ///< op-norm bound of (I + A)C - I
};

/// C = sum_{k<=m} (-A)^k, inverting I + A. m is the smallest order with
/// ||A||^{m+1}/(1-||A||) <= tol, capped at max_terms. Bands wider than
/// max_band are cut and the dropped mass is accumulated.
NeumannResult neumann_inverse(const BandPeriodicOp& a, double tol = 1e-12, std::size_t max_terms = 200,
                              std::size_t max_band = 512);

struct PerturbedInverse {
  BandPeriodicOp inverse;
  std::size_t terms = 0;
  double contraction = 0;     ///< ||B|| ||Q||
  double residual = -1;       ///< ||C(A + B) - I|| when A is supplied, else -1
};

/// C = Q sum_k (-BQ)^k, a left inverse of A + B when QA = I.
/// `a` may be null; it is used only for the residual.
PerturbedInverse perturbed_left_inverse(const BandPeriodicOp& q, const BandPeriodicOp& b, const BandPeriodicOp* a,
                                        double tol = 1e-12, std::size_t max_terms = 200);

struct InvertibilityResult {
  bool invertible = false;
  double margin = 0;         ///< min over the circle of sigma_min(symbol)
  SymbolPoint witness;       ///< where the minimum sits
  std::size_t samples = 0;
};

/// Samples the symbol on a uniform grid (n_samples >= 4(Q+1)) and refines the
/// minimiser by golden-section search on its neighbouring cells.
InvertibilityResult invertibility_test(const BandPeriodicOp& b, std::size_t n_samples, double threshold = 1e-8);

/// Smallest singular value of symbol_eval(b, p), computed on the complex
/// representation.
double symbol_margin(const BlockedCoeffs& c, const SymbolPoint& p);

struct InverseReport {
  BandPeriodicOp inverse;
  double residual_right = 0;  ///< ||BD - I||, op-norm bound
  double residual_left = 0;   ///< ||DB - I||
  double tail_mass = 0;       ///< sum of ||D_q|| over dropped coefficients
  double margin = 0;
  SymbolPoint witness;
  std::size_t samples = 0;    ///< circle grid used for the coefficients
  long band_q = 0;            ///< retained blocked radius
};

/// Inverse through the sampled inverse symbol and its Fourier coefficients.
/// The grid doubles until the coefficients near the Nyquist index are
/// negligible; the kept band is the smallest with dropped mass <= tail_tol.
InverseReport wiener_invert(const BandPeriodicOp& b, std::size_t n_samples = 64, double tail_tol = 1e-10,
                            double threshold = 1e-8, std::size_t max_samples = 1 << 14);

struct LimitInverse {
  BandPeriodicOp inverse;
  std::size_t index = 0;     ///< sequence index used
  double contraction = 0;    ///< ||y_n|| ||x_n - x||
  double residual = 0;       ///< ||z_n y_n x - I||
};

/// Left inverse of x from left inverses y_n of x_n -> x.
LimitInverse left_inverse_limit(const std::vector<BandPeriodicOp>& x_seq, const std::vector<BandPeriodicOp>& y_seq,
                                const BandPeriodicOp& x, double tol = 1e-12);

}  // namespace cdop

#endif  // CDOP_INVERSION_HPP
