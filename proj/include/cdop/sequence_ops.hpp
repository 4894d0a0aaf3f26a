#ifndef CDOP_SEQUENCE_OPS_HPP
#define CDOP_SEQUENCE_OPS_HPP

#include <cstddef>
#include <map>
#include <vector>

#include "cdop/cd_matrix.hpp"

namespace cdop {

/// Finitely supported two-sided sequence Z -> Y. Zero values are never stored.
class SeqFin {
 public:
  SeqFin(int level, std::size_t d) : level_(level), d_(d) {}

  int level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return d_; }

  /// Stores y at index l (erases the slot when y is zero).
  void set(long l, const VectorY& y);
  VectorY at(long l) const;
  const std::map<long, VectorY>& values() const noexcept { return values_; }

  bool empty() const noexcept { return values_.empty(); }
  long min_index() const;
  long max_index() const;

  /// sup_l ||x(l)||.
  double norm_inf() const;
  /// (sum_l ||x(l)||^p)^{1/p}, p in {1, 2}.
  double norm_p(int p) const;

  friend bool operator==(const SeqFin&, const SeqFin&) = default;

 private:
  int level_;
  std::size_t d_;
  std::map<long, VectorY> values_;
};

/// n-periodic operator of band radius K on sequences Z -> A_v^d.
///
/// Matrix entries are B_{l,s} = C[l mod n][s - l] for |s - l| <= K and zero
/// otherwise, so (Bx)(l) = sum_m C[l mod n][m] x(l + m).
class BandPeriodicOp {
 public:
  BandPeriodicOp() = default;
  /// Zero operator with the given shape.
  BandPeriodicOp(int level, std::size_t d, std::size_t n, std::size_t K);
  /// blocks[j * (2K + 1) + (m + K)] holds C[j][m].
  BandPeriodicOp(int level, std::size_t d, std::size_t n, std::size_t K, std::vector<CdMatrix> blocks);

  static BandPeriodicOp identity(int level, std::size_t d, std::size_t n = 1);
  static BandPeriodicOp zero(int level, std::size_t d) { return {level, d, 1, 0}; }
  /// S(m): (S(m)x)(k) = x(k + m).
  static BandPeriodicOp shift(int level, std::size_t d, long m);
  /// Multiplication by the periodic block sequence g(0..n-1).
  static BandPeriodicOp diag(const std::vector<CdMatrix>& period);
  /// Multiplication by the periodic scalar sequence g(0..n-1) (g(j) I).
  static BandPeriodicOp diag(const std::vector<CdComplex>& period, std::size_t d);

  int level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return d_; }
  std::size_t period() const noexcept { return n_; }
  std::size_t band() const noexcept { return K_; }

  const CdMatrix& block(std::size_t j, long m) const;
  CdMatrix& block(std::size_t j, long m);
  const std::vector<CdMatrix>& blocks() const noexcept { return blocks_; }

  /// B_{j,k}; zero block outside the band.
  CdMatrix matrix_entry(long j, long k) const;
  SeqFin apply(const SeqFin& x) const;

  /// max_j sum_m op_norm(C[j][m]).
  double op_norm_bound() const;

  /// Same operator described with period `n` (a multiple of the current one).
  BandPeriodicOp with_period(std::size_t n) const;
  /// Same operator padded to band `K` >= band(). A smaller K truncates.
  BandPeriodicOp with_band(std::size_t K) const;
  /// Drops outer offsets whose blocks all have max entry norm <= tol and
  /// reduces the period to the smallest one consistent with the blocks.
  BandPeriodicOp trimmed(double tol = 0.0) const;

  /// Dense matrix of entries B_{l,s}, l,s in [lo, hi].
  CdMatrix window_matrix(long lo, long hi) const;

  /// max over aligned entries of the coordinate difference; shapes are
  /// reconciled by lifting period and band.
  double max_abs_diff(const BandPeriodicOp& other) const;

  friend bool operator==(const BandPeriodicOp&, const BandPeriodicOp&) = default;

 private:
  std::size_t index(std::size_t j, long m) const;
  int level_ = 0;
  std::size_t d_ = 1;
  std::size_t n_ = 1;
  std::size_t K_ = 0;
  std::vector<CdMatrix> blocks_;
};

BandPeriodicOp compose(const BandPeriodicOp& a, const BandPeriodicOp& b);
BandPeriodicOp add(const BandPeriodicOp& a, const BandPeriodicOp& b);
BandPeriodicOp subtract(const BandPeriodicOp& a, const BandPeriodicOp& b);
BandPeriodicOp scale(const BandPeriodicOp& a, double s);
/// (zI)A and A(zI) for a general element z.
BandPeriodicOp scale_left(const CdComplex& z, const BandPeriodicOp& a);
BandPeriodicOp scale_right(const BandPeriodicOp& a, const CdComplex& z);

inline BandPeriodicOp operator*(const BandPeriodicOp& a, const BandPeriodicOp& b) { return compose(a, b); }
inline BandPeriodicOp operator+(const BandPeriodicOp& a, const BandPeriodicOp& b) { return add(a, b); }
inline BandPeriodicOp operator-(const BandPeriodicOp& a, const BandPeriodicOp& b) { return subtract(a, b); }

struct Classification {
  std::size_t min_period = 1;
  bool zero = true;
  long min_offset = 0;  ///< smallest m with a nonzero block (meaningless when zero)
  long max_offset = 0;
  bool diagonal_shape = true;  ///< all nonzero blocks at m = 0
  bool is_diagonal = true;     ///< shape and quasi-commutation probes agree
  double probe_residual = 0;   ///< largest quasi-commutation defect seen

  /// (k, n)-ribbon: every nonzero offset m has |m - n| < k.
  bool is_ribbon(long k, long n) const;
  bool is_periodic(std::size_t p) const { return p % min_period == 0; }
};

/// Predicates from the stored blocks, plus quasi-commutation probes
/// D(M)B against B D(M) over the window [-window, window].
Classification classify(const BandPeriodicOp& b, long window = 8, double tol = 1e-12);

/// sum over components j, k of (-1)^{kappa(j,k)} kD(M) jB minus sum of
/// jB kD(M), as a max entry norm over the window. Zero for diagonal B.
double quasi_commutation_defect(const BandPeriodicOp& b, const CdNumber& m, long lo, long hi);

}  // namespace cdop

#endif  // CDOP_SEQUENCE_OPS_HPP
