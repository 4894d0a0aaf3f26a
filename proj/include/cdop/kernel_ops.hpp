#ifndef CDOP_KERNEL_OPS_HPP
#define CDOP_KERNEL_OPS_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdop/cd_matrix.hpp"
#include "cdop/sequence_ops.hpp"
#include "cdop/spectra.hpp"

namespace cdop {

class Rng;

enum class Quadrature { trapezoid, midpoint };

/// Cell lattice of the integration variable on the active axes. Each cell
/// [0, ω_j) carries G nodes per axis: a·h_j (trapezoid) or (a + 1/2)·h_j
/// (midpoint), h_j = ω_j / G.
struct CellGrid {
  std::vector<double> periods;
  std::size_t G = 8;
  Quadrature rule = Quadrature::trapezoid;

  std::size_t axes() const noexcept { return periods.size(); }
  double step(std::size_t j) const { return periods[j] / static_cast<double>(G); }
  double node(std::size_t j, long a) const;
  /// G^u.
  std::size_t points_per_cell() const;
  /// Product of the steps.
  double weight() const;
  /// Node coordinates of in-cell index a (lexicographic, axis 0 slowest)
  /// translated by the cell m.
  std::vector<double> point(std::size_t a, std::span<const long> m) const;
};

/// Trigonometric polynomial sum_k cos_k cos(2πk t/ω) + sin_k sin(2πk t/ω).
struct TrigPoly {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  double operator()(double t, double period) const;
};

enum class KernelKind { zero, difference, separable, table, custom };
enum class Profile { gaussian, bump };

struct SeparableTerm {
  CdMatrix coeff;               ///< d x d
  std::vector<TrigPoly> phi;    ///< one per active axis, in t
  std::vector<TrigPoly> psi;    ///< one per active axis, in s
  long reach = 0;               ///< cells of t and s at most this far apart
};

/// Periodic integral kernel K(t, s) on the active axes of A_w with d x d
/// fibres of level v.
struct KernelSpec {
  int w = 2;
  std::vector<std::size_t> axes{0};
  std::vector<double> periods{1.0};
  int v = 2;
  std::size_t d = 1;
  double c1 = -1;  ///< declared sup bound; negative means undeclared
  KernelKind kind = KernelKind::zero;

  // difference: weight · coeff · ∏_j p_j(t_j - s_j) / ∫p_j
  CdMatrix coeff;
  double weight = 0;
  Profile profile = Profile::gaussian;
  std::vector<double> widths;  ///< gaussian σ or bump radius, per axis

  std::vector<SeparableTerm> terms;

  // table: node values K(τ_a, τ_c + m̄ω) for a fixed grid size
  std::size_t table_grid = 0;
  std::map<std::vector<long>, CdMatrix> table;

  std::function<CdMatrix(std::span<const double>, std::span<const double>)> fn;

  std::size_t active() const noexcept { return axes.size(); }
  /// K(t, s); table kernels accept node coordinates only.
  CdMatrix eval(std::span<const double> t, std::span<const double> s) const;

  static KernelSpec zero(std::size_t d, std::vector<double> periods, int v = 2);
  static KernelSpec difference(const CdMatrix& coeff, double weight, Profile profile, std::vector<double> widths,
                               std::vector<double> periods);
  static KernelSpec separable(std::vector<SeparableTerm> terms, std::vector<double> periods);
};

/// Max defect |K(t + pω, s + pω) - K(t, s)| over random node pairs and
/// integer shifts p, and the sampled sup of ||K||.
struct KernelCheck {
  double periodicity_defect = 0;
  double sampled_sup = 0;
};
KernelCheck check_kernel(const KernelSpec& k, const CellGrid& grid, Rng& rng, std::size_t n_pairs = 200);

using MultiIndex = std::vector<long>;
/// Cell-indexed columns of P·d entries, P = points per cell.
using MultiSeq = std::map<MultiIndex, CdMatrix>;

/// Blocks Q_m̄ of the rearranged quadrature operator. The discretised
/// integral operator acts as (Qy)(k̄) = sum_m̄ Q_m̄ y(k̄ + m̄); the operator
/// under study is A = I - Q.
class BlockedKernelOp {
 public:
  BlockedKernelOp() = default;
  BlockedKernelOp(int level, std::size_t d, CellGrid grid, std::vector<long> band);

  int level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return d_; }
  const CellGrid& grid() const noexcept { return grid_; }
  std::size_t axes() const noexcept { return band_.size(); }
  const std::vector<long>& band() const noexcept { return band_; }
  /// P·d.
  std::size_t block_dim() const { return grid_.points_per_cell() * d_; }

  const std::map<MultiIndex, CdMatrix>& blocks() const noexcept { return q_; }
  /// Zero block when m̄ lies outside the band.
  CdMatrix q(const MultiIndex& m) const;
  void set_q(const MultiIndex& m, CdMatrix block);

  /// max ||Q_m̄||_bound over |m̄|_∞ = r, for r = 0 .. band+1 (the last ring
  /// is the tail probe computed during discretisation).
  std::vector<double> decay;

  /// sum_m̄ ∏_j M_j^{m_j} Q_m̄.
  CdMatrix symbol_q(std::span<const std::complex<double>> m) const;
  /// I - symbol_q.
  CdMatrix symbol_a(std::span<const std::complex<double>> m) const;
  /// Angles instead of circle points.
  CdMatrix symbol_a_at(std::span<const double> theta) const;

  /// sum_m̄ ||Q_m̄||_bound.
  double q_norm_bound() const;

  MultiSeq apply_q(const MultiSeq& y) const;

  /// One active axis: A = I - Q as a 1-periodic band operator on P·d fibres.
  BandPeriodicOp to_band_op() const;
  /// Q alone in the same form.
  BandPeriodicOp q_band_op() const;

 private:
  int level_ = 2;
  std::size_t d_ = 1;
  CellGrid grid_;
  std::vector<long> band_;
  std::map<MultiIndex, CdMatrix> q_;
};

/// Fills Q_m̄ by quadrature for |m_j| <= band_j. The ring just outside the
/// band is also evaluated; if its blocks exceed tail_tol the band budget is
/// too small (ResourceError). Sampled node values above a declared c1 raise
/// PreconditionError.
BlockedKernelOp discretize(const KernelSpec& k, const CellGrid& grid, std::vector<long> band, double tail_tol = 1e-12);

/// Grid samples x(node) over a box of whole cells.
struct GridFunction {
  int level = 2;
  std::size_t d = 1;
  CellGrid grid;
  std::vector<long> cell_lo;      ///< first cell per axis
  std::vector<std::size_t> cells; ///< cell count per axis
  std::vector<VectorY> values;    ///< lexicographic over global nodes, axis 0 slowest

  std::size_t nodes(std::size_t j) const { return cells[j] * grid.G; }
  std::size_t size() const;
  /// Global node coordinates of flat index.
  std::vector<double> coords(std::size_t flat) const;

  /// Validates alignment: the step must be ω_j/G, the origin a cell
  /// boundary node, and each count a multiple of G (AlignmentError).
  static GridFunction from_samples(int level, std::size_t d, const CellGrid& grid, std::vector<double> origin,
                                   std::vector<double> step, std::vector<std::size_t> counts, std::vector<VectorY> values);

  double norm_inf() const;
};

/// y(m̄)[a] = x(τ_a + m̄ω) for every cell of the box.
MultiSeq rearrange(const GridFunction& x);
/// Inverse of rearrange; cells missing from y are zero. The box is the
/// bounding box of the keys.
GridFunction unrearrange(const MultiSeq& y, int level, std::size_t d, const CellGrid& grid);

/// (Bx)(t) = sum over the nodes s of the box of weight·K(t, s) x(s), on the
/// same box.
GridFunction apply_direct(const KernelSpec& k, const GridFunction& x);

struct TorusResult {
  bool invertible = false;
  double margin = 0;              ///< min sigma_min of the symbol of A
  std::vector<double> witness;    ///< angles of the minimiser
  std::size_t samples = 0;        ///< per axis
};

/// Tensor grid of samples per axis, then coordinate-wise golden-section
/// refinement around the grid minimiser.
TorusResult torus_invertibility(const BlockedKernelOp& op, std::size_t samples, double threshold = 1e-8);

/// Pointwise spectra of the symbol of A over the tensor grid.
SpectrumCloud kernel_spectrum(const BlockedKernelOp& op, std::size_t samples);

}  // namespace cdop

#endif  // CDOP_KERNEL_OPS_HPP
