#include "cdop/kernel_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cdop/errors.hpp"
#include "cdop/random.hpp"

namespace cdop {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
// ∫_{-1}^{1} exp(-1/(1-x²)) dx
constexpr double kBumpMass = 0.44399381616807943;

double profile_value(Profile p, double width, double u) {
  if (p == Profile::gaussian) {
    return std::exp(-0.5 * (u / width) * (u / width)) / (width * std::sqrt(kTwoPi));
  }
  const double x = u / width;
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x)) / (width * kBumpMass);
}

double node_offset(Quadrature q) { return q == Quadrature::midpoint ? 0.5 : 0.0; }

// Per-axis in-cell indices of the lexicographic index a.
std::vector<long> split_index(std::size_t a, std::size_t G, std::size_t u) {
  std::vector<long> out(u);
  for (std::size_t j = u; j-- > 0;) {
    out[j] = static_cast<long>(a % G);
    a /= G;
  }
  return out;
}

// Visits every multi-index of the box ∏[lo_j, hi_j] in lexicographic order.
template <class F>
void for_each_index(const std::vector<long>& lo, const std::vector<long>& hi, F&& f) {
  const std::size_t u = lo.size();
  for (std::size_t j = 0; j < u; ++j)
    if (hi[j] < lo[j]) return;
  MultiIndex m = lo;
  for (;;) {
    f(static_cast<const MultiIndex&>(m));
    std::size_t j = u;
    while (j > 0) {
      --j;
      if (m[j] < hi[j]) {
        ++m[j];
        break;
      }
      m[j] = lo[j];
      if (j == 0) return;
    }
    if (u == 0) return;
  }
}

long floor_cell(double t, double period) { return static_cast<long>(std::floor(t / period + 1e-9)); }

Error::Witness index_witness(const MultiIndex& m) {
  Error::Witness w;
  for (std::size_t j = 0; j < m.size(); ++j) w["m" + std::to_string(j)] = static_cast<double>(m[j]);
  return w;
}

}  // namespace

double CellGrid::node(std::size_t j, long a) const { return (static_cast<double>(a) + node_offset(rule)) * step(j); }

std::size_t CellGrid::points_per_cell() const {
  std::size_t p = 1;
  for (std::size_t j = 0; j < axes(); ++j) p *= G;
  return p;
}

double CellGrid::weight() const {
  double w = 1.0;
  for (std::size_t j = 0; j < axes(); ++j) w *= step(j);
  return w;
}

std::vector<double> CellGrid::point(std::size_t a, std::span<const long> m) const {
  const std::vector<long> idx = split_index(a, G, axes());
  std::vector<double> out(axes());
  for (std::size_t j = 0; j < axes(); ++j) out[j] = node(j, m[j] * static_cast<long>(G) + idx[j]);
  return out;
}

double TrigPoly::operator()(double t, double period) const {
  double acc = 0;
  const double base = kTwoPi * t / period;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) acc += cos_coeffs[k] * std::cos(static_cast<double>(k) * base);
  for (std::size_t k = 1; k < sin_coeffs.size(); ++k) acc += sin_coeffs[k] * std::sin(static_cast<double>(k) * base);
  return acc;
}

CdMatrix KernelSpec::eval(std::span<const double> t, std::span<const double> s) const {
  if (t.size() != active() || s.size() != active()) throw DimensionError("kernel arguments must have one coordinate per active axis");
  switch (kind) {
    case KernelKind::zero:
      return CdMatrix(v, d, d);
    case KernelKind::difference: {
      double f = weight;
      for (std::size_t j = 0; j < active(); ++j) f *= profile_value(profile, widths[j], t[j] - s[j]);
      return coeff * f;
    }
    case KernelKind::separable: {
      CdMatrix out(v, d, d);
      for (const auto& term : terms) {
        bool near = true;
        for (std::size_t j = 0; j < active(); ++j)
          if (std::labs(floor_cell(t[j], periods[j]) - floor_cell(s[j], periods[j])) > term.reach) near = false;
        if (!near) continue;
        double f = 1.0;
        for (std::size_t j = 0; j < active(); ++j) f *= term.phi[j](t[j], periods[j]) * term.psi[j](s[j], periods[j]);
        out += term.coeff * f;
      }
      return out;
    }
    case KernelKind::table: {
      const std::size_t G = table_grid;
      MultiIndex m(active());
      std::size_t a = 0, c = 0;
      for (std::size_t j = 0; j < active(); ++j) {
        const double h = periods[j] / static_cast<double>(G);
        const double gt = t[j] / h, gs = s[j] / h;
        const long it = std::lround(gt), is = std::lround(gs);
        if (std::abs(gt - static_cast<double>(it)) > 1e-9 || std::abs(gs - static_cast<double>(is)) > 1e-9) {
          throw DomainError("table kernels are defined on grid nodes only");
        }
        const long Gl = static_cast<long>(G);
        const long ct = it >= 0 ? it / Gl : -((-it + Gl - 1) / Gl);
        const long cs = is >= 0 ? is / Gl : -((-is + Gl - 1) / Gl);
        m[j] = cs - ct;
        a = a * G + static_cast<std::size_t>(it - ct * Gl);
        c = c * G + static_cast<std::size_t>(is - cs * Gl);
      }
      const auto found = table.find(m);
      if (found == table.end()) return CdMatrix(v, d, d);
      return found->second.block(a * d, c * d, d, d);
    }
    case KernelKind::custom:
      return fn(t, s);
  }
  return CdMatrix(v, d, d);
}

KernelSpec KernelSpec::zero(std::size_t d, std::vector<double> periods, int v) {
  KernelSpec k;
  k.v = v;
  k.d = d;
  k.axes.clear();
  for (std::size_t j = 0; j < periods.size(); ++j) k.axes.push_back(j);
  k.periods = std::move(periods);
  k.kind = KernelKind::zero;
  k.c1 = 0;
  return k;
}

KernelSpec KernelSpec::difference(const CdMatrix& coeff, double weight, Profile profile, std::vector<double> widths,
                                  std::vector<double> periods) {
  if (!coeff.square()) throw DimensionError("difference kernel coefficient must be square");
  if (widths.size() != periods.size()) throw DimensionError("one width per active axis");
  KernelSpec k = zero(coeff.rows(), std::move(periods), coeff.level());
  k.kind = KernelKind::difference;
  k.coeff = coeff;
  k.weight = weight;
  k.profile = profile;
  k.widths = std::move(widths);
  k.c1 = -1;
  return k;
}

KernelSpec KernelSpec::separable(std::vector<SeparableTerm> terms, std::vector<double> periods) {
  if (terms.empty()) throw PreconditionError("separable kernel needs at least one term");
  KernelSpec k = zero(terms.front().coeff.rows(), std::move(periods), terms.front().coeff.level());
  k.kind = KernelKind::separable;
  for (const auto& t : terms)
    if (t.phi.size() != k.active() || t.psi.size() != k.active()) throw DimensionError("one trig factor per active axis");
  k.terms = std::move(terms);
  k.c1 = -1;
  return k;
}

KernelCheck check_kernel(const KernelSpec& k, const CellGrid& grid, Rng& rng, std::size_t n_pairs) {
  KernelCheck out;
  const std::size_t u = k.active();
  const std::size_t P = grid.points_per_cell();
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::size_t a = static_cast<std::size_t>(rng.integer(0, static_cast<long>(P) - 1));
    const std::size_t c = static_cast<std::size_t>(rng.integer(0, static_cast<long>(P) - 1));
    MultiIndex zero(u, 0), mc(u), p(u), tp(u), sp(u);
    for (std::size_t j = 0; j < u; ++j) {
      mc[j] = rng.integer(-2, 2);
      p[j] = rng.integer(-3, 3);
      tp[j] = p[j];
      sp[j] = mc[j] + p[j];
    }
    const auto t = grid.point(a, zero), s = grid.point(c, mc);
    const auto t2 = grid.point(a, tp), s2 = grid.point(c, sp);
    const CdMatrix k0 = k.eval(t, s);
    out.periodicity_defect = std::max(out.periodicity_defect, (k.eval(t2, s2) - k0).max_entry_norm());
    out.sampled_sup = std::max(out.sampled_sup, k0.op_norm_bound());
  }
  return out;
}

BlockedKernelOp::BlockedKernelOp(int level, std::size_t d, CellGrid grid, std::vector<long> band)
    : level_(level), d_(d), grid_(std::move(grid)), band_(std::move(band)) {
  if (band_.size() != grid_.axes()) throw DimensionError("one band radius per active axis");
  for (long b : band_)
    if (b < 0) throw DomainError("band radii must be non-negative");
}

CdMatrix BlockedKernelOp::q(const MultiIndex& m) const {
  const auto it = q_.find(m);
  if (it == q_.end()) return CdMatrix(level_, block_dim(), block_dim());
  return it->second;
}

void BlockedKernelOp::set_q(const MultiIndex& m, CdMatrix block) {
  if (m.size() != axes()) throw DimensionError("multi-index length must match the axes");
  for (std::size_t j = 0; j < axes(); ++j)
    if (std::labs(m[j]) > band_[j]) throw DomainError("multi-index outside the band");
  if (block.rows() != block_dim() || block.cols() != block_dim() || block.level() != level_) {
    throw DimensionError("block shape does not match the cell grid");
  }
  if (block.is_zero()) {
    q_.erase(m);
  } else {
    q_[m] = std::move(block);
  }
}

CdMatrix BlockedKernelOp::symbol_q(std::span<const std::complex<double>> m) const {
  if (m.size() != axes()) throw DimensionError("one circle point per axis");
  CdMatrix out(level_, block_dim(), block_dim());
  for (const auto& [idx, block] : q_) {
    std::complex<double> f = 1.0;
    for (std::size_t j = 0; j < axes(); ++j) {
      const double r = std::abs(m[j]);
      f *= std::abs(r - 1.0) < 1e-14 ? std::polar(1.0, static_cast<double>(idx[j]) * std::arg(m[j]))
                                      : std::pow(m[j], static_cast<double>(idx[j]));
    }
    out += f * block;
  }
  return out;
}

CdMatrix BlockedKernelOp::symbol_a(std::span<const std::complex<double>> m) const {
  return CdMatrix::identity(level_, block_dim()) - symbol_q(m);
}

CdMatrix BlockedKernelOp::symbol_a_at(std::span<const double> theta) const {
  std::vector<std::complex<double>> m;
  for (double t : theta) m.push_back(std::polar(1.0, t));
  return symbol_a(m);
}

double BlockedKernelOp::q_norm_bound() const {
  double s = 0;
  for (const auto& [idx, block] : q_) s += block.op_norm_bound();
  return s;
}

MultiSeq BlockedKernelOp::apply_q(const MultiSeq& y) const {
  MultiSeq out;
  for (const auto& [k, col] : y) {
    if (col.rows() != block_dim()) throw DimensionError("cell column size does not match the blocks");
    CdMatrix acc(level_, block_dim(), 1);
    for (const auto& [m, block] : q_) {
      MultiIndex km = k;
      for (std::size_t j = 0; j < km.size(); ++j) km[j] += m[j];
      const auto it = y.find(km);
      if (it != y.end()) CdMatrix::mul_acc(block, it->second, acc);
    }
    out.emplace(k, std::move(acc));
  }
  return out;
}

BandPeriodicOp BlockedKernelOp::q_band_op() const {
  if (axes() != 1) throw PreconditionError("band-operator form needs exactly one active axis");
  const long K = band_[0];
  std::vector<CdMatrix> blocks;
  for (long m = -K; m <= K; ++m) blocks.push_back(q(MultiIndex{m}));
  return BandPeriodicOp(level_, block_dim(), 1, static_cast<std::size_t>(K), std::move(blocks));
}

BandPeriodicOp BlockedKernelOp::to_band_op() const {
  return subtract(BandPeriodicOp::identity(level_, block_dim()), q_band_op());
}

BlockedKernelOp discretize(const KernelSpec& k, const CellGrid& grid, std::vector<long> band, double tail_tol) {
  const std::size_t u = k.active();
  if (grid.axes() != u || k.periods.size() != u) throw DimensionError("grid, periods and active axes disagree");
  const std::size_t axis_count = std::size_t{1} << k.w;
  for (std::size_t a : k.axes)
    if (a >= axis_count) throw DomainError("active axis outside the basis of A_w", {{"axis", static_cast<double>(a)}});
  for (std::size_t j = 0; j < u; ++j)
    if (std::abs(grid.periods[j] - k.periods[j]) > 1e-12 * k.periods[j]) throw AlignmentError("grid periods differ from the kernel periods");
  if (grid.G == 0) throw DomainError("grid needs at least one node per cell");
  if (k.kind == KernelKind::table && (k.table_grid != grid.G || grid.rule != Quadrature::trapezoid)) {
    throw PreconditionError("table kernels fix the trapezoid grid they were tabulated on",
                            {{"table_grid", static_cast<double>(k.table_grid)}, {"grid", static_cast<double>(grid.G)}});
  }

  BlockedKernelOp op(k.v, k.d, grid, band);
  const std::size_t P = grid.points_per_cell();
  const std::size_t d = k.d;
  const double w = grid.weight();
  long rmax = 0;
  for (long b : band) rmax = std::max(rmax, b);
  op.decay.assign(static_cast<std::size_t>(rmax + 2), 0.0);

  std::vector<long> lo(u), hi(u);
  for (std::size_t j = 0; j < u; ++j) {
    lo[j] = -(band[j] + 1);
    hi[j] = band[j] + 1;
  }
  double sup = 0, inner_max = 0, tail = 0;
  MultiIndex tail_at;
  const MultiIndex zero(u, 0);
  for_each_index(lo, hi, [&](const MultiIndex& m) {
    CdMatrix block(k.v, P * d, P * d);
    if (k.kind == KernelKind::table) {
      const auto it = k.table.find(m);
      if (it != k.table.end()) {
        block = it->second;
        for (std::size_t a = 0; a < P; ++a)
          for (std::size_t c = 0; c < P; ++c) sup = std::max(sup, it->second.block(a * d, c * d, d, d).op_norm_bound());
        block *= w;
      }
    } else if (k.kind != KernelKind::zero) {
      for (std::size_t a = 0; a < P; ++a) {
        const auto t = grid.point(a, zero);
        for (std::size_t c = 0; c < P; ++c) {
          const CdMatrix kv = k.eval(t, grid.point(c, m));
          sup = std::max(sup, kv.op_norm_bound());
          block.set_block(a * d, c * d, kv * w);
        }
      }
    }
    const double nb = block.op_norm_bound();
    long r = 0;
    bool inside = true;
    for (std::size_t j = 0; j < u; ++j) {
      r = std::max(r, std::labs(m[j]));
      if (std::labs(m[j]) > band[j]) inside = false;
    }
    op.decay[static_cast<std::size_t>(std::min(r, rmax + 1))] = std::max(op.decay[static_cast<std::size_t>(std::min(r, rmax + 1))], nb);
    if (inside) {
      inner_max = std::max(inner_max, nb);
      op.set_q(m, std::move(block));
    } else if (nb > tail) {
      tail = nb;
      tail_at = m;
    }
  });
  if (k.c1 >= 0 && sup > k.c1 * (1 + 1e-12)) {
    throw PreconditionError("sampled kernel norm exceeds the declared bound c1", {{"sampled_sup", sup}, {"c1", k.c1}});
  }
  if (tail > tail_tol * std::max(1.0, inner_max)) {
    Error::Witness wt = index_witness(tail_at);
    wt["tail_norm"] = tail;
    throw ResourceError("kernel blocks do not decay within the band budget", wt);
  }
  return op;
}

std::size_t GridFunction::size() const {
  std::size_t n = 1;
  for (std::size_t j = 0; j < cells.size(); ++j) n *= nodes(j);
  return n;
}

std::vector<double> GridFunction::coords(std::size_t flat) const {
  const std::size_t u = cells.size();
  std::vector<double> out(u);
  for (std::size_t j = u; j-- > 0;) {
    const std::size_t nj = nodes(j);
    const long g = cell_lo[j] * static_cast<long>(grid.G) + static_cast<long>(flat % nj);
    out[j] = grid.node(j, g);
    flat /= nj;
  }
  return out;
}

GridFunction GridFunction::from_samples(int level, std::size_t d, const CellGrid& grid, std::vector<double> origin,
                                        std::vector<double> step, std::vector<std::size_t> counts,
                                        std::vector<VectorY> values) {
  const std::size_t u = grid.axes();
  if (origin.size() != u || step.size() != u || counts.size() != u) throw DimensionError("one origin, step and count per axis");
  GridFunction g;
  g.level = level;
  g.d = d;
  g.grid = grid;
  for (std::size_t j = 0; j < u; ++j) {
    const double h = grid.step(j);
    if (std::abs(step[j] - h) > 1e-12 * h) {
      throw AlignmentError("sample step differs from period / G", {{"axis", static_cast<double>(j)}, {"step", step[j]}, {"expected", h}});
    }
    const double pos = origin[j] / h - node_offset(grid.rule);
    const double cell = pos / static_cast<double>(grid.G);
    const double rc = std::round(cell);
    if (std::abs(cell - rc) > 1e-9) {
      throw AlignmentError("sample origin is not the first node of a cell", {{"axis", static_cast<double>(j)}, {"origin", origin[j]}});
    }
    if (counts[j] % grid.G != 0) {
      throw AlignmentError("sample count is not a whole number of cells", {{"axis", static_cast<double>(j)}, {"count", static_cast<double>(counts[j])}});
    }
    g.cell_lo.push_back(static_cast<long>(rc));
    g.cells.push_back(counts[j] / grid.G);
  }
  if (values.size() != g.size()) throw DimensionError("sample count does not match the grid box");
  for (const auto& y : values)
    if (y.dim() != d || y.level() != level) throw DimensionError("sample fibre shape mismatch");
  g.values = std::move(values);
  return g;
}

double GridFunction::norm_inf() const {
  double m = 0;
  for (const auto& y : values) m = std::max(m, y.norm());
  return m;
}

MultiSeq rearrange(const GridFunction& x) {
  const std::size_t u = x.cells.size();
  const std::size_t G = x.grid.G;
  const std::size_t P = x.grid.points_per_cell();
  std::vector<long> lo(u), hi(u);
  for (std::size_t j = 0; j < u; ++j) {
    lo[j] = x.cell_lo[j];
    hi[j] = x.cell_lo[j] + static_cast<long>(x.cells[j]) - 1;
  }
  MultiSeq out;
  for_each_index(lo, hi, [&](const MultiIndex& m) {
    CdMatrix col(x.level, P * x.d, 1);
    for (std::size_t a = 0; a < P; ++a) {
      const std::vector<long> idx = split_index(a, G, u);
      std::size_t flat = 0;
      for (std::size_t j = 0; j < u; ++j) {
        flat = flat * x.nodes(j) + static_cast<std::size_t>((m[j] - x.cell_lo[j]) * static_cast<long>(G) + idx[j]);
      }
      col.set_block(a * x.d, 0, x.values[flat].as_column());
    }
    out.emplace(m, std::move(col));
  });
  return out;
}

GridFunction unrearrange(const MultiSeq& y, int level, std::size_t d, const CellGrid& grid) {
  const std::size_t u = grid.axes();
  GridFunction x;
  x.level = level;
  x.d = d;
  x.grid = grid;
  if (y.empty()) {
    x.cell_lo.assign(u, 0);
    x.cells.assign(u, 0);
    return x;
  }
  std::vector<long> lo(u, std::numeric_limits<long>::max()), hi(u, std::numeric_limits<long>::min());
  for (const auto& [m, col] : y) {
    if (m.size() != u) throw DimensionError("multi-index length must match the axes");
    if (col.rows() != grid.points_per_cell() * d) throw DimensionError("cell column size does not match the grid");
    for (std::size_t j = 0; j < u; ++j) {
      lo[j] = std::min(lo[j], m[j]);
      hi[j] = std::max(hi[j], m[j]);
    }
  }
  x.cell_lo = lo;
  for (std::size_t j = 0; j < u; ++j) x.cells.push_back(static_cast<std::size_t>(hi[j] - lo[j] + 1));
  x.values.assign(x.size(), VectorY(level, d));
  const std::size_t G = grid.G, P = grid.points_per_cell();
  for (const auto& [m, col] : y)
    for (std::size_t a = 0; a < P; ++a) {
      const std::vector<long> idx = split_index(a, G, u);
      std::size_t flat = 0;
      for (std::size_t j = 0; j < u; ++j) flat = flat * x.nodes(j) + static_cast<std::size_t>((m[j] - lo[j]) * static_cast<long>(G) + idx[j]);
      x.values[flat] = VectorY::from_column(col.block(a * d, 0, d, 1));
    }
  return x;
}

GridFunction apply_direct(const KernelSpec& k, const GridFunction& x) {
  GridFunction out = x;
  const double w = x.grid.weight();
  std::vector<std::vector<double>> pts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pts[i] = x.coords(i);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CdMatrix acc(x.level, x.d, 1);
    for (std::size_t s = 0; s < x.size(); ++s) {
      if (x.values[s].is_zero()) continue;
      CdMatrix::mul_acc(k.eval(pts[i], pts[s]), x.values[s].as_column(), acc, w);
    }
    out.values[i] = VectorY::from_column(std::move(acc));
  }
  return out;
}

namespace {

double torus_margin(const BlockedKernelOp& op, const std::vector<double>& theta) {
  return min_singular_value(op.symbol_a_at(theta));
}

}  // namespace

TorusResult torus_invertibility(const BlockedKernelOp& op, std::size_t samples, double threshold) {
  const std::size_t u = op.axes();
  long rmax = 0;
  for (long b : op.band()) rmax = std::max(rmax, b);
  if (samples < 4 * static_cast<std::size_t>(rmax + 1)) {
    throw PreconditionError("too few torus samples for the band", {{"samples", static_cast<double>(samples)}});
  }
  TorusResult r;
  r.samples = samples;
  r.margin = std::numeric_limits<double>::infinity();
  const double h = kTwoPi / static_cast<double>(samples);
  std::vector<long> lo(u, 0), hi(u, static_cast<long>(samples) - 1);
  std::vector<double> best(u, 0.0);
  for_each_index(lo, hi, [&](const MultiIndex& idx) {
    std::vector<double> th(u);
    for (std::size_t j = 0; j < u; ++j) th[j] = h * static_cast<double>(idx[j]);
    const double s = torus_margin(op, th);
    if (s < r.margin) {
      r.margin = s;
      best = th;
    }
  });
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int round = 0; round < 2; ++round)
    for (std::size_t j = 0; j < u; ++j) {
      std::vector<double> th = best;
      auto f = [&](double x) {
        th[j] = x;
        return torus_margin(op, th);
      };
      double a = best[j] - h, b = best[j] + h;
      double x1 = b - g * (b - a), x2 = a + g * (b - a);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - g * (b - a);
          f1 = f(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + g * (b - a);
          f2 = f(x2);
        }
      }
      const double xr = f1 < f2 ? x1 : x2, fr = std::min(f1, f2);
      if (fr < r.margin) {
        r.margin = fr;
        best[j] = xr;
      }
    }
  for (double& t : best) {
    t = std::fmod(t, kTwoPi);
    if (t < 0) t += kTwoPi;
    if (t >= kTwoPi) t -= kTwoPi;
  }
  r.witness = best;
  r.invertible = r.margin > threshold;
  return r;
}

SpectrumCloud kernel_spectrum(const BlockedKernelOp& op, std::size_t samples) {
  if (samples == 0) throw DomainError("kernel_spectrum needs samples");
  const std::size_t u = op.axes();
  long rmax = 0;
  for (long b : op.band()) rmax = std::max(rmax, b);
  SpectrumCloud cloud{op.level(), op.block_dim(), 1, static_cast<std::size_t>(rmax), {}};
  const double h = kTwoPi / static_cast<double>(samples);
  std::vector<long> lo(u, 0), hi(u, static_cast<long>(samples) - 1);
  for_each_index(lo, hi, [&](const MultiIndex& idx) {
    std::vector<double> th(u);
    for (std::size_t j = 0; j < u; ++j) th[j] = h * static_cast<double>(idx[j]);
    cloud.samples.push_back({th, pointwise_spectrum(op.symbol_a_at(th))});
  });
  return cloud;
}

}  // namespace cdop
