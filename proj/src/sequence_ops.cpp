#include "cdop/sequence_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdop/errors.hpp"

namespace cdop {

namespace {

long mod(long a, long n) {
  const long r = a % n;
  return r < 0 ? r + n : r;
}

void require_compatible(const BandPeriodicOp& a, const BandPeriodicOp& b, const char* what) {
  if (a.level() != b.level() || a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": operators act on different spaces");
  }
}

// Lifts both operators to a common period and band.
std::pair<BandPeriodicOp, BandPeriodicOp> reconcile(const BandPeriodicOp& a, const BandPeriodicOp& b) {
  const std::size_t n = std::lcm(a.period(), b.period());
  const std::size_t K = std::max(a.band(), b.band());
  return {a.with_period(n).with_band(K), b.with_period(n).with_band(K)};
}

}  // namespace

// ---------------------------------------------------------------- SeqFin

void SeqFin::set(long l, const VectorY& y) {
  if (y.level() != level_ || y.dim() != d_) throw DimensionError("SeqFin::set: value of the wrong shape");
  if (y.is_zero()) {
    values_.erase(l);
  } else {
    values_.insert_or_assign(l, y);
  }
}

VectorY SeqFin::at(long l) const {
  const auto it = values_.find(l);
  return it == values_.end() ? VectorY(level_, d_) : it->second;
}

long SeqFin::min_index() const {
  if (values_.empty()) throw PreconditionError("empty sequence has no support");
  return values_.begin()->first;
}

long SeqFin::max_index() const {
  if (values_.empty()) throw PreconditionError("empty sequence has no support");
  return values_.rbegin()->first;
}

double SeqFin::norm_inf() const {
  double best = 0;
  for (const auto& [l, y] : values_) best = std::max(best, y.norm());
  return best;
}

double SeqFin::norm_p(int p) const {
  if (p != 1 && p != 2) throw DomainError("norm_p supports p = 1 or 2");
  double s = 0;
  for (const auto& [l, y] : values_) s += p == 1 ? y.norm() : y.norm() * y.norm();
  return p == 1 ? s : std::sqrt(s);
}

// ---------------------------------------------------------------- BandPeriodicOp

BandPeriodicOp::BandPeriodicOp(int level, std::size_t d, std::size_t n, std::size_t K)
    : level_(level), d_(d), n_(n), K_(K), blocks_(n * (2 * K + 1), CdMatrix(level, d, d)) {
  if (n == 0) throw DomainError("period must be at least 1");
  if (d == 0) throw DomainError("fiber dimension must be at least 1");
}

BandPeriodicOp::BandPeriodicOp(int level, std::size_t d, std::size_t n, std::size_t K, std::vector<CdMatrix> blocks)
    : level_(level), d_(d), n_(n), K_(K), blocks_(std::move(blocks)) {
  if (n == 0) throw DomainError("period must be at least 1");
  if (blocks_.size() != n * (2 * K + 1)) throw DimensionError("expected n(2K+1) blocks");
  for (const auto& b : blocks_) {
    if (b.level() != level || b.rows() != d || b.cols() != d) throw DimensionError("block of the wrong shape");
  }
}

BandPeriodicOp BandPeriodicOp::identity(int level, std::size_t d, std::size_t n) {
  BandPeriodicOp op(level, d, n, 0);
  for (std::size_t j = 0; j < n; ++j) op.block(j, 0) = CdMatrix::identity(level, d);
  return op;
}

BandPeriodicOp BandPeriodicOp::shift(int level, std::size_t d, long m) {
  BandPeriodicOp op(level, d, 1, static_cast<std::size_t>(std::labs(m)));
  op.block(0, m) = CdMatrix::identity(level, d);
  return op;
}

BandPeriodicOp BandPeriodicOp::diag(const std::vector<CdMatrix>& period) {
  if (period.empty()) throw DomainError("diag needs at least one period value");
  const auto& g0 = period.front();
  BandPeriodicOp op(g0.level(), g0.rows(), period.size(), 0);
  for (std::size_t j = 0; j < period.size(); ++j) {
    if (!period[j].square() || period[j].rows() != g0.rows() || period[j].level() != g0.level())
      throw DimensionError("diag: inconsistent block shapes");
    op.block(j, 0) = period[j];
  }
  return op;
}

BandPeriodicOp BandPeriodicOp::diag(const std::vector<CdComplex>& period, std::size_t d) {
  std::vector<CdMatrix> blocks;
  blocks.reserve(period.size());
  for (const auto& g : period) blocks.push_back(CdMatrix::scalar(g, d));
  return diag(blocks);
}

std::size_t BandPeriodicOp::index(std::size_t j, long m) const {
  if (j >= n_ || std::labs(m) > static_cast<long>(K_)) throw DomainError("block index outside the stored band");
  return j * (2 * K_ + 1) + static_cast<std::size_t>(m + static_cast<long>(K_));
}

const CdMatrix& BandPeriodicOp::block(std::size_t j, long m) const { return blocks_[index(j, m)]; }
CdMatrix& BandPeriodicOp::block(std::size_t j, long m) { return blocks_[index(j, m)]; }

CdMatrix BandPeriodicOp::matrix_entry(long j, long k) const {
  const long m = k - j;
  if (std::labs(m) > static_cast<long>(K_)) return CdMatrix(level_, d_, d_);
  return block(static_cast<std::size_t>(mod(j, static_cast<long>(n_))), m);
}

SeqFin BandPeriodicOp::apply(const SeqFin& x) const {
  if (x.level() != level_ || x.dim() != d_) throw DimensionError("apply: sequence and operator shapes differ");
  SeqFin out(level_, d_);
  if (x.empty()) return out;
  const long K = static_cast<long>(K_);
  for (long l = x.min_index() - K; l <= x.max_index() + K; ++l) {
    CdMatrix acc(level_, d_, 1);
    const std::size_t j = static_cast<std::size_t>(mod(l, static_cast<long>(n_)));
    for (long m = -K; m <= K; ++m) {
      const auto it = x.values().find(l + m);
      if (it == x.values().end()) continue;
      CdMatrix::mul_acc(block(j, m), it->second.as_column(), acc);
    }
    out.set(l, VectorY::from_column(std::move(acc)));
  }
  return out;
}

double BandPeriodicOp::op_norm_bound() const {
  double best = 0;
  const long K = static_cast<long>(K_);
  for (std::size_t j = 0; j < n_; ++j) {
    double s = 0;
    for (long m = -K; m <= K; ++m) s += block(j, m).op_norm_bound();
    best = std::max(best, s);
  }
  return best;
}

BandPeriodicOp BandPeriodicOp::with_period(std::size_t n) const {
  if (n == 0 || n % n_ != 0) throw DomainError("new period must be a multiple of the current one");
  BandPeriodicOp out(level_, d_, n, K_);
  const long K = static_cast<long>(K_);
  for (std::size_t j = 0; j < n; ++j)
    for (long m = -K; m <= K; ++m) out.block(j, m) = block(j % n_, m);
  return out;
}

BandPeriodicOp BandPeriodicOp::with_band(std::size_t K) const {
  BandPeriodicOp out(level_, d_, n_, K);
  const long lim = static_cast<long>(std::min(K, K_));
  for (std::size_t j = 0; j < n_; ++j)
    for (long m = -lim; m <= lim; ++m) out.block(j, m) = block(j, m);
  return out;
}

BandPeriodicOp BandPeriodicOp::trimmed(double tol) const {
  const long K = static_cast<long>(K_);
  long keep = 0;
  for (long m = -K; m <= K; ++m) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (block(j, m).max_entry_norm() > tol) keep = std::max(keep, std::labs(m));
    }
  }
  BandPeriodicOp banded = with_band(static_cast<std::size_t>(keep));
  for (std::size_t p = 1; p < n_; ++p) {
    if (n_ % p != 0) continue;
    bool ok = true;
    for (std::size_t j = p; j < n_ && ok; ++j)
      for (long m = -keep; m <= keep && ok; ++m) ok = banded.block(j, m) == banded.block(j % p, m);
    if (!ok) continue;
    BandPeriodicOp out(level_, d_, p, static_cast<std::size_t>(keep));
    for (std::size_t j = 0; j < p; ++j)
      for (long m = -keep; m <= keep; ++m) out.block(j, m) = banded.block(j, m);
    return out;
  }
  return banded;
}

CdMatrix BandPeriodicOp::window_matrix(long lo, long hi) const {
  if (hi < lo) throw DomainError("empty window");
  const std::size_t w = static_cast<std::size_t>(hi - lo + 1);
  CdMatrix out(level_, w * d_, w * d_);
  const long K = static_cast<long>(K_);
  for (long l = lo; l <= hi; ++l)
    for (long s = std::max(lo, l - K); s <= std::min(hi, l + K); ++s) {
      out.set_block(static_cast<std::size_t>(l - lo) * d_, static_cast<std::size_t>(s - lo) * d_, matrix_entry(l, s));
    }
  return out;
}

double BandPeriodicOp::max_abs_diff(const BandPeriodicOp& other) const {
  require_compatible(*this, other, "max_abs_diff");
  const auto [a, b] = reconcile(*this, other);
  double best = 0;
  for (std::size_t i = 0; i < a.blocks_.size(); ++i) {
    const auto& x = a.blocks_[i].data();
    const auto& y = b.blocks_[i].data();
    for (std::size_t k = 0; k < x.size(); ++k) best = std::max(best, std::abs(x[k] - y[k]));
  }
  return best;
}

// ---------------------------------------------------------------- algebra

BandPeriodicOp compose(const BandPeriodicOp& a, const BandPeriodicOp& b) {
  require_compatible(a, b, "compose");
  const std::size_t n = std::lcm(a.period(), b.period());
  const long KA = static_cast<long>(a.band());
  const long KB = static_cast<long>(b.band());
  BandPeriodicOp out(a.level(), a.dim(), n, a.band() + b.band());
  // (AB)_{l,l+m} = sum_r A_{l,r} B_{r,l+m}; with r = l + p this is
  // C[j][m] = sum_p A(j, p) B((j + p) mod nB, m - p).
  for (std::size_t j = 0; j < n; ++j) {
    for (long p = -KA; p <= KA; ++p) {
      const CdMatrix& ap = a.block(j % a.period(), p);
      if (ap.is_zero()) continue;
      const std::size_t jb = static_cast<std::size_t>(mod(static_cast<long>(j) + p, static_cast<long>(b.period())));
      for (long q = -KB; q <= KB; ++q) {
        const CdMatrix& bq = b.block(jb, q);
        if (bq.is_zero()) continue;
        CdMatrix::mul_acc(ap, bq, out.block(j, p + q));
      }
    }
  }
  return out;
}

BandPeriodicOp add(const BandPeriodicOp& a, const BandPeriodicOp& b) {
  require_compatible(a, b, "add");
  auto [x, y] = reconcile(a, b);
  std::vector<CdMatrix> blocks = x.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += y.blocks()[i];
  return {x.level(), x.dim(), x.period(), x.band(), std::move(blocks)};
}

BandPeriodicOp subtract(const BandPeriodicOp& a, const BandPeriodicOp& b) { return add(a, scale(b, -1.0)); }

BandPeriodicOp scale(const BandPeriodicOp& a, double s) {
  std::vector<CdMatrix> blocks = a.blocks();
  for (auto& blk : blocks) blk *= s;
  return {a.level(), a.dim(), a.period(), a.band(), std::move(blocks)};
}

BandPeriodicOp scale_left(const CdComplex& z, const BandPeriodicOp& a) {
  std::vector<CdMatrix> blocks;
  blocks.reserve(a.blocks().size());
  for (const auto& blk : a.blocks()) blocks.push_back(blk.left_scaled(z));
  return {a.level(), a.dim(), a.period(), a.band(), std::move(blocks)};
}

BandPeriodicOp scale_right(const BandPeriodicOp& a, const CdComplex& z) {
  std::vector<CdMatrix> blocks;
  blocks.reserve(a.blocks().size());
  for (const auto& blk : a.blocks()) blocks.push_back(blk.right_scaled(z));
  return {a.level(), a.dim(), a.period(), a.band(), std::move(blocks)};
}

// ---------------------------------------------------------------- classification

bool Classification::is_ribbon(long k, long n) const {
  if (zero) return k > 0;
  return std::labs(min_offset - n) < k && std::labs(max_offset - n) < k;
}

double quasi_commutation_defect(const BandPeriodicOp& b, const CdNumber& m, long lo, long hi) {
  const int v = b.level();
  if (m.level() != v) throw DimensionError("probe element at the wrong level");
  const std::size_t dim = std::size_t{1} << v;
  const std::size_t d = b.dim();
  const long K = static_cast<long>(b.band());

  // M^k for k in [lo, hi]; negative powers through the conjugate of a unit.
  const CdNumber unit = m * (1.0 / m.norm());
  std::map<long, CdNumber> pw;
  for (long k = lo; k <= hi; ++k) {
    pw.emplace(k, k >= 0 ? cd_pow(unit, static_cast<unsigned>(k)) : cd_pow(unit.conj(), static_cast<unsigned>(-k)));
  }
  const bool table = v <= kMaxTableLevel;
  double worst = 0;
  for (long s = lo; s <= hi; ++s) {
    for (long l = std::max(lo, s - K); l <= std::min(hi, s + K); ++l) {
      const CdMatrix e = b.matrix_entry(s, l);
      if (e.is_zero()) continue;
      const CdNumber& dl = pw.at(l);
      const CdNumber& ds = pw.at(s);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          const auto x = e.raw(r, c);
          std::vector<double> diff(2 * dim, 0.0);
          if (table) {
            // jB kD - (-1)^kappa kD jB, summed over components j, k.
            const SignTable& t = SignTable::get(v);
            for (std::size_t j = 0; j < dim; ++j) {
              if (x[j] == 0.0 && x[dim + j] == 0.0) continue;
              for (std::size_t k = 0; k < dim; ++k) {
                const double lhs = t.sign(j, k) * dl[k];
                const double rhs = t.commutation_sign(j, k) * t.sign(k, j) * ds[k];
                const double w = lhs - rhs;
                diff[j ^ k] += w * x[j];
                diff[dim + (j ^ k)] += w * x[dim + j];
              }
            }
          } else {
            const CdComplex bz = e(r, c);
            const CdComplex dz(dl - ds);
            const CdComplex prod = bz * dz;
            std::copy(prod.re().coords().begin(), prod.re().coords().end(), diff.begin());
            std::copy(prod.im().coords().begin(), prod.im().coords().end(), diff.begin() + static_cast<std::ptrdiff_t>(dim));
          }
          double nrm = 0;
          for (double q : diff) nrm += q * q;
          worst = std::max(worst, std::sqrt(nrm));
        }
    }
  }
  return worst;
}

Classification classify(const BandPeriodicOp& b, long window, double tol) {
  Classification c;
  const BandPeriodicOp t = b.trimmed(0.0);
  c.min_period = t.period();
  const long K = static_cast<long>(t.band());
  for (long m = -K; m <= K; ++m) {
    bool nz = false;
    for (std::size_t j = 0; j < t.period(); ++j) nz = nz || !t.block(j, m).is_zero();
    if (!nz) continue;
    if (c.zero) {
      c.min_offset = m;
      c.zero = false;
    }
    c.max_offset = m;
  }
  c.diagonal_shape = c.zero || (c.min_offset == 0 && c.max_offset == 0);

  // i_1, i_2, i_3 and one unit whose powers never repeat.
  const int v = b.level();
  std::vector<CdNumber> probes;
  for (std::size_t p = 1; p <= 3 && p < (std::size_t{1} << v); ++p) probes.push_back(CdNumber::basis(v, p));
  if (v >= 1) {
    CdNumber g = CdNumber::basis(v, 0, std::cos(1.0));
    g.mutable_coords()[1] = std::sin(1.0);
    probes.push_back(g);
  }
  const long w = std::max<long>(window, K + static_cast<long>(t.period()));
  for (const auto& m : probes) c.probe_residual = std::max(c.probe_residual, quasi_commutation_defect(t, m, -w, w));
  c.is_diagonal = c.diagonal_shape && c.probe_residual <= tol;
  if (v == 0) c.is_diagonal = c.diagonal_shape;
  return c;
}

}  // namespace cdop
