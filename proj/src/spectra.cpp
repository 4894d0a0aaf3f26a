#include "cdop/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "cdop/errors.hpp"
#include "cdop/symbol.hpp"

namespace cdop {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

bool less_c(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

Eigenvalues eig_with_conj(const Eigen::MatrixXcd& c) {
  Eigenvalues out;
  if (c.rows() == 0) return out;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigen-solver did not converge", {{"rows", static_cast<double>(c.rows())},
                                                           {"max_abs_entry", c.cwiseAbs().maxCoeff()}});
  }
  out.reserve(2 * static_cast<std::size_t>(c.rows()));
  for (Eigen::Index k = 0; k < c.rows(); ++k) {
    out.push_back(es.eigenvalues()(k));
    out.push_back(std::conj(es.eigenvalues()(k)));
  }
  std::sort(out.begin(), out.end(), less_c);
  return out;
}

// Hopcroft-Karp on the bipartite graph {(i, j): |a_i - b_j| <= tol}.
class Matcher {
 public:
  Matcher(const Eigenvalues& a, const Eigenvalues& b, double tol) : n_(a.size()), adj_(a.size()) {
    // b sorted by real part narrows the candidate scan.
    std::vector<std::size_t> order(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return b[x].real() < b[y].real(); });
    std::vector<double> keys(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) keys[j] = b[order[j]].real();
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto lo = std::lower_bound(keys.begin(), keys.end(), a[i].real() - tol);
      for (auto it = lo; it != keys.end() && *it <= a[i].real() + tol; ++it) {
        const std::size_t j = order[static_cast<std::size_t>(it - keys.begin())];
        if (std::abs(a[i] - b[j]) <= tol) adj_[i].push_back(j);
      }
    }
    match_a_.assign(n_, kNone);
    match_b_.assign(b.size(), kNone);
    dist_.assign(n_, 0);
  }

  std::size_t max_matching() {
    std::size_t result = 0;
    while (bfs()) {
      for (std::size_t i = 0; i < n_; ++i)
        if (match_a_[i] == kNone && dfs(i)) ++result;
    }
    return result;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (match_a_[i] == kNone) {
        dist_[i] = 0;
        q.push(i);
      } else {
        dist_[i] = kNone;
      }
    }
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      for (std::size_t j : adj_[i]) {
        const std::size_t k = match_b_[j];
        if (k == kNone) {
          found = true;
        } else if (dist_[k] == kNone) {
          dist_[k] = dist_[i] + 1;
          q.push(k);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t i) {
    for (std::size_t j : adj_[i]) {
      const std::size_t k = match_b_[j];
      if (k == kNone || (dist_[k] == dist_[i] + 1 && dfs(k))) {
        match_a_[i] = j;
        match_b_[j] = i;
        return true;
      }
    }
    dist_[i] = kNone;
    return false;
  }

  std::size_t n_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_a_, match_b_, dist_;
};

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

Eigenvalues pointwise_spectrum(const CdMatrix& s) {
  if (!s.square()) throw DimensionError("pointwise_spectrum needs a square matrix");
  return eig_with_conj(complex_rep(s));
}

Eigenvalues SpectrumCloud::union_points() const {
  Eigenvalues out;
  for (const auto& s : samples) out.insert(out.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  return out;
}

SpectrumCloud operator_spectrum(const BandPeriodicOp& b, std::size_t n_samples) {
  const long Q = blocked_radius(b);
  if (n_samples < 4 * static_cast<std::size_t>(Q + 1)) {
    throw PreconditionError("too few circle samples for the band", {{"n_samples", static_cast<double>(n_samples)}});
  }
  const BlockedCoeffs c = block(b);
  SpectrumCloud cloud{b.level(), b.dim(), b.period(), b.band(), {}};
  cloud.samples.reserve(n_samples);
  for (std::size_t r = 0; r < n_samples; ++r) {
    const double th = kTwoPi * static_cast<double>(r) / static_cast<double>(n_samples);
    cloud.samples.push_back({{th}, pointwise_spectrum(symbol_eval(c, SymbolPoint::at(th)))});
  }
  return cloud;
}

Eigenvalues circulant_oracle(const BandPeriodicOp& b, std::size_t N, std::size_t max_dim) {
  const long Q = blocked_radius(b);
  if (N % b.period() != 0) throw PreconditionError("N must be a multiple of the period");
  if (static_cast<long>(N / b.period()) <= 2 * Q) {
    throw PreconditionError("periodization too short for the band", {{"N", static_cast<double>(N)}, {"Q", static_cast<double>(Q)}});
  }
  const std::size_t dim = N * b.dim() * (std::size_t{2} << b.level());
  if (dim > max_dim) throw ResourceError("dense periodization exceeds the dimension budget", {{"dimension", static_cast<double>(dim)}});
  return eig_with_conj(complex_rep(periodize(b, N)));
}

CdMatrix periodize(const BandPeriodicOp& b, std::size_t N) {
  if (N == 0 || N % b.period() != 0) throw PreconditionError("N must be a positive multiple of the period");
  const std::size_t d = b.dim();
  const long K = static_cast<long>(b.band());
  const long NN = static_cast<long>(N);
  CdMatrix dense(b.level(), N * d, N * d);
  for (long l = 0; l < NN; ++l)
    for (long m = -K; m <= K; ++m) {
      const long s = ((l + m) % NN + NN) % NN;
      CdMatrix cur = dense.block(static_cast<std::size_t>(l) * d, static_cast<std::size_t>(s) * d, d, d);
      cur += b.matrix_entry(l, l + m);
      dense.set_block(static_cast<std::size_t>(l) * d, static_cast<std::size_t>(s) * d, cur);
    }
  return dense;
}

double periodized_min_singular_value(const BandPeriodicOp& b, std::size_t N, std::size_t max_dim) {
  const std::size_t dim = N * b.dim() * (std::size_t{2} << b.level());
  if (dim > max_dim) throw ResourceError("dense periodization exceeds the dimension budget", {{"dimension", static_cast<double>(dim)}});
  const Eigen::MatrixXcd c = complex_rep(periodize(b, N));
  const Eigen::Index n = c.rows();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(c);
  const Eigen::MatrixXcd lu_diag = lu.matrixLU().diagonal();
  if (lu_diag.cwiseAbs().minCoeff() <= 1e-300 || !lu.matrixLU().allFinite()) return 0.0;
  const Eigen::MatrixXcd ch = c.adjoint();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> luh(ch);

  // Lanczos with full reorthogonalisation on G = (C^H C)^{-1}.
  const Eigen::Index steps = std::min<Eigen::Index>(n, 400);
  Eigen::MatrixXcd basis(n, steps + 1);
  std::vector<double> alpha, beta;
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) q(k) = std::complex<double>(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(k)), 0.11 * std::cos(0.7 * static_cast<double>(k)));
  q.normalize();
  basis.col(0) = q;
  double prev = 0;
  int stable = 0;
  double top = 0;

  for (Eigen::Index j = 0; j < steps; ++j) {
    Eigen::VectorXcd w = lu.solve(luh.solve(basis.col(j)));
    const double a = basis.col(j).dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    const double bnorm = w.norm();
    const bool last = j + 1 == steps || bnorm <= 1e-14 * std::abs(a);
    if ((j + 1) % 8 == 0 || last) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j + 1, j + 1);
      for (Eigen::Index i = 0; i <= j; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[static_cast<std::size_t>(i - 1)];
      }
      top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      stable = std::abs(top - prev) <= 1e-13 * std::abs(top) ? stable + 1 : 0;
      prev = top;
      if (stable >= 2 || last) break;
    }
    beta.push_back(bnorm);
    basis.col(j + 1) = w / bnorm;
  }
  return top > 0 ? 1.0 / std::sqrt(top) : 0.0;
}

Eigenvalues sampled_union_at_roots(const BandPeriodicOp& b, std::size_t N) {
  if (N % b.period() != 0) throw PreconditionError("N must be a multiple of the period");
  const std::size_t L = N / b.period();
  const BlockedCoeffs c = block(b);
  Eigenvalues out;
  for (std::size_t r = 0; r < L; ++r) {
    const auto e = pointwise_spectrum(symbol_eval(c, SymbolPoint::at(kTwoPi * static_cast<double>(r) / static_cast<double>(L))));
    out.insert(out.end(), e.begin(), e.end());
  }
  std::sort(out.begin(), out.end(), less_c);
  return out;
}

double resolvent_margin(const BandPeriodicOp& b, std::complex<double> lambda, std::size_t n_samples) {
  if (n_samples == 0) throw DomainError("resolvent_margin needs samples");
  const BlockedCoeffs c = block(b);
  const std::size_t dim = b.period() * b.dim();
  const CdMatrix shift = CdMatrix::scalar(CdComplex::scalar(b.level(), lambda), dim);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n_samples; ++r) {
    const CdMatrix s = symbol_eval(c, SymbolPoint::at(kTwoPi * static_cast<double>(r) / static_cast<double>(n_samples)));
    best = std::min(best, min_singular_value(s - shift));
  }
  return best;
}

bool multiset_match(const Eigenvalues& a, const Eigenvalues& b, double tol) {
  if (a.size() != b.size()) return false;
  Matcher m(a, b, tol);
  return m.max_matching() == a.size();
}

double bottleneck_distance(const Eigenvalues& a, const Eigenvalues& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.empty()) return 0.0;
  // Bisection on the threshold; the answer is one of the pairwise distances,
  // so a relative resolution of 1e-3 suffices for reporting.
  double hi = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hi = std::max(hi, std::abs(a[i]) + std::abs(b[i]));
  hi = hi * 2 + 1e-300;
  double lo = 0;
  if (multiset_match(a, b, 0.0)) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-3 * hi; ++it) {
    const double mid = std::sqrt(std::max(lo, 1e-300) * hi);
    if (multiset_match(a, b, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double hausdorff_one_sided(const Eigenvalues& a, const Eigenvalues& b) {
  double worst = 0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

namespace {

void write_grouped(std::ostream& os, const std::string& prefix, const Eigenvalues& eig) {
  Eigenvalues sorted = eig;
  std::sort(sorted.begin(), sorted.end(), less_c);
  std::vector<bool> used(sorted.size(), false);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (used[i]) continue;
    std::size_t mult = 0;
    for (std::size_t j = i; j < sorted.size() && sorted[j].real() - sorted[i].real() <= 1e-9; ++j) {
      if (!used[j] && std::abs(sorted[j] - sorted[i]) <= 1e-9) {
        used[j] = true;
        ++mult;
      }
    }
    os << prefix << fmt17(sorted[i].real()) << ',' << fmt17(sorted[i].imag()) << ',' << mult << '\n';
  }
}

}  // namespace

void write_cloud_csv(std::ostream& os, const SpectrumCloud& cloud) {
  const std::size_t axes = cloud.samples.empty() ? 1 : cloud.samples.front().theta.size();
  if (axes == 1) {
    os << "theta";
  } else {
    for (std::size_t k = 0; k < axes; ++k) os << (k ? "," : "") << "theta_" << k;
  }
  os << ",re,im,multiplicity\n";
  for (const auto& s : cloud.samples) {
    std::string prefix;
    for (double t : s.theta) prefix += fmt17(t) + ",";
    write_grouped(os, prefix, s.eigenvalues);
  }
}

void write_eigen_csv(std::ostream& os, const Eigenvalues& eig) {
  os << "re,im,multiplicity\n";
  write_grouped(os, "", eig);
}

}  // namespace cdop
