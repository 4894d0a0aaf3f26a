#include "cdop/cd_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdop/errors.hpp"

namespace cdop {

namespace {

void require_same_shape(const CdMatrix& a, const CdMatrix& b, const char* what) {
  if (a.level() != b.level() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

double entry_op_norm(int level, std::span<const double> e) {
  const std::size_t n = e.size() / 2;
  bool im_zero = true;
  for (std::size_t j = n; j < e.size(); ++j)
    if (e[j] != 0.0) {
      im_zero = false;
      break;
    }
  if (im_zero && level <= 3) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += e[j] * e[j];
    return std::sqrt(s);
  }
  std::vector<double> re(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> im(e.begin() + static_cast<std::ptrdiff_t>(n), e.end());
  return op_norm(CdComplex(CdNumber(level, std::move(re)), CdNumber(level, std::move(im))));
}

}  // namespace

CdMatrix::CdMatrix(int level, std::size_t rows, std::size_t cols)
    : level_(level), rows_(rows), cols_(cols), data_(rows * cols * (std::size_t{2} << level), 0.0) {}

CdMatrix CdMatrix::identity(int level, std::size_t n) {
  CdMatrix m(level, n, n);
  for (std::size_t k = 0; k < n; ++k) m.raw(k, k)[0] = 1.0;
  return m;
}

CdMatrix CdMatrix::scalar(const CdComplex& z, std::size_t n) {
  CdMatrix m(z.level(), n, n);
  for (std::size_t k = 0; k < n; ++k) m.set(k, k, z);
  return m;
}

CdComplex CdMatrix::operator()(std::size_t r, std::size_t c) const {
  const auto e = raw(r, c);
  const std::size_t n = e.size() / 2;
  return {CdNumber(level_, std::vector<double>(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n))),
          CdNumber(level_, std::vector<double>(e.begin() + static_cast<std::ptrdiff_t>(n), e.end()))};
}

void CdMatrix::set(std::size_t r, std::size_t c, const CdComplex& z) {
  if (z.level() != level_) throw DimensionError("CdMatrix::set: level mismatch");
  auto e = raw(r, c);
  const std::size_t n = e.size() / 2;
  std::copy(z.re().coords().begin(), z.re().coords().end(), e.begin());
  std::copy(z.im().coords().begin(), z.im().coords().end(), e.begin() + static_cast<std::ptrdiff_t>(n));
}

bool CdMatrix::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return x == 0.0; });
}

double CdMatrix::frobenius() const {
  double s = 0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double CdMatrix::max_entry_norm() const {
  double best = 0;
  const std::size_t es = entry_size();
  for (std::size_t off = 0; off < data_.size(); off += es) {
    double s = 0;
    for (std::size_t j = 0; j < es; ++j) s += data_[off + j] * data_[off + j];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

double CdMatrix::op_norm_bound() const {
  double best = 0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double row = 0;
    for (std::size_t c = 0; c < cols_; ++c) row += entry_op_norm(level_, raw(r, c));
    best = std::max(best, row);
  }
  return best;
}

CdMatrix& CdMatrix::operator+=(const CdMatrix& rhs) {
  require_same_shape(*this, rhs, "CdMatrix +=");
  for (std::size_t j = 0; j < data_.size(); ++j) data_[j] += rhs.data_[j];
  return *this;
}

CdMatrix& CdMatrix::operator-=(const CdMatrix& rhs) {
  require_same_shape(*this, rhs, "CdMatrix -=");
  for (std::size_t j = 0; j < data_.size(); ++j) data_[j] -= rhs.data_[j];
  return *this;
}

CdMatrix& CdMatrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

CdMatrix& CdMatrix::operator*=(std::complex<double> z) {
  const std::size_t es = entry_size();
  const std::size_t n = es / 2;
  for (std::size_t off = 0; off < data_.size(); off += es) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = data_[off + j];
      const double q = data_[off + n + j];
      data_[off + j] = z.real() * p - z.imag() * q;
      data_[off + n + j] = z.real() * q + z.imag() * p;
    }
  }
  return *this;
}

void CdMatrix::mul_acc(const CdMatrix& a, const CdMatrix& b, CdMatrix& out, double scale) {
  if (a.level_ != b.level_ || a.level_ != out.level_ || a.cols_ != b.rows_ || out.rows_ != a.rows_ ||
      out.cols_ != b.cols_) {
    throw DimensionError("CdMatrix product: incompatible shapes");
  }
  for (std::size_t r = 0; r < a.rows_; ++r) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const auto ark = a.raw(r, k);
      if (std::all_of(ark.begin(), ark.end(), [](double x) { return x == 0.0; })) continue;
      for (std::size_t c = 0; c < b.cols_; ++c) {
        detail::cdc_mul_acc(a.level_, ark.data(), b.raw(k, c).data(), out.raw(r, c).data(), scale);
      }
    }
  }
}

CdMatrix operator*(const CdMatrix& a, const CdMatrix& b) {
  CdMatrix out(a.level_, a.rows_, b.cols_);
  CdMatrix::mul_acc(a, b, out);
  return out;
}

CdMatrix CdMatrix::left_scaled(const CdComplex& z) const {
  if (z.level() != level_) throw DimensionError("left_scaled: level mismatch");
  CdMatrix out(level_, rows_, cols_);
  std::vector<double> zr(entry_size());
  std::copy(z.re().coords().begin(), z.re().coords().end(), zr.begin());
  std::copy(z.im().coords().begin(), z.im().coords().end(), zr.begin() + static_cast<std::ptrdiff_t>(entry_size() / 2));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) detail::cdc_mul_acc(level_, zr.data(), raw(r, c).data(), out.raw(r, c).data());
  return out;
}

CdMatrix CdMatrix::right_scaled(const CdComplex& z) const {
  if (z.level() != level_) throw DimensionError("right_scaled: level mismatch");
  CdMatrix out(level_, rows_, cols_);
  std::vector<double> zr(entry_size());
  std::copy(z.re().coords().begin(), z.re().coords().end(), zr.begin());
  std::copy(z.im().coords().begin(), z.im().coords().end(), zr.begin() + static_cast<std::ptrdiff_t>(entry_size() / 2));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) detail::cdc_mul_acc(level_, raw(r, c).data(), zr.data(), out.raw(r, c).data());
  return out;
}

VectorY CdMatrix::apply(const VectorY& x) const { return VectorY::from_column(*this * x.as_column()); }

CdMatrix CdMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("CdMatrix::block out of range");
  CdMatrix out(level_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) {
      const auto src = raw(r0 + r, c0 + c);
      std::copy(src.begin(), src.end(), out.raw(r, c).begin());
    }
  return out;
}

void CdMatrix::set_block(std::size_t r0, std::size_t c0, const CdMatrix& b) {
  if (b.level_ != level_ || r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_)
    throw DimensionError("CdMatrix::set_block out of range");
  for (std::size_t r = 0; r < b.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c) {
      const auto src = b.raw(r, c);
      std::copy(src.begin(), src.end(), raw(r0 + r, c0 + c).begin());
    }
}

// ---------------------------------------------------------------- VectorY

VectorY VectorY::unit(std::size_t d, std::size_t k, const CdComplex& value) {
  VectorY y(value.level(), d);
  y.set(k, value);
  return y;
}

VectorY VectorY::from_column(CdMatrix m) {
  if (m.cols() != 1) throw DimensionError("VectorY needs a single column");
  VectorY y;
  y.m_ = std::move(m);
  return y;
}

// ---------------------------------------------------------------- representations

Eigen::MatrixXcd complex_rep(const CdMatrix& a) {
  const int v = a.level();
  const Eigen::Index n = Eigen::Index{1} << v;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a.rows()) * n,
                                                static_cast<Eigen::Index>(a.cols()) * n);
  const bool table = v <= kMaxTableLevel;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const auto e = a.raw(r, c);
      const Eigen::Index r0 = static_cast<Eigen::Index>(r) * n;
      const Eigen::Index c0 = static_cast<Eigen::Index>(c) * n;
      if (table) {
        const SignTable& t = SignTable::get(v);
        for (Eigen::Index j = 0; j < n; ++j) {
          const std::complex<double> z(e[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(n + j)]);
          if (z == 0.0) continue;
          for (Eigen::Index k = 0; k < n; ++k) {
            out(r0 + (j ^ k), c0 + k) += static_cast<double>(t.sign(static_cast<std::size_t>(j), static_cast<std::size_t>(k))) * z;
          }
        }
      } else {
        out.block(r0, c0, n, n) = complex_rep(a(r, c));
      }
    }
  }
  return out;
}

Eigen::MatrixXd real_rep(const CdMatrix& a) {
  const Eigen::MatrixXcd c = complex_rep(a);
  // Reorder to the per-entry basis {i_j} then {i_j 𝐢} of every entry.
  const Eigen::Index n = Eigen::Index{1} << a.level();
  const Eigen::Index R = static_cast<Eigen::Index>(a.rows());
  const Eigen::Index C = static_cast<Eigen::Index>(a.cols());
  Eigen::MatrixXd out(R * 2 * n, C * 2 * n);
  for (Eigen::Index r = 0; r < R; ++r)
    for (Eigen::Index col = 0; col < C; ++col) {
      const Eigen::MatrixXcd blk = c.block(r * n, col * n, n, n);
      auto dst = out.block(r * 2 * n, col * 2 * n, 2 * n, 2 * n);
      dst.topLeftCorner(n, n) = blk.real();
      dst.topRightCorner(n, n) = -blk.imag();
      dst.bottomLeftCorner(n, n) = blk.imag();
      dst.bottomRightCorner(n, n) = blk.real();
    }
  return out;
}

CdMatrix from_complex_rep(const Eigen::MatrixXcd& c, int level) {
  const Eigen::Index n = Eigen::Index{1} << level;
  if (c.rows() % n != 0 || c.cols() % n != 0) throw DimensionError("from_complex_rep: size not a multiple of 2^v");
  const std::size_t rows = static_cast<std::size_t>(c.rows() / n);
  const std::size_t cols = static_cast<std::size_t>(c.cols() / n);
  CdMatrix out(level, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < cols; ++k) {
      auto e = out.raw(r, k);
      for (Eigen::Index t = 0; t < n; ++t) {
        const std::complex<double> z = c(static_cast<Eigen::Index>(r) * n + t, static_cast<Eigen::Index>(k) * n);
        e[static_cast<std::size_t>(t)] = z.real();
        e[static_cast<std::size_t>(n + t)] = z.imag();
      }
    }
  return out;
}

double representation_defect(const Eigen::MatrixXcd& c, int level) {
  return (c - complex_rep(from_complex_rep(c, level))).cwiseAbs().maxCoeff();
}

double min_singular_value(const CdMatrix& a) {
  const Eigen::MatrixXcd c = complex_rep(a);
  if (c.size() == 0) return 0.0;
  if (c.rows() <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c);
    return svd.singularValues().minCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(c);
  return svd.singularValues().minCoeff();
}

CdMatrix inverse(const CdMatrix& a, double tol, double* defect) {
  if (!a.square()) throw DimensionError("inverse of a non-square matrix");
  const Eigen::MatrixXcd c = complex_rep(a);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(c);
  const Eigen::MatrixXcd ci = lu.inverse();
  if (!ci.allFinite()) throw SingularError("matrix is singular");
  const double smin = min_singular_value(a);
  if (smin <= tol) throw SingularError("matrix is numerically singular", {{"min_singular_value", smin}});
  if (defect != nullptr) *defect = representation_defect(ci, a.level());
  return from_complex_rep(ci, a.level());
}

}  // namespace cdop
