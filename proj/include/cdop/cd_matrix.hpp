#ifndef CDOP_CD_MATRIX_HPP
#define CDOP_CD_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cdop/hypercomplex.hpp"

namespace cdop {

class VectorY;

/// Dense rows x cols array of complexified Cayley-Dickson entries.
///
/// Entries are stored contiguously, each as 2^{v+1} doubles (the real
/// coordinates of the A_v part followed by those of the 𝐢 part). Products
/// use the entrywise rule (AB)_{rc} = sum_k A_{rk} B_{kc}.
class CdMatrix {
 public:
  CdMatrix() = default;
  CdMatrix(int level, std::size_t rows, std::size_t cols);

  static CdMatrix identity(int level, std::size_t n);
  /// z I for a general element z.
  static CdMatrix scalar(const CdComplex& z, std::size_t n);

  int level() const noexcept { return level_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t entry_size() const noexcept { return std::size_t{2} << level_; }
  bool square() const noexcept { return rows_ == cols_; }

  CdComplex operator()(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, const CdComplex& z);
  std::span<double> raw(std::size_t r, std::size_t c) noexcept {
    return {data_.data() + (r * cols_ + c) * entry_size(), entry_size()};
  }
  std::span<const double> raw(std::size_t r, std::size_t c) const noexcept {
    return {data_.data() + (r * cols_ + c) * entry_size(), entry_size()};
  }
  const std::vector<double>& data() const noexcept { return data_; }

  bool is_zero() const noexcept;
  /// sqrt of the sum of squared coordinates.
  double frobenius() const;
  /// max over entries of the Euclidean entry norm.
  double max_entry_norm() const;
  /// max_r sum_c op_norm(A_rc): an upper bound for the operator norm when
  /// vectors carry the max-over-entries norm.
  double op_norm_bound() const;

  CdMatrix& operator+=(const CdMatrix& rhs);
  CdMatrix& operator-=(const CdMatrix& rhs);
  CdMatrix& operator*=(double s);
  /// Multiplication by a central scalar of C_𝐢.
  CdMatrix& operator*=(std::complex<double> z);

  friend CdMatrix operator+(CdMatrix a, const CdMatrix& b) { return a += b; }
  friend CdMatrix operator-(CdMatrix a, const CdMatrix& b) { return a -= b; }
  friend CdMatrix operator*(CdMatrix a, double s) { return a *= s; }
  friend CdMatrix operator*(double s, CdMatrix a) { return a *= s; }
  friend CdMatrix operator*(std::complex<double> z, CdMatrix a) { return a *= z; }
  friend CdMatrix operator*(const CdMatrix& a, const CdMatrix& b);
  friend bool operator==(const CdMatrix&, const CdMatrix&) = default;

  /// out += scale * (a b), dimensions checked.
  static void mul_acc(const CdMatrix& a, const CdMatrix& b, CdMatrix& out, double scale = 1.0);

  /// Entrywise z·A_rc and A_rc·z.
  CdMatrix left_scaled(const CdComplex& z) const;
  CdMatrix right_scaled(const CdComplex& z) const;

  VectorY apply(const VectorY& x) const;

  /// Submatrix copy.
  CdMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CdMatrix& b);

 private:
  int level_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// An element of Y = A_v^d (complexified), normed by the max entry norm.
class VectorY {
 public:
  VectorY() = default;
  VectorY(int level, std::size_t d) : m_(level, d, 1) {}
  /// e_k y: the entry `k` set to `value`, others zero.
  static VectorY unit(std::size_t d, std::size_t k, const CdComplex& value);

  int level() const noexcept { return m_.level(); }
  std::size_t dim() const noexcept { return m_.rows(); }
  CdComplex operator[](std::size_t k) const { return m_(k, 0); }
  void set(std::size_t k, const CdComplex& z) { m_.set(k, 0, z); }
  double norm() const { return m_.max_entry_norm(); }
  bool is_zero() const noexcept { return m_.is_zero(); }

  const CdMatrix& as_column() const noexcept { return m_; }
  CdMatrix& as_column() noexcept { return m_; }
  static VectorY from_column(CdMatrix m);

  VectorY& operator+=(const VectorY& rhs) {
    m_ += rhs.m_;
    return *this;
  }
  VectorY& operator-=(const VectorY& rhs) {
    m_ -= rhs.m_;
    return *this;
  }
  friend VectorY operator+(VectorY a, const VectorY& b) { return a += b; }
  friend VectorY operator-(VectorY a, const VectorY& b) { return a -= b; }
  friend VectorY operator*(std::complex<double> z, VectorY a) {
    a.m_ *= z;
    return a;
  }
  friend bool operator==(const VectorY&, const VectorY&) = default;

 private:
  CdMatrix m_;
};

/// Block complex representation of x -> A x (see complex_rep(CdComplex)).
Eigen::MatrixXcd complex_rep(const CdMatrix& a);
/// Block real representation, dimension (rows·2^{v+1}) x (cols·2^{v+1}).
Eigen::MatrixXd real_rep(const CdMatrix& a);
/// Reads each block's first column back into an entry. Exact inverse of
/// complex_rep on its image.
CdMatrix from_complex_rep(const Eigen::MatrixXcd& c, int level);
/// ||R - complex_rep(from_complex_rep(R))||_max: zero when R represents a
/// matrix of left multiplications.
double representation_defect(const Eigen::MatrixXcd& c, int level);

/// Smallest singular value of real_rep(a) (equal to that of complex_rep(a)).
double min_singular_value(const CdMatrix& a);

/// Inverse of the real-linear map x -> A x, read back as a matrix. Throws
/// SingularError below `tol` on the smallest singular value. For levels >= 3
/// with non-scalar fibers the read-back may carry a representation defect;
/// `defect`, when given, receives it.
CdMatrix inverse(const CdMatrix& a, double tol = 1e-14, double* defect = nullptr);

}  // namespace cdop

#endif  // CDOP_CD_MATRIX_HPP
