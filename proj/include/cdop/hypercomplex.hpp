#ifndef CDOP_HYPERCOMPLEX_HPP
#define CDOP_HYPERCOMPLEX_HPP

/**
 * @file hypercomplex.hpp
 * @brief Cayley-Dickson numbers at arbitrary doubling level and their
 *        complexification by a central unit.
 *
 * An element of A_v is stored as 2^v real coordinates; coordinate j is the
 * coefficient of the basis generator i_j (i_0 = 1). A_v is built from
 * A_{v-1} x A_{v-1} with the doubling product
 *
 *     (x, y)(u, w) = (x u - w* y,  w x + y u*),     (x, y)* = (x*, -y),
 *
 * so that the first half of the coordinates holds x and the second half y.
 * Literature conventions differ; every sign table, real representation and
 * test in this project derives from this single rule. Under it
 * i_1 i_2 = i_3 in the quaternions.
 *
 * The complexified element a + b·𝐢 (CdComplex) adjoins a unit 𝐢 that
 * commutes with every i_l and squares to -1. The complex unit of
 * std::complex<double> is identified with 𝐢 throughout: a std::complex
 * value (x, y) denotes the central scalar x + y·𝐢.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cdop {

/// Levels whose multiplication tables are precomputed and cached.
inline constexpr int kMaxTableLevel = 8;

/// Basis multiplication table of A_v: i_j i_k = sign(j,k) i_{target(j,k)}.
///
/// The target index of a Cayley-Dickson basis product is always j XOR k; the
/// sign follows from the doubling rule. Tables are immutable and shared.
class SignTable {
 public:
  /// Cached table for `level` (0 <= level <= kMaxTableLevel).
  static const SignTable& get(int level);

  int level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t target(std::size_t j, std::size_t k) const noexcept { return j ^ k; }
  int sign(std::size_t j, std::size_t k) const noexcept { return signs_[j * dim_ + k]; }

  /// (-1)^kappa(j,k): the sign with i_j i_k = (-1)^kappa(j,k) i_k i_j.
  int commutation_sign(std::size_t j, std::size_t k) const noexcept {
    return sign(j, k) * sign(k, j);
  }

 private:
  explicit SignTable(int level);
  int level_;
  std::size_t dim_;
  std::vector<std::int8_t> signs_;
};

/// Sign of i_j i_k evaluated directly from the doubling recursion (any level).
int basis_product_sign(int level, std::size_t j, std::size_t k);

class CdNumber {
 public:
  CdNumber() : level_(0), coords_(1, 0.0) {}
  /// Zero element of A_level.
  explicit CdNumber(int level);
  /// Throws DimensionError on a length mismatch and DomainError on a
  /// non-finite coordinate.
  CdNumber(int level, std::vector<double> coords);

  static CdNumber basis(int level, std::size_t j, double scale = 1.0);
  static CdNumber real(int level, double x) { return basis(level, 0, x); }

  int level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t j) const { return coords_[j]; }
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> mutable_coords() noexcept { return coords_; }

  CdNumber conj() const;
  double norm() const;
  double norm_sq() const;
  bool is_zero() const noexcept;

  CdNumber& operator+=(const CdNumber& rhs);
  CdNumber& operator-=(const CdNumber& rhs);
  CdNumber& operator*=(double s);

  friend CdNumber operator+(CdNumber a, const CdNumber& b) { return a += b; }
  friend CdNumber operator-(CdNumber a, const CdNumber& b) { return a -= b; }
  friend CdNumber operator*(CdNumber a, double s) { return a *= s; }
  friend CdNumber operator*(double s, CdNumber a) { return a *= s; }
  CdNumber operator-() const { return *this * -1.0; }
  friend bool operator==(const CdNumber&, const CdNumber&) = default;

 private:
  int level_;
  std::vector<double> coords_;
};

/// Table-driven product; agrees with cd_mul_doubling to rounding.
CdNumber cd_mul(const CdNumber& a, const CdNumber& b);
/// Product by direct recursion on the doubling rule.
CdNumber cd_mul_doubling(const CdNumber& a, const CdNumber& b);
inline CdNumber operator*(const CdNumber& a, const CdNumber& b) { return cd_mul(a, b); }

inline CdNumber cd_conj(const CdNumber& a) { return a.conj(); }
inline double cd_norm(const CdNumber& a) { return a.norm(); }

/// conj(a)/|a|^2. Zero input throws SingularError. From level 4 on, a zero
/// divisor (left multiplication singular relative to |a|, below `tol`)
/// throws NotInvertibleError even though a·conj(a) = |a|^2 still holds.
CdNumber cd_inv(const CdNumber& a, double tol = 1e-12);

/// Left-nested power a^m = a^{m-1} a, a^0 = 1.
CdNumber cd_pow(const CdNumber& a, unsigned m);

class CdComplex {
 public:
  CdComplex() = default;
  explicit CdComplex(int level) : re_(level), im_(level) {}
  explicit CdComplex(CdNumber re) : re_(std::move(re)), im_(re_.level()) {}
  /// Throws DimensionError when the parts live at different levels.
  CdComplex(CdNumber re, CdNumber im);

  /// The central scalar z = x + y𝐢 embedded at `level`.
  static CdComplex scalar(int level, std::complex<double> z);

  int level() const noexcept { return re_.level(); }
  const CdNumber& re() const noexcept { return re_; }
  const CdNumber& im() const noexcept { return im_; }

  /// Euclidean norm, ||a + b𝐢||^2 = |a|^2 + |b|^2.
  double norm() const;
  bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }
  /// Cayley-Dickson conjugation applied to both parts (𝐢 untouched).
  CdComplex conj() const { return {re_.conj(), im_.conj()}; }

  CdComplex& operator+=(const CdComplex& rhs);
  CdComplex& operator-=(const CdComplex& rhs);
  CdComplex& operator*=(double s);
  friend CdComplex operator+(CdComplex a, const CdComplex& b) { return a += b; }
  friend CdComplex operator-(CdComplex a, const CdComplex& b) { return a -= b; }
  friend CdComplex operator*(CdComplex a, double s) { return a *= s; }
  friend CdComplex operator*(double s, CdComplex a) { return a *= s; }
  CdComplex operator-() const { return *this * -1.0; }
  friend bool operator==(const CdComplex&, const CdComplex&) = default;

 private:
  CdNumber re_;
  CdNumber im_;
};

/// (p + q𝐢)(r + s𝐢) = (pr - qs) + (ps + qr)𝐢.
CdComplex cdc_mul(const CdComplex& a, const CdComplex& b);
inline CdComplex operator*(const CdComplex& a, const CdComplex& b) { return cdc_mul(a, b); }
/// Central scalar times element.
CdComplex operator*(std::complex<double> z, const CdComplex& a);

/// Left-multiplication matrix on the real basis {i_j} followed by {i_j 𝐢}:
/// real_rep(a) * vec(x) = vec(a x). Dimension 2^{v+1}.
Eigen::MatrixXd real_rep(const CdComplex& a);
/// The same map written over C with 𝐢 acting as the complex unit; dimension
/// 2^v. real_rep(a) = [[Re C, -Im C], [Im C, Re C]] for C = complex_rep(a).
Eigen::MatrixXcd complex_rep(const CdComplex& a);
/// Inverse of complex_rep restricted to the image of the unit: reads the
/// element off the first column.
CdComplex from_complex_rep_column(std::span<const std::complex<double>> column, int level);

/// Operator norm of x -> a x for the Euclidean norm. Equals norm() when the
/// 𝐢 part vanishes and v <= 3.
double op_norm(const CdComplex& a);

/// Residual norms of the weak associativity laws for one triple.
struct IdentityReport {
  double left_alternative = 0;   ///< |(aa)b - a(ab)|
  double right_alternative = 0;  ///< |b(aa) - (ba)a|
  double moufang1 = 0;           ///< |((ab)a)c - a(b(ac))|
  double moufang2 = 0;           ///< |c((ab)a) - ((ca)b)a|
  double moufang3 = 0;           ///< |(ab)(ca) - (a(bc))a|
  double max() const;
};

IdentityReport identity_checks(const CdNumber& a, const CdNumber& b, const CdNumber& c);

namespace detail {
/// out += scale * (a b) on raw coordinate arrays of length 2^level.
void cd_mul_acc(int level, const double* a, const double* b, double* out, double scale = 1.0);
/// out += scale * (a b) for complexified raw arrays (re coords, then im coords).
void cdc_mul_acc(int level, const double* a, const double* b, double* out, double scale = 1.0);
}  // namespace detail

}  // namespace cdop

#endif  // CDOP_HYPERCOMPLEX_HPP
