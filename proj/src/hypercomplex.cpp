#include "cdop/hypercomplex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "cdop/errors.hpp"

namespace cdop {

namespace {

void check_level(int level) {
  if (level < 0 || level > 30) throw DomainError("Cayley-Dickson level out of range: " + std::to_string(level));
}

void require_same_level(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": level mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

// Direct recursion on the doubling rule. Scratch buffers are allocated per
// call; this path only serves levels without a cached table and as an oracle.
void mul_doubling_raw(int level, const double* a, const double* b, double* out) {
  if (level == 0) {
    out[0] = a[0] * b[0];
    return;
  }
  const std::size_t h = std::size_t{1} << (level - 1);
  const double* x = a;
  const double* y = a + h;
  const double* u = b;
  const double* w = b + h;
  std::vector<double> wc(w, w + h), uc(u, u + h), t1(h), t2(h);
  for (std::size_t j = 1; j < h; ++j) {
    wc[j] = -wc[j];
    uc[j] = -uc[j];
  }
  // first half: x u - w* y
  mul_doubling_raw(level - 1, x, u, t1.data());
  mul_doubling_raw(level - 1, wc.data(), y, t2.data());
  for (std::size_t j = 0; j < h; ++j) out[j] = t1[j] - t2[j];
  // second half: w x + y u*
  mul_doubling_raw(level - 1, w, x, t1.data());
  mul_doubling_raw(level - 1, y, uc.data(), t2.data());
  for (std::size_t j = 0; j < h; ++j) out[h + j] = t1[j] + t2[j];
}

}  // namespace

// ---------------------------------------------------------------- SignTable

int basis_product_sign(int level, std::size_t j, std::size_t k) {
  int sign = 1;
  while (level > 0) {
    const std::size_t h = std::size_t{1} << (level - 1);
    const bool jh = j >= h;
    const bool kh = k >= h;
    if (!jh && !kh) {
      // (e_j, 0)(e_k, 0) = (e_j e_k, 0)
    } else if (!jh && kh) {
      // (e_j, 0)(0, e_k') = (0, e_k' e_j)
      const std::size_t kp = k - h;
      k = j;
      j = kp;
    } else if (jh && !kh) {
      // (0, e_j')(e_k, 0) = (0, e_j' e_k*)
      j -= h;
      if (k != 0) sign = -sign;
    } else {
      // (0, e_j')(0, e_k') = (-e_k'* e_j', 0)
      const std::size_t jp = j - h;
      const std::size_t kp = k - h;
      sign = -sign;
      if (kp != 0) sign = -sign;
      j = kp;
      k = jp;
    }
    --level;
  }
  return sign;
}

SignTable::SignTable(int level) : level_(level), dim_(std::size_t{1} << level), signs_(dim_ * dim_) {
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = 0; k < dim_; ++k)
      signs_[j * dim_ + k] = static_cast<std::int8_t>(basis_product_sign(level, j, k));
}

const SignTable& SignTable::get(int level) {
  if (level < 0 || level > kMaxTableLevel)
    throw DomainError("no cached sign table for level " + std::to_string(level));
  static std::array<std::once_flag, kMaxTableLevel + 1> flags;
  static std::array<std::unique_ptr<SignTable>, kMaxTableLevel + 1> tables;
  std::call_once(flags[level], [level] { tables[level].reset(new SignTable(level)); });
  return *tables[level];
}

// ---------------------------------------------------------------- raw kernels

namespace detail {

void cd_mul_acc(int level, const double* a, const double* b, double* out, double scale) {
  if (level <= kMaxTableLevel) {
    const SignTable& t = SignTable::get(level);
    const std::size_t n = t.dim();
    for (std::size_t j = 0; j < n; ++j) {
      const double aj = a[j] * scale;
      if (aj == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        out[j ^ k] += t.sign(j, k) * aj * b[k];
      }
    }
    return;
  }
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> tmp(n);
  mul_doubling_raw(level, a, b, tmp.data());
  for (std::size_t j = 0; j < n; ++j) out[j] += scale * tmp[j];
}

void cdc_mul_acc(int level, const double* a, const double* b, double* out, double scale) {
  const std::size_t n = std::size_t{1} << level;
  const double* p = a;
  const double* q = a + n;
  const double* r = b;
  const double* s = b + n;
  cd_mul_acc(level, p, r, out, scale);
  cd_mul_acc(level, q, s, out, -scale);
  cd_mul_acc(level, p, s, out + n, scale);
  cd_mul_acc(level, q, r, out + n, scale);
}

}  // namespace detail

// ---------------------------------------------------------------- CdNumber

CdNumber::CdNumber(int level) : level_(level) {
  check_level(level);
  coords_.assign(std::size_t{1} << level, 0.0);
}

CdNumber::CdNumber(int level, std::vector<double> coords) : level_(level), coords_(std::move(coords)) {
  check_level(level);
  if (coords_.size() != (std::size_t{1} << level)) {
    throw DimensionError("CdNumber at level " + std::to_string(level) + " needs " +
                         std::to_string(std::size_t{1} << level) + " coordinates, got " +
                         std::to_string(coords_.size()));
  }
  for (double c : coords_)
    if (!std::isfinite(c)) throw DomainError("CdNumber coordinate is not finite");
}

CdNumber CdNumber::basis(int level, std::size_t j, double scale) {
  CdNumber e(level);
  if (j >= e.dim()) throw DimensionError("basis index " + std::to_string(j) + " out of range");
  e.coords_[j] = scale;
  return e;
}

CdNumber CdNumber::conj() const {
  CdNumber r = *this;
  for (std::size_t j = 1; j < r.coords_.size(); ++j) r.coords_[j] = -r.coords_[j];
  return r;
}

double CdNumber::norm_sq() const {
  double s = 0;
  for (double c : coords_) s += c * c;
  return s;
}

double CdNumber::norm() const { return std::sqrt(norm_sq()); }

bool CdNumber::is_zero() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(), [](double c) { return c == 0.0; });
}

CdNumber& CdNumber::operator+=(const CdNumber& rhs) {
  require_same_level(level_, rhs.level_, "add");
  for (std::size_t j = 0; j < coords_.size(); ++j) coords_[j] += rhs.coords_[j];
  return *this;
}

CdNumber& CdNumber::operator-=(const CdNumber& rhs) {
  require_same_level(level_, rhs.level_, "subtract");
  for (std::size_t j = 0; j < coords_.size(); ++j) coords_[j] -= rhs.coords_[j];
  return *this;
}

CdNumber& CdNumber::operator*=(double s) {
  for (double& c : coords_) c *= s;
  return *this;
}

CdNumber cd_mul(const CdNumber& a, const CdNumber& b) {
  require_same_level(a.level(), b.level(), "cd_mul");
  CdNumber out(a.level());
  detail::cd_mul_acc(a.level(), a.coords().data(), b.coords().data(), out.mutable_coords().data());
  return out;
}

CdNumber cd_mul_doubling(const CdNumber& a, const CdNumber& b) {
  require_same_level(a.level(), b.level(), "cd_mul_doubling");
  CdNumber out(a.level());
  mul_doubling_raw(a.level(), a.coords().data(), b.coords().data(), out.mutable_coords().data());
  return out;
}

CdNumber cd_inv(const CdNumber& a, double tol) {
  const double n2 = a.norm_sq();
  if (n2 == 0.0) throw SingularError("cd_inv of zero");
  CdNumber inv = a.conj() * (1.0 / n2);
  if (a.level() >= 4) {
    // a a* = |a|^2 holds at every level, so conj(a)/|a|^2 always passes the
    // product test. A zero divisor shows up as a singular left multiplication.
    const Eigen::MatrixXd L = real_rep(CdComplex(a)).topLeftCorner(a.dim(), a.dim());
    const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues().minCoeff() / std::sqrt(n2);
    if (smin <= tol) {
      throw NotInvertibleError("element is a zero divisor: left multiplication is singular",
                               {{"relative_min_singular_value", smin}});
    }
  }
  return inv;
}

CdNumber cd_pow(const CdNumber& a, unsigned m) {
  CdNumber r = CdNumber::real(a.level(), 1.0);
  for (unsigned k = 0; k < m; ++k) r = cd_mul(r, a);
  return r;
}

// ---------------------------------------------------------------- CdComplex

CdComplex::CdComplex(CdNumber re, CdNumber im) : re_(std::move(re)), im_(std::move(im)) {
  require_same_level(re_.level(), im_.level(), "CdComplex");
}

CdComplex CdComplex::scalar(int level, std::complex<double> z) {
  return {CdNumber::real(level, z.real()), CdNumber::real(level, z.imag())};
}

double CdComplex::norm() const { return std::sqrt(re_.norm_sq() + im_.norm_sq()); }

CdComplex& CdComplex::operator+=(const CdComplex& rhs) {
  re_ += rhs.re_;
  im_ += rhs.im_;
  return *this;
}

CdComplex& CdComplex::operator-=(const CdComplex& rhs) {
  re_ -= rhs.re_;
  im_ -= rhs.im_;
  return *this;
}

CdComplex& CdComplex::operator*=(double s) {
  re_ *= s;
  im_ *= s;
  return *this;
}

CdComplex cdc_mul(const CdComplex& a, const CdComplex& b) {
  require_same_level(a.level(), b.level(), "cdc_mul");
  return {cd_mul(a.re(), b.re()) - cd_mul(a.im(), b.im()), cd_mul(a.re(), b.im()) + cd_mul(a.im(), b.re())};
}

CdComplex operator*(std::complex<double> z, const CdComplex& a) {
  return {a.re() * z.real() - a.im() * z.imag(), a.im() * z.real() + a.re() * z.imag()};
}

Eigen::MatrixXcd complex_rep(const CdComplex& a) {
  const int v = a.level();
  const std::size_t n = std::size_t{1} << v;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto p = a.re().coords();
  const auto q = a.im().coords();
  if (v <= kMaxTableLevel) {
    const SignTable& t = SignTable::get(v);
    for (std::size_t j = 0; j < n; ++j) {
      if (p[j] == 0.0 && q[j] == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        c(static_cast<Eigen::Index>(j ^ k), static_cast<Eigen::Index>(k)) +=
            static_cast<double>(t.sign(j, k)) * std::complex<double>(p[j], q[j]);
      }
    }
    return c;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const CdNumber e = CdNumber::basis(v, k);
    const CdNumber pr = cd_mul(a.re(), e);
    const CdNumber qr = cd_mul(a.im(), e);
    for (std::size_t t = 0; t < n; ++t)
      c(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = {pr[t], qr[t]};
  }
  return c;
}

Eigen::MatrixXd real_rep(const CdComplex& a) {
  const Eigen::MatrixXcd c = complex_rep(a);
  const Eigen::Index n = c.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = c.real();
  r.topRightCorner(n, n) = -c.imag();
  r.bottomLeftCorner(n, n) = c.imag();
  r.bottomRightCorner(n, n) = c.real();
  return r;
}

CdComplex from_complex_rep_column(std::span<const std::complex<double>> column, int level) {
  const std::size_t n = std::size_t{1} << level;
  if (column.size() != n) throw DimensionError("complex representation column has wrong length");
  std::vector<double> re(n), im(n);
  for (std::size_t t = 0; t < n; ++t) {
    re[t] = column[t].real();
    im[t] = column[t].imag();
  }
  return {CdNumber(level, std::move(re)), CdNumber(level, std::move(im))};
}

double op_norm(const CdComplex& a) {
  if (a.im().is_zero() && a.level() <= 3) return a.re().norm();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complex_rep(a));
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------- identities

double IdentityReport::max() const {
  return std::max({left_alternative, right_alternative, moufang1, moufang2, moufang3});
}

IdentityReport identity_checks(const CdNumber& a, const CdNumber& b, const CdNumber& c) {
  require_same_level(a.level(), b.level(), "identity_checks");
  require_same_level(a.level(), c.level(), "identity_checks");
  IdentityReport r;
  const CdNumber aa = a * a;
  r.left_alternative = (aa * b - a * (a * b)).norm();
  r.right_alternative = (b * aa - (b * a) * a).norm();
  const CdNumber aba = (a * b) * a;
  r.moufang1 = (aba * c - a * (b * (a * c))).norm();
  r.moufang2 = (c * aba - ((c * a) * b) * a).norm();
  r.moufang3 = ((a * b) * (c * a) - (a * (b * c)) * a).norm();
  return r;
}

}  // namespace cdop
