#include "cdop/random.hpp"

#include <cmath>
#include <numbers>

#include "cdop/errors.hpp"

namespace cdop {

double Rng::normal() {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  const double w = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * w);
}

long Rng::integer(long lo, long hi) {
  if (hi < lo) throw DomainError("empty integer range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(eng_() % span);
}

CdNumber random_number(Rng& rng, int level) {
  std::vector<double> c(std::size_t{1} << level);
  for (double& x : c) x = rng.uniform(-1.0, 1.0);
  return {level, std::move(c)};
}

CdNumber random_unit(Rng& rng, int level) {
  std::vector<double> c(std::size_t{1} << level);
  double s = 0;
  do {
    s = 0;
    for (double& x : c) {
      x = rng.normal();
      s += x * x;
    }
  } while (s == 0.0);
  for (double& x : c) x /= std::sqrt(s);
  return {level, std::move(c)};
}

CdComplex random_complex(Rng& rng, int level, bool with_i) {
  CdNumber re = random_number(rng, level);
  if (!with_i) return CdComplex(std::move(re));
  return {std::move(re), random_number(rng, level)};
}

CdMatrix random_matrix(Rng& rng, int level, std::size_t rows, std::size_t cols, bool with_i) {
  CdMatrix m(level, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, random_complex(rng, level, with_i));
  return m;
}

BandPeriodicOp random_op(Rng& rng, int level, std::size_t d, std::size_t n, std::size_t K, bool with_i, double norm) {
  std::vector<CdMatrix> blocks;
  blocks.reserve(n * (2 * K + 1));
  for (std::size_t i = 0; i < n * (2 * K + 1); ++i) blocks.push_back(random_matrix(rng, level, d, d, with_i));
  BandPeriodicOp op(level, d, n, K, std::move(blocks));
  if (norm > 0) {
    const double b = op.op_norm_bound();
    if (b > 0) op = scale(op, norm / b);
  }
  return op;
}

}  // namespace cdop
