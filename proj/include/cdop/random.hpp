#ifndef CDOP_RANDOM_HPP
#define CDOP_RANDOM_HPP

#include <cstdint>
#include <random>

#include "cdop/cd_matrix.hpp"
#include "cdop/sequence_ops.hpp"

namespace cdop {

/// Seeded generator whose output is identical across standard libraries
/// (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Standard normal by Box-Muller.
  double normal();
  /// Uniform integer in [lo, hi].
  long integer(long lo, long hi);
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

/// Coordinates uniform on [-1, 1].
CdNumber random_number(Rng& rng, int level);
/// Uniform on the unit sphere of A_level.
CdNumber random_unit(Rng& rng, int level);
CdComplex random_complex(Rng& rng, int level, bool with_i = true);
CdMatrix random_matrix(Rng& rng, int level, std::size_t rows, std::size_t cols, bool with_i = true);
/// Operator with every block random, scaled so that op_norm_bound() == norm
/// (norm <= 0 leaves the raw scale).
BandPeriodicOp random_op(Rng& rng, int level, std::size_t d, std::size_t n, std::size_t K, bool with_i = true,
                         double norm = 0.0);

}  // namespace cdop

#endif  // CDOP_RANDOM_HPP
