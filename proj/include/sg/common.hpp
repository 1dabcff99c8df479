#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sg {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using SparseC = Eigen::SparseMatrix<Complex>;
using SparseD = Eigen::SparseMatrix<double>;

inline constexpr int kDefaultMaxLevel = 10;

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested work exceeds a configured limit (e.g. the level cap).
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition (level mismatch,
/// non-Hermitian operator, incompatible bases, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A solver failed to reach its tolerance; the message carries the
/// achieved residual.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message lists the offending rows.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Seeded random stream. The normal generator is hand-rolled (Box-Muller
/// over the raw mt19937_64 output) so that sequences are identical across
/// standard library implementations, which keeps frozen test values and
/// report bytes stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sg
