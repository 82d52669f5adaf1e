#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dofid {

/// Number of per-window traffic statistics (mean length, packet rate, byte rate).
inline constexpr std::size_t kNumStats = 3;

using Vec3 = std::array<double, kNumStats>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using NodeId = std::uint32_t;

/// Invalid or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counters for recoverable numerical events. One instance per node pipeline;
/// never shared across threads.
struct Diagnostics {
  std::uint64_t psi_clamped = 0;        // negative radicand in the activation
  std::uint64_t normalize_zero = 0;     // normalization before any maxima seen
  std::uint64_t rescale_skipped = 0;    // hidden layer produced an all-zero output
  std::uint64_t empty_benign_set = 0;   // learning requested without data
  std::uint64_t refit_skipped = 0;      // output refit without data

  Diagnostics& operator+=(const Diagnostics& other) {
    psi_clamped += other.psi_clamped;
    normalize_zero += other.normalize_zero;
    rescale_skipped += other.rescale_skipped;
    empty_benign_set += other.empty_benign_set;
    refit_skipped += other.refit_skipped;
    return *this;
  }
};

}  // namespace dofid
