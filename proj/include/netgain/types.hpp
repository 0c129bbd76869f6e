#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace netgain {

using Index = Eigen::Index;

template <typename Scalar = double>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr const char* kVersion = "0.1.0";

/// An iterative routine failed to converge or lost accuracy beyond repair.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem instance admits no solution. Carries the Phase-I objective
/// (min slack scale s*, meaningful when > 1) and, for game runs, the round
/// at which infeasibility was detected.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what,
                           double phase1_objective = std::numeric_limits<double>::quiet_NaN(),
                           long round = -1)
      : std::runtime_error(what), phase1_objective(phase1_objective), round(round) {}

  double phase1_objective;
  long round;
};

namespace detail {

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

}  // namespace netgain
