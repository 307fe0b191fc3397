#pragma once

#include <Eigen/Dense>

#include "instances.hpp"

namespace msplace::testing {

struct OracleResult {
  double objective = 0.0;
  Eigen::MatrixXd w;
};

/// Objective evaluated from first principles: 0.5 ||A^T W - B||^2 plus
/// lambda1 times the feature-block norms plus lambda2 times the sensor-block
/// norms, with blocks read from the layout's row ranges.
double reference_objective(const Instance& inst, const Eigen::MatrixXd& w);

/// Subgradient descent on the exact objective with diminishing steps
/// 1 / (L sqrt(k + 1)), started at zero, keeping the best iterate. Every
/// iterate is an upper bound on the optimum.
OracleResult subgradient_oracle(const Instance& inst, int iterations = 200000);

}  // namespace msplace::testing
