#pragma once

#include "instances.hpp"

namespace msplace::testing {

/// Weighted checksum of an instance's data and weights.
inline double fingerprint(const Instance& inst) {
  double s = inst.hyper.lambda1 + 2.0 * inst.hyper.lambda2;
  for (Eigen::Index j = 0; j < inst.a.cols(); ++j) {
    for (Eigen::Index i = 0; i < inst.a.rows(); ++i) s += inst.a(i, j) * static_cast<double>(1 + i + 3 * j);
  }
  for (Eigen::Index k = 0; k < inst.b.cols(); ++k) s += static_cast<double>(k + 1) * inst.b.col(k).sum();
  return s;
}

}  // namespace msplace::testing
