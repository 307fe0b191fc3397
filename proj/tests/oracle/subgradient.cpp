#include "subgradient.hpp"

#include <cmath>

namespace msplace::testing {

double reference_objective(const Instance& inst, const Eigen::MatrixXd& w) {
  double f = 0.5 * (inst.a.transpose() * w - inst.b).squaredNorm();
  for (std::size_t q = 0; q < inst.layout.sensor_count(); ++q) {
    const RowRange s = inst.layout.sensor_range(q);
    f += inst.hyper.lambda2 * w.middleRows(s.begin, s.size()).norm();
    for (std::size_t k = 0; k < inst.layout.feature_count(q); ++k) {
      const RowRange r = inst.layout.feature_range(q, k);
      f += inst.hyper.lambda1 * w.middleRows(r.begin, r.size()).norm();
    }
  }
  return f;
}

OracleResult subgradient_oracle(const Instance& inst, int iterations) {
  const Eigen::MatrixXd gram = inst.a * inst.a.transpose();
  const double lip = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(inst.a.rows(), inst.b.cols());
  OracleResult best{reference_objective(inst, w), w};
  auto add_group = [&](Eigen::MatrixXd& g, const RowRange& r, double lambda) {
    const double nrm = w.middleRows(r.begin, r.size()).norm();
    if (nrm > 0.0) g.middleRows(r.begin, r.size()) += lambda / nrm * w.middleRows(r.begin, r.size());
  };
  for (int k = 0; k < iterations; ++k) {
    Eigen::MatrixXd g = inst.a * (inst.a.transpose() * w - inst.b);
    for (std::size_t q = 0; q < inst.layout.sensor_count(); ++q) {
      add_group(g, inst.layout.sensor_range(q), inst.hyper.lambda2);
      for (std::size_t f = 0; f < inst.layout.feature_count(q); ++f) {
        add_group(g, inst.layout.feature_range(q, f), inst.hyper.lambda1);
      }
    }
    w -= g / (lip * std::sqrt(static_cast<double>(k) + 1.0));
    const double f = reference_objective(inst, w);
    if (f < best.objective) best = {f, w};
  }
  return best;
}

}  // namespace msplace::testing
