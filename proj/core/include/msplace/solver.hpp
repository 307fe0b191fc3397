#pragma once

#include <string>
#include <vector>

#include "msplace/model.hpp"

namespace msplace {

enum class SolverBackend { irls, prox_grad };

std::string to_string(SolverBackend b);
SolverBackend parse_solver_backend(const std::string& s);

struct SolverConfig {
  int max_iters = 2000;
  /// Relative objective change that ends the iteration.
  double tol = 1e-8;
  /// Floor applied to group norms (and to the residual norm for the
  /// unsquared loss) when reweighting. Part of the solved objective: see
  /// smoothed_objective().
  double epsilon = 1e-8;
  SolverBackend backend = SolverBackend::irls;

  void validate() const;
};

struct SolveResult {
  WeightMatrix w;
  /// Objective after initialization and after every iteration. For IRLS this
  /// is smoothed_objective(); for prox_grad the exact objective.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes loss(A, B, W) + lambda1 ||W||_M + lambda2 ||W||_S over W.
///
/// The IRLS backend majorizes every group norm ||v|| by
/// ||v||^2 / (2 max(||v_k||, eps)) + const and solves the resulting ridge
/// system (A A^T + D) W = A B exactly. When p > n the system is solved in the
/// n x n image space through the push-through identity, using per-block Gram
/// matrices precomputed once, so descriptor lengths in the tens of thousands
/// stay cheap. The prox_grad backend runs accelerated proximal gradient with
/// function-value restarts and the exact tree-structured prox (group_prox).
///
/// Throws ValidationError on inconsistent or non-finite input and
/// SingularityError when lambda1 = lambda2 = 0 and A A^T is rank deficient.
SolveResult solve(const FeatureMatrix& a, const ScenarioLabels& b, const Hyperparams& h,
                  const SolverConfig& cfg = {});

/// Proximal operator of step * (lambda1 ||.||_M + lambda2 ||.||_S): block
/// soft-thresholding of every feature block, then of every sensor block.
Matrix group_prox(const ModalityLayout& layout, const Matrix& w, double step, const Hyperparams& h);
WeightMatrix group_prox(const WeightMatrix& w, double step, const Hyperparams& h);

/// Gradient of 0.5 ||A^T W - B||_F^2, i.e. A (A^T W - B). Squared loss only.
Matrix smooth_gradient(const FeatureMatrix& a, const ScenarioLabels& b, const WeightMatrix& w,
                       const Hyperparams& h);

/// Objective with every group norm (and, for the unsquared loss, the residual
/// norm) replaced by its Huber smoothing at epsilon:
/// r for r >= eps, r^2 / (2 eps) + eps / 2 below. Differs from objective() by
/// at most (lambda1 * blocks + lambda2 * sensors + 1) * eps / 2.
double smoothed_objective(const FeatureMatrix& a, const ScenarioLabels& b, const WeightMatrix& w,
                          const Hyperparams& h, double epsilon);

}  // namespace msplace
