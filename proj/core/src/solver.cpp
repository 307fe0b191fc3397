#include "msplace/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msplace/error.hpp"

namespace msplace {

namespace {

double huber(double r, double eps) { return r >= eps ? r : r * r / (2.0 * eps) + eps / 2.0; }

struct GroupNorms {
  std::vector<double> feature;
  std::vector<double> sensor;
};

GroupNorms group_norms(const ModalityLayout& layout, const Matrix& w) {
  GroupNorms n;
  n.feature.reserve(layout.block_count());
  n.sensor.assign(layout.sensor_count(), 0.0);
  for (const auto& b : layout.blocks()) {
    const double sq = w.middleRows(b.rows.begin, b.rows.size()).squaredNorm();
    n.feature.push_back(std::sqrt(sq));
    n.sensor[b.sensor] += sq;
  }
  for (auto& s : n.sensor) s = std::sqrt(s);
  return n;
}

double smoothed_value(const ModalityLayout& layout, const Matrix& at_w_minus_b, const Matrix& w,
                      const Hyperparams& h, double eps) {
  const double r2 = at_w_minus_b.squaredNorm();
  double f = h.loss == LossVariant::squared ? 0.5 * r2 : huber(std::sqrt(r2), eps);
  const GroupNorms n = group_norms(layout, w);
  for (double r : n.feature) f += h.lambda1 * huber(r, eps);
  for (double r : n.sensor) f += h.lambda2 * huber(r, eps);
  return f;
}

double exact_value(const ModalityLayout& layout, const Matrix& at_w_minus_b, const Matrix& w,
                   const Hyperparams& h) {
  const double r2 = at_w_minus_b.squaredNorm();
  const double loss = h.loss == LossVariant::squared ? 0.5 * r2 : std::sqrt(r2);
  return loss + h.lambda1 * m_norm(layout, w) + h.lambda2 * s_norm(layout, w);
}

void check_inputs(const FeatureMatrix& a, const ScenarioLabels& b, const Hyperparams& h) {
  h.validate();
  if (a.image_count() != b.image_count()) {
    throw ShapeError("feature matrix has " + std::to_string(a.image_count()) +
                     " images but labels have " + std::to_string(b.image_count()));
  }
  if (!b.values().allFinite()) throw ValidationError("labels contain non-finite entries");
}

double relative_change(double prev, double cur) {
  return std::abs(prev - cur) / std::max(std::abs(prev), std::numeric_limits<double>::min());
}

// Rejects the unregularized problem when A A^T is not positive definite.
void require_nonsingular(const Matrix& a) {
  const Index p = a.rows();
  const Index n = a.cols();
  const char* advice =
      "A A^T is rank deficient and lambda1 = lambda2 = 0; use a nonzero regularization weight";
  if (p > n) throw SingularityError(advice);
  const Matrix gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (!(hi > 0.0) || lo <= 1e-12 * hi) throw SingularityError(advice);
}

class IrlsSolver {
 public:
  IrlsSolver(const FeatureMatrix& a, const ScenarioLabels& b, const Hyperparams& h,
             const SolverConfig& cfg)
      : layout_(a.layout()), a_(a.values()), b_(b.values()), h_(h), cfg_(cfg),
        dual_(a_.rows() > a_.cols()) {
    if (dual_) {
      for (const auto& blk : layout_.blocks()) {
        const auto ag = a_.middleRows(blk.rows.begin, blk.rows.size());
        block_gram_.push_back(ag.transpose() * ag);
      }
    } else {
      gram_ = a_ * a_.transpose();
      ab_ = a_ * b_;
    }
  }

  SolveResult run() {
    Matrix w = initial();
    Matrix resid = a_.transpose() * w - b_;
    SolveResult out{WeightMatrix(layout_, w), {}, 0, false};
    out.objective_trace.push_back(smoothed_value(layout_, resid, w, h_, cfg_.epsilon));
    for (int it = 1; it <= cfg_.max_iters; ++it) {
      const double scale =
          h_.loss == LossVariant::squared ? 1.0 : std::max(resid.norm(), cfg_.epsilon);
      w = reweighted_solve(w, scale);
      resid = a_.transpose() * w - b_;
      const double f = smoothed_value(layout_, resid, w, h_, cfg_.epsilon);
      const double prev = out.objective_trace.back();
      out.objective_trace.push_back(f);
      out.iterations = it;
      if (relative_change(prev, f) <= cfg_.tol) {
        out.converged = true;
        break;
      }
    }
    out.w = WeightMatrix(layout_, std::move(w));
    return out;
  }

 private:
  Matrix initial() const {
    const double ridge = h_.lambda1 + h_.lambda2;
    if (dual_) {
      // (A A^T + mu I)^-1 A B = A (A^T A + mu I)^-1 B
      Matrix k = Matrix::Zero(a_.cols(), a_.cols());
      for (const auto& g : block_gram_) k += g;
      k.diagonal().array() += ridge;
      return a_ * solve_spd(k, b_);
    }
    Matrix m = gram_;
    m.diagonal().array() += ridge;
    return solve_spd(m, ab_);
  }

  // Diagonal reweighting per feature block, already multiplied by `scale`.
  std::vector<double> block_weights(const Matrix& w, double scale) const {
    const GroupNorms n = group_norms(layout_, w);
    std::vector<double> d(layout_.block_count());
    for (std::size_t g = 0; g < d.size(); ++g) {
      const auto& blk = layout_.blocks()[g];
      d[g] = scale * (h_.lambda1 / std::max(n.feature[g], cfg_.epsilon) +
                      h_.lambda2 / std::max(n.sensor[blk.sensor], cfg_.epsilon));
    }
    return d;
  }

  Matrix reweighted_solve(const Matrix& w, double scale) const {
    const std::vector<double> d = block_weights(w, scale);
    const auto& blocks = layout_.blocks();
    if (dual_) {
      Matrix k = Matrix::Identity(a_.cols(), a_.cols());
      for (std::size_t g = 0; g < blocks.size(); ++g) k += block_gram_[g] / d[g];
      const Matrix z = solve_spd(k, b_);
      Matrix next(a_.rows(), b_.cols());
      for (std::size_t g = 0; g < blocks.size(); ++g) {
        const auto& r = blocks[g].rows;
        next.middleRows(r.begin, r.size()) = a_.middleRows(r.begin, r.size()) * z / d[g];
      }
      return next;
    }
    Matrix m = gram_;
    for (std::size_t g = 0; g < blocks.size(); ++g) {
      const auto& r = blocks[g].rows;
      m.diagonal().segment(r.begin, r.size()).array() += d[g];
    }
    return solve_spd(m, ab_);
  }

  static Matrix solve_spd(const Matrix& m, const Matrix& rhs) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
      throw SingularityError("reweighted system is not positive definite; increase regularization");
    }
    Matrix x = llt.solve(rhs);
    if (!x.allFinite()) throw SingularityError("reweighted solve produced non-finite weights");
    return x;
  }

  const ModalityLayout& layout_;
  const Matrix& a_;
  const Matrix& b_;
  Hyperparams h_;
  SolverConfig cfg_;
  bool dual_;
  Matrix gram_;
  Matrix ab_;
  std::vector<Matrix> block_gram_;
};

double lipschitz_constant(const Matrix& a) {
  const Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

SolveResult prox_gradient(const FeatureMatrix& fa, const ScenarioLabels& fb, const Hyperparams& h,
                          const SolverConfig& cfg) {
  if (h.loss != LossVariant::squared) {
    throw ValidationError("the prox_grad backend requires the squared loss");
  }
  const auto& layout = fa.layout();
  const Matrix& a = fa.values();
  const Matrix& b = fb.values();
  const double lip = lipschitz_constant(a);

  Matrix w = Matrix::Zero(a.rows(), b.cols());
  SolveResult out{WeightMatrix(layout, w), {}, 0, false};
  out.objective_trace.push_back(exact_value(layout, -b, w, h));
  if (!(lip > 0.0)) {
    out.converged = true;
    return out;
  }
  const double step = 1.0 / lip;

  auto prox_step = [&](const Matrix& y) {
    const Matrix grad = a * (a.transpose() * y - b);
    return group_prox(layout, y - step * grad, step, h);
  };

  Matrix y = w;
  double t = 1.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const double prev = out.objective_trace.back();
    Matrix next = prox_step(y);
    double f = exact_value(layout, a.transpose() * next - b, next, h);
    if (f > prev) {
      // Momentum overshot: restart from the current iterate.
      t = 1.0;
      next = prox_step(w);
      f = exact_value(layout, a.transpose() * next - b, next, h);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - w);
    const double moved = (next - w).norm();
    w = std::move(next);
    t = t_next;
    out.objective_trace.push_back(f);
    out.iterations = it;
    if (relative_change(prev, f) <= cfg.tol &&
        moved <= std::sqrt(cfg.tol) * std::max(1.0, w.norm())) {
      out.converged = true;
      break;
    }
  }
  out.w = WeightMatrix(layout, std::move(w));
  return out;
}

}  // namespace

std::string to_string(SolverBackend b) { return b == SolverBackend::irls ? "irls" : "prox_grad"; }

SolverBackend parse_solver_backend(const std::string& s) {
  if (s == "irls") return SolverBackend::irls;
  if (s == "prox_grad") return SolverBackend::prox_grad;
  throw ValidationError("unknown solver backend '" + s + "' (expected irls|prox_grad)");
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw ValidationError("solver max_iters must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("solver tol must be > 0");
  if (!(epsilon > 0.0)) throw ValidationError("solver epsilon must be > 0");
}

SolveResult solve(const FeatureMatrix& a, const ScenarioLabels& b, const Hyperparams& h,
                  const SolverConfig& cfg) {
  cfg.validate();
  check_inputs(a, b, h);
  if (h.lambda1 == 0.0 && h.lambda2 == 0.0) require_nonsingular(a.values());
  if (cfg.backend == SolverBackend::prox_grad) return prox_gradient(a, b, h, cfg);
  return IrlsSolver(a, b, h, cfg).run();
}

Matrix group_prox(const ModalityLayout& layout, const Matrix& w, double step, const Hyperparams& h) {
  if (!(step > 0.0)) throw ValidationError("prox step must be > 0");
  if (w.rows() != layout.total_dim()) throw ShapeError("prox input does not match layout");
  Matrix out = w;
  auto shrink = [&](Index begin, Index size, double thresh) {
    auto blk = out.middleRows(begin, size);
    const double norm = blk.norm();
    if (norm <= thresh || norm == 0.0) {
      blk.setZero();
    } else {
      blk *= 1.0 - thresh / norm;
    }
  };
  if (h.lambda1 > 0.0) {
    for (const auto& b : layout.blocks()) shrink(b.rows.begin, b.rows.size(), step * h.lambda1);
  }
  if (h.lambda2 > 0.0) {
    for (std::size_t q = 0; q < layout.sensor_count(); ++q) {
      const RowRange r = layout.sensor_range(q);
      shrink(r.begin, r.size(), step * h.lambda2);
    }
  }
  return out;
}

WeightMatrix group_prox(const WeightMatrix& w, double step, const Hyperparams& h) {
  return WeightMatrix(w.layout(), group_prox(w.layout(), w.values(), step, h));
}

Matrix smooth_gradient(const FeatureMatrix& a, const ScenarioLabels& b, const WeightMatrix& w,
                       const Hyperparams& h) {
  if (h.loss != LossVariant::squared) {
    throw ValidationError("smooth_gradient is defined for the squared loss only");
  }
  check_inputs(a, b, h);
  if (!(a.layout() == w.layout())) throw ShapeError("feature and weight layouts differ");
  if (w.values().cols() != b.scenario_count()) throw ShapeError("weight and label columns differ");
  return a.values() * (a.values().transpose() * w.values() - b.values());
}

double smoothed_objective(const FeatureMatrix& a, const ScenarioLabels& b, const WeightMatrix& w,
                          const Hyperparams& h, double epsilon) {
  check_inputs(a, b, h);
  if (!(a.layout() == w.layout())) throw ShapeError("feature and weight layouts differ");
  if (w.values().cols() != b.scenario_count()) throw ShapeError("weight and label columns differ");
  const Matrix resid = a.values().transpose() * w.values() - b.values();
  return smoothed_value(w.layout(), resid, w.values(), h, epsilon);
}

}  // namespace msplace
