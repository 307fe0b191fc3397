#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msplace/layout.hpp"

namespace msplace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ConstRowBlock = Eigen::Block<const Matrix>;

/// Stacked multimodal descriptors, one column per image (p x n).
class FeatureMatrix {
 public:
  FeatureMatrix(ModalityLayout layout, Matrix values, std::vector<std::string> image_ids);

  const ModalityLayout& layout() const { return layout_; }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& image_ids() const { return image_ids_; }
  Index image_count() const { return values_.cols(); }

 private:
  ModalityLayout layout_;
  Matrix values_;
  std::vector<std::string> image_ids_;
};

/// One-hot image-to-scenario membership (n x c).
class ScenarioLabels {
 public:
  ScenarioLabels(Matrix values, std::vector<std::string> scenario_names);
  /// Builds the one-hot matrix from a scenario index per image.
  static ScenarioLabels from_indices(const std::vector<std::size_t>& scenario_of_image,
                                     std::vector<std::string> scenario_names);

  const Matrix& values() const { return values_; }
  const std::vector<std::string>& scenario_names() const { return names_; }
  Index image_count() const { return values_.rows(); }
  Index scenario_count() const { return values_.cols(); }

 private:
  Matrix values_;
  std::vector<std::string> names_;
};

/// Learned p x c importance weights.
class WeightMatrix {
 public:
  WeightMatrix(ModalityLayout layout, Matrix values);

  const ModalityLayout& layout() const { return layout_; }
  const Matrix& values() const { return values_; }

 private:
  ModalityLayout layout_;
  Matrix values_;
};

enum class LossVariant { squared, unsquared };

std::string to_string(LossVariant v);
LossVariant parse_loss_variant(const std::string& s);

struct Hyperparams {
  double lambda1 = 0.1;
  double lambda2 = 0.01;
  LossVariant loss = LossVariant::squared;

  void validate() const;
};

/// Rows of the addressed block; feature omitted selects the whole sensor.
ConstRowBlock block_view(const WeightMatrix& w, std::size_t sensor,
                         std::optional<std::size_t> feature = std::nullopt);

/// Sum of Frobenius norms of the feature blocks.
double m_norm(const ModalityLayout& layout, const Matrix& w);
double m_norm(const WeightMatrix& w);
/// Sum of Frobenius norms of the sensor blocks.
double s_norm(const ModalityLayout& layout, const Matrix& w);
double s_norm(const WeightMatrix& w);

/// Data-fit term only: 0.5 * ||A^T W - B||_F^2 (squared) or ||A^T W - B||_F.
double loss_value(const Matrix& a, const Matrix& b, const Matrix& w, LossVariant variant);

/// loss + lambda1 * ||W||_M + lambda2 * ||W||_S.
double objective(const FeatureMatrix& a, const ScenarioLabels& b, const WeightMatrix& w,
                 const Hyperparams& h);

}  // namespace msplace
