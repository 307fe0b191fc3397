#include "msplace/model.hpp"

#include <cmath>

#include "msplace/error.hpp"

namespace msplace {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + " contains non-finite entries");
}

void require_rows(const ModalityLayout& layout, const Matrix& m, const char* what) {
  if (m.rows() != layout.total_dim()) {
    throw ShapeError(std::string(what) + " has " + std::to_string(m.rows()) +
                     " rows but the layout has total dimension " +
                     std::to_string(layout.total_dim()));
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(ModalityLayout layout, Matrix values, std::vector<std::string> image_ids)
    : layout_(std::move(layout)), values_(std::move(values)), image_ids_(std::move(image_ids)) {
  if (layout_.empty()) throw LayoutError("feature matrix needs a non-empty layout");
  require_rows(layout_, values_, "feature matrix");
  if (values_.cols() < 1) throw ShapeError("feature matrix needs at least one image");
  if (static_cast<Index>(image_ids_.size()) != values_.cols()) {
    throw ShapeError("feature matrix has " + std::to_string(values_.cols()) + " columns but " +
                     std::to_string(image_ids_.size()) + " image ids");
  }
  require_finite(values_, "feature matrix");
}

ScenarioLabels::ScenarioLabels(Matrix values, std::vector<std::string> scenario_names)
    : values_(std::move(values)), names_(std::move(scenario_names)) {
  if (values_.cols() < 1) throw ValidationError("labels need at least one scenario");
  if (static_cast<Index>(names_.size()) != values_.cols()) {
    throw ShapeError("labels have " + std::to_string(values_.cols()) + " columns but " +
                     std::to_string(names_.size()) + " scenario names");
  }
  for (Index i = 0; i < values_.rows(); ++i) {
    int ones = 0;
    for (Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("label entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not binary");
      }
      ones += v == 1.0;
    }
    if (ones != 1) {
      throw ValidationError("image " + std::to_string(i) + " belongs to " + std::to_string(ones) +
                            " scenarios; exactly one is required");
    }
  }
}

ScenarioLabels ScenarioLabels::from_indices(const std::vector<std::size_t>& scenario_of_image,
                                            std::vector<std::string> scenario_names) {
  Matrix b = Matrix::Zero(static_cast<Index>(scenario_of_image.size()),
                          static_cast<Index>(scenario_names.size()));
  for (std::size_t i = 0; i < scenario_of_image.size(); ++i) {
    if (scenario_of_image[i] >= scenario_names.size()) {
      throw ValidationError("scenario index out of range for image " + std::to_string(i));
    }
    b(static_cast<Index>(i), static_cast<Index>(scenario_of_image[i])) = 1.0;
  }
  return ScenarioLabels(std::move(b), std::move(scenario_names));
}

WeightMatrix::WeightMatrix(ModalityLayout layout, Matrix values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (layout_.empty()) throw LayoutError("weight matrix needs a non-empty layout");
  require_rows(layout_, values_, "weight matrix");
  if (values_.cols() < 1) throw ShapeError("weight matrix needs at least one column");
  require_finite(values_, "weight matrix");
}

std::string to_string(LossVariant v) {
  return v == LossVariant::squared ? "squared" : "unsquared";
}

LossVariant parse_loss_variant(const std::string& s) {
  if (s == "squared") return LossVariant::squared;
  if (s == "unsquared") return LossVariant::unsquared;
  throw ValidationError("unknown loss variant '" + s + "' (expected squared|unsquared)");
}

void Hyperparams::validate() const {
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) throw ValidationError("lambda1 must be finite and >= 0");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw ValidationError("lambda2 must be finite and >= 0");
}

ConstRowBlock block_view(const WeightMatrix& w, std::size_t sensor, std::optional<std::size_t> feature) {
  const RowRange r = feature ? w.layout().feature_range(sensor, *feature)
                             : w.layout().sensor_range(sensor);
  return w.values().middleRows(r.begin, r.size());
}

double m_norm(const ModalityLayout& layout, const Matrix& w) {
  require_rows(layout, w, "weight matrix");
  double total = 0.0;
  for (const auto& b : layout.blocks()) total += w.middleRows(b.rows.begin, b.rows.size()).norm();
  return total;
}

double m_norm(const WeightMatrix& w) { return m_norm(w.layout(), w.values()); }

double s_norm(const ModalityLayout& layout, const Matrix& w) {
  require_rows(layout, w, "weight matrix");
  double total = 0.0;
  for (std::size_t q = 0; q < layout.sensor_count(); ++q) {
    const RowRange r = layout.sensor_range(q);
    total += w.middleRows(r.begin, r.size()).norm();
  }
  return total;
}

double s_norm(const WeightMatrix& w) { return s_norm(w.layout(), w.values()); }

double loss_value(const Matrix& a, const Matrix& b, const Matrix& w, LossVariant variant) {
  if (a.rows() != w.rows() || a.cols() != b.rows() || w.cols() != b.cols()) {
    throw ShapeError("objective dimensions disagree: A is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", B is " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ", W is " + std::to_string(w.rows()) + "x" +
                     std::to_string(w.cols()));
  }
  const double r2 = (a.transpose() * w - b).squaredNorm();
  return variant == LossVariant::squared ? 0.5 * r2 : std::sqrt(r2);
}

double objective(const FeatureMatrix& a, const ScenarioLabels& b, const WeightMatrix& w,
                 const Hyperparams& h) {
  h.validate();
  if (!(a.layout() == w.layout())) throw ShapeError("feature and weight layouts differ");
  return loss_value(a.values(), b.values(), w.values(), h.loss) + h.lambda1 * m_norm(w) +
         h.lambda2 * s_norm(w);
}

}  // namespace msplace
