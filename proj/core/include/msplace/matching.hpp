#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msplace/geo.hpp"
#include "msplace/model.hpp"

namespace msplace {

/// Modality importance derived from a solved weight matrix: per feature block
/// the Frobenius norm of its rows, per sensor the norm of the sensor rows.
struct ModalityWeights {
  ModalityLayout layout;
  std::vector<std::vector<double>> feature_w;  // [sensor][feature]
  std::vector<double> sensor_w;                // [sensor]
  /// Sum over all blocks of sensor_w * feature_w.
  double normalizer = 0.0;

  /// sensor_w[q] * feature_w[q][k].
  double combined(std::size_t sensor, std::size_t feature) const {
    return sensor_w[sensor] * feature_w[sensor][feature];
  }
};

/// Throws DegenerateModelError when W is identically zero.
ModalityWeights extract_weights(const WeightMatrix& w);

/// Every block weighted equally: the plain concatenation baseline.
ModalityWeights equal_weights(const ModalityLayout& layout);

/// exp(-||a - b||_2 / sqrt(dim)); 1 for identical blocks, decreasing with
/// distance.
double pairwise_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// Weighted block similarity normalized by the weights' normalizer, so
/// identical columns score exactly 1. Result in [0, 1].
double score(const Eigen::Ref<const Vector>& query, const Eigen::Ref<const Vector>& templ,
             const ModalityWeights& weights);

struct Candidate {
  Index template_index = 0;
  std::string template_id;
  double score = 0.0;
};

struct MatchReport {
  std::vector<std::string> query_ids;
  std::vector<std::string> template_ids;
  /// queries x templates.
  Matrix scores;
  /// Same pairs scored with equal_weights().
  Matrix baseline_scores;
  /// Per query, templates by descending score; ties by template index.
  std::vector<std::vector<Candidate>> ranked;
  double threshold = 0.0;
  /// Pairs whose score reaches the threshold (queries x templates).
  BoolMatrix accepted;
  /// Filled in when ground truth is known.
  std::optional<BoolMatrix> ground_truth;

  Index accepted_count() const;
};

/// Scores every query column against every template column. Both matrices
/// must share a layout and normalization. Throws ValidationError for an empty
/// template set and ShapeError for mismatched layouts.
MatchReport match(const FeatureMatrix& queries, const FeatureMatrix& templates,
                  const ModalityWeights& weights, double threshold);

/// Score matrix with equal_weights() only.
Matrix score_matrix(const FeatureMatrix& queries, const FeatureMatrix& templates,
                    const ModalityWeights& weights);

/// Fraction of queries (with at least one true template) whose best-scoring
/// template is a true match. Ties go to the lowest template index.
double top1_recall(const Matrix& scores, const BoolMatrix& same_place);

/// CSV with a `query_id` header cell followed by template ids, one row per
/// query.
void write_score_csv(const Matrix& scores, const std::vector<std::string>& query_ids,
                     const std::vector<std::string>& template_ids,
                     const std::filesystem::path& path);

struct ScoreTable {
  std::vector<std::string> query_ids;
  std::vector<std::string> template_ids;
  Matrix scores;
};
ScoreTable read_score_csv(const std::filesystem::path& path);

}  // namespace msplace
