#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msplace/geo.hpp"
#include "msplace/matching.hpp"
#include "msplace/model.hpp"

namespace msplace {

struct PrPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
};

struct PrCurve {
  /// One point per threshold, in ascending threshold order.
  std::vector<PrPoint> points;
  double auc = 0.0;
};

/// `count` evenly spaced thresholds covering [0, 1].
std::vector<double> default_thresholds(int count = 201);

/// Precision/recall of "score >= threshold" decisions over every
/// (query, template) pair. Precision is 1 when nothing is predicted. The AUC
/// integrates precision over recall with the trapezoid rule, walking the
/// thresholds from high to low and starting from (recall 0, precision 1).
/// Throws ValidationError for unsorted thresholds, shape mismatch, or a
/// ground truth without positive pairs.
PrCurve pr_curve(const Matrix& scores, const GroundTruth& gt, const std::vector<double>& thresholds);

struct ModalityShare {
  std::string name;
  double percent = 0.0;
};

/// Display name of a block: upper-case feature name, with "-D" appended for
/// the disparity sensor (and "-<sensor>" for any other non-intensity sensor).
std::string modality_label(const std::string& sensor, const std::string& feature);

/// Combined weight of every block as a percentage of the normalizer.
std::vector<ModalityShare> modality_report(const ModalityWeights& weights);

struct NamedCurve {
  std::string name;
  PrCurve curve;
};

void write_curve_csv(const PrCurve& curve, const std::filesystem::path& path);
void write_report_csv(const std::vector<ModalityShare>& report, const std::filesystem::path& path);

/// Writes `pr_<name>.csv` per curve plus `pr_curves.svg` when there is at
/// least one curve, and `modality_weights.csv` / `modality_weights.svg` when a
/// report is given. Output bytes depend only on the inputs. Returns the files
/// written, in order.
std::vector<std::filesystem::path> emit_plots(const std::vector<NamedCurve>& curves,
                                              const std::optional<std::vector<ModalityShare>>& report,
                                              const std::filesystem::path& out_dir);

}  // namespace msplace
