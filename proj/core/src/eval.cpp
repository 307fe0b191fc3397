#include "msplace/eval.hpp"

#include <algorithm>
#include <fstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace msplace {

std::vector<double> default_thresholds(int count) {
  if (count < 2) throw ValidationError("need at least two thresholds");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (count - 1);
  return t;
}

PrCurve pr_curve(const Matrix& scores, const GroundTruth& gt, const std::vector<double>& thresholds) {
  if (scores.rows() != gt.same_place.rows() || scores.cols() != gt.same_place.cols()) {
    throw ShapeError("score matrix is " + std::to_string(scores.rows()) + "x" +
                     std::to_string(scores.cols()) + " but ground truth is " +
                     std::to_string(gt.same_place.rows()) + "x" + std::to_string(gt.same_place.cols()));
  }
  if (thresholds.empty()) throw ValidationError("no thresholds given");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw ValidationError("thresholds must be sorted ascending");
  }
  std::vector<double> pos;
  std::vector<double> neg;
  for (Index j = 0; j < scores.cols(); ++j) {
    for (Index i = 0; i < scores.rows(); ++i) {
      (gt.same_place(i, j) ? pos : neg).push_back(scores(i, j));
    }
  }
  if (pos.empty()) throw ValidationError("ground truth has no positive pairs");
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto at_least = [](const std::vector<double>& v, double t) {
    return static_cast<Index>(v.end() - std::lower_bound(v.begin(), v.end(), t));
  };

  PrCurve curve;
  const auto total_pos = static_cast<Index>(pos.size());
  for (double t : thresholds) {
    PrPoint p;
    p.threshold = t;
    p.tp = at_least(pos, t);
    p.fp = at_least(neg, t);
    p.fn = total_pos - p.tp;
    p.precision = p.tp + p.fp > 0 ? static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp) : 1.0;
    p.recall = static_cast<double>(p.tp) / static_cast<double>(total_pos);
    curve.points.push_back(p);
  }

  double prev_r = 0.0;
  double prev_p = 1.0;
  for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
    curve.auc += (it->recall - prev_r) * (it->precision + prev_p) / 2.0;
    prev_r = it->recall;
    prev_p = it->precision;
  }
  return curve;
}

std::string modality_label(const std::string& sensor, const std::string& feature) {
  std::string label = text::to_upper(feature);
  if (sensor == "intensity") return label;
  if (sensor == "disparity") return label + "-D";
  return label + "-" + sensor;
}

std::vector<ModalityShare> modality_report(const ModalityWeights& weights) {
  if (!(weights.normalizer > 0.0)) throw DegenerateModelError("modality weights sum to zero");
  std::vector<ModalityShare> out;
  const auto& sensors = weights.layout.sensors();
  for (std::size_t q = 0; q < sensors.size(); ++q) {
    for (std::size_t k = 0; k < sensors[q].features.size(); ++k) {
      out.push_back({modality_label(sensors[q].name, sensors[q].features[k].name),
                     100.0 * weights.combined(q, k) / weights.normalizer});
    }
  }
  return out;
}

void write_curve_csv(const PrCurve& curve, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "threshold,precision,recall,tp,fp,fn\n";
  for (const auto& p : curve.points) {
    os << text::decimal(p.threshold) << ',' << text::decimal(p.precision) << ','
       << text::decimal(p.recall) << ',' << p.tp << ',' << p.fp << ',' << p.fn << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

void write_report_csv(const std::vector<ModalityShare>& report, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "modality,percent\n";
  for (const auto& r : report) os << r.name << ',' << text::decimal(r.percent) << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace msplace
