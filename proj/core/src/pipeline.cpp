#include "msplace/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace fs = std::filesystem;

namespace msplace {

namespace {

std::vector<FramePair> all_frames(const std::vector<Run>& runs) {
  std::vector<FramePair> out;
  for (const auto& r : runs) out.insert(out.end(), r.frames.begin(), r.frames.end());
  return out;
}

std::vector<LatLon> all_positions(const std::vector<Run>& runs) {
  std::vector<LatLon> out;
  for (const auto& r : runs) {
    const auto p = r.positions();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

void check_frame_size(const std::vector<Run>& runs, const PipelineConfig& cfg) {
  for (const auto& r : runs) {
    for (const auto& f : r.frames) {
      if (f.intensity.width != cfg.frame_width || f.intensity.height != cfg.frame_height) {
        throw ValidationError("frame '" + f.intensity.image_id + "' of run " + r.info.name() + " is " +
                              std::to_string(f.intensity.width) + "x" + std::to_string(f.intensity.height) +
                              ", expected " + std::to_string(cfg.frame_width) + "x" +
                              std::to_string(cfg.frame_height));
      }
    }
  }
}

}  // namespace

TrainResult train(const std::vector<Run>& runs, const PipelineConfig& cfg,
                  const std::vector<ExternalFeatures>& external) {
  cfg.validate();
  if (runs.size() < 2) {
    throw ValidationError("training needs at least 2 scenarios, got " + std::to_string(runs.size()));
  }
  std::vector<std::size_t> scenario_of_image;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].frames.empty()) throw ValidationError("run " + runs[i].info.name() + " has no frames");
    scenario_of_image.insert(scenario_of_image.end(), runs[i].frames.size(), i);
    names.push_back(runs[i].info.name());
  }
  check_frame_size(runs, cfg);

  PipelineConfig model_cfg = cfg;
  model_cfg.descriptors.external.clear();
  for (const auto& e : external) model_cfg.descriptors.external.push_back(e.spec);

  Extraction ex = extract_all(all_frames(runs), model_cfg.descriptors, external);
  const ScenarioLabels labels = ScenarioLabels::from_indices(scenario_of_image, names);
  SolveResult solved = solve(ex.features, labels, cfg.hyper, cfg.solver);
  ModelFile model{model_cfg, std::move(names), std::move(ex.normalization), solved.w};
  model.validate();
  return {std::move(model), std::move(solved)};
}

MatchOutcome match_runs(const ModelFile& model, const std::vector<Run>& templates,
                        const std::vector<Run>& queries, double threshold, double radius_m,
                        int threshold_count, const std::vector<ExternalFeatures>& external) {
  check_frame_size(templates, model.config);
  check_frame_size(queries, model.config);
  const auto& d = model.config.descriptors;
  const FeatureMatrix t = extract_normalized(all_frames(templates), d, model.normalization, external);
  const FeatureMatrix q = extract_normalized(all_frames(queries), d, model.normalization, external);
  model.check_features(t);
  model.check_features(q);

  MatchOutcome out{match(q, t, model.modality_weights(), threshold),
                   build_ground_truth(all_positions(queries), all_positions(templates), radius_m),
                   {}, {}, {}, 0.0, 0.0};
  out.report.ground_truth = out.ground_truth.same_place;
  const auto th = default_thresholds(threshold_count);
  out.weighted = pr_curve(out.report.scores, out.ground_truth, th);
  out.baseline = pr_curve(out.report.baseline_scores, out.ground_truth, th);
  out.modalities = modality_report(model.modality_weights());
  out.top1_weighted = top1_recall(out.report.scores, out.ground_truth.same_place);
  out.top1_baseline = top1_recall(out.report.baseline_scores, out.ground_truth.same_place);
  return out;
}

std::string summarize(const MatchOutcome& o, const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "queries " << o.report.query_ids.size() << '\n'
     << "templates " << o.report.template_ids.size() << '\n'
     << "positive_pairs " << o.ground_truth.same_place.count() << '\n'
     << "radius_m " << text::decimal(o.ground_truth.radius_m) << '\n'
     << "threshold " << text::decimal(o.report.threshold) << '\n'
     << "accepted " << o.report.accepted_count() << '\n'
     << "auc_weighted " << text::decimal(o.weighted.auc) << '\n'
     << "auc_baseline " << text::decimal(o.baseline.auc) << '\n'
     << "top1_weighted " << text::decimal(o.top1_weighted) << '\n'
     << "top1_baseline " << text::decimal(o.top1_baseline) << '\n';
  os << "modalities\n";
  for (const auto& m : o.modalities) os << "  " << m.name << ' ' << text::decimal(m.percent) << '\n';
  os << "config\n" << cfg.to_text();
  return os.str();
}

std::vector<fs::path> write_match_outputs(const MatchOutcome& o, const PipelineConfig& cfg,
                                          const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> files;
  const auto& r = o.report;
  write_score_csv(r.scores, r.query_ids, r.template_ids, out_dir / "scores.csv");
  files.push_back(out_dir / "scores.csv");
  write_score_csv(r.baseline_scores, r.query_ids, r.template_ids, out_dir / "scores_baseline.csv");
  files.push_back(out_dir / "scores_baseline.csv");
  write_score_csv(o.ground_truth.same_place.cast<double>().matrix(), r.query_ids, r.template_ids,
                  out_dir / "ground_truth.csv");
  files.push_back(out_dir / "ground_truth.csv");

  {
    const fs::path p = out_dir / "matches.csv";
    std::ofstream os(p);
    if (!os) throw IoError("cannot write " + p.string());
    os << "query_id,best_template_id,score,accepted,correct\n";
    for (std::size_t qi = 0; qi < r.ranked.size(); ++qi) {
      const Candidate& best = r.ranked[qi].front();
      const auto q = static_cast<Index>(qi);
      os << r.query_ids[qi] << ',' << best.template_id << ',' << text::exact(best.score) << ','
         << (r.accepted(q, best.template_index) ? 1 : 0) << ','
         << (o.ground_truth.same_place(q, best.template_index) ? 1 : 0) << '\n';
    }
    if (!os) throw IoError("failed writing " + p.string());
    files.push_back(p);
  }
  {
    const fs::path p = out_dir / "summary.txt";
    std::ofstream os(p);
    if (!os) throw IoError("cannot write " + p.string());
    os << summarize(o, cfg);
    if (!os) throw IoError("failed writing " + p.string());
    files.push_back(p);
  }
  const auto plots = emit_plots({{"weighted", o.weighted}, {"baseline", o.baseline}}, o.modalities, out_dir);
  files.insert(files.end(), plots.begin(), plots.end());
  return files;
}

}  // namespace msplace
