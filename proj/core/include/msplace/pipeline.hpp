#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msplace/config.hpp"
#include "msplace/dataset.hpp"
#include "msplace/eval.hpp"
#include "msplace/matching.hpp"
#include "msplace/model_file.hpp"
#include "msplace/solver.hpp"

namespace msplace {

struct TrainResult {
  ModelFile model;
  SolveResult solve;
};

/// Extracts and normalizes descriptors of every run, labels each image with
/// its run (one scenario column per run) and solves for the weights.
/// Needs at least two runs whose frames have the configured size.
TrainResult train(const std::vector<Run>& runs, const PipelineConfig& cfg,
                  const std::vector<ExternalFeatures>& external = {});

struct MatchOutcome {
  MatchReport report;
  GroundTruth ground_truth;
  PrCurve weighted;
  PrCurve baseline;
  std::vector<ModalityShare> modalities;
  double top1_weighted = 0.0;
  double top1_baseline = 0.0;
};

/// Matches every query frame against every template frame with the model's
/// weights and the equal-weight baseline, and evaluates both against GPS
/// ground truth at radius_m.
MatchOutcome match_runs(const ModelFile& model, const std::vector<Run>& templates,
                        const std::vector<Run>& queries, double threshold, double radius_m,
                        int threshold_count, const std::vector<ExternalFeatures>& external = {});

/// Summary text: AUCs, top-1 recall, counts, modality shares and the
/// configuration used.
std::string summarize(const MatchOutcome& outcome, const PipelineConfig& cfg);

/// Writes scores.csv, scores_baseline.csv, ground_truth.csv, matches.csv,
/// summary.txt and the PR / modality plots. Returns the files written.
std::vector<std::filesystem::path> write_match_outputs(const MatchOutcome& outcome,
                                                       const PipelineConfig& cfg,
                                                       const std::filesystem::path& out_dir);

}  // namespace msplace
