#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msplace/error.hpp"
#include "msplace/pipeline.hpp"
#include "msplace/synth.hpp"
#include "msplace/text.hpp"

namespace fs = std::filesystem;
using namespace msplace;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kValidation = 2, kIngestion = 3, kSolver = 4, kIo = 5 };

struct Shared {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> radius_m;
  std::optional<std::string> frames;
  std::optional<double> threshold;
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--config", s.config, "Key-value config file");
  cmd->add_option("--out", s.out, "Output directory");
  cmd->add_option("--seed", s.seed, "Random seed");
  cmd->add_option("--lambda1", s.lambda1, "Feature-level regularization weight");
  cmd->add_option("--lambda2", s.lambda2, "Sensor-level regularization weight");
  cmd->add_option("--radius-m", s.radius_m, "Ground-truth radius in metres");
  cmd->add_option("--frames", s.frames, "Inclusive frame index range a..b per run");
  cmd->add_option("--threshold", s.threshold, "Score threshold for accepting a match");
}

/// Defaults, then the config file, then explicit flags.
PipelineConfig resolve_config(const Shared& s) {
  PipelineConfig cfg = s.config.empty() ? PipelineConfig{} : PipelineConfig::load(s.config);
  if (s.seed) cfg.seed = *s.seed;
  if (s.lambda1) cfg.hyper.lambda1 = *s.lambda1;
  if (s.lambda2) cfg.hyper.lambda2 = *s.lambda2;
  if (s.radius_m) cfg.radius_m = *s.radius_m;
  if (s.threshold) cfg.threshold = *s.threshold;
  cfg.validate();
  return cfg;
}

IngestOptions ingest_options(const Shared& s, const PipelineConfig& cfg) {
  IngestOptions o{cfg.frame_width, cfg.frame_height, std::nullopt};
  if (s.frames) o.frames = FrameRange::parse(*s.frames);
  return o;
}

/// Selects runs by name or index; empty selection keeps every run.
std::vector<std::size_t> select_runs(const DatasetManifest& m, const std::vector<std::string>& wanted) {
  std::vector<std::size_t> out;
  if (wanted.empty()) {
    for (std::size_t i = 0; i < m.runs.size(); ++i) out.push_back(i);
    return out;
  }
  for (const auto& w : wanted) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < m.runs.size(); ++i) {
      if (m.runs[i].name() == w) hit = i;
    }
    if (!hit && !w.empty() && w.find_first_not_of("0123456789") == std::string::npos) {
      const auto idx = static_cast<std::size_t>(text::to_u64(w, "run index"));
      if (idx < m.runs.size()) hit = idx;
    }
    if (!hit) throw ValidationError("manifest has no run '" + w + "'");
    out.push_back(*hit);
  }
  return out;
}

std::vector<Run> load_runs(const std::string& manifest_path, const std::vector<std::string>& wanted,
                           const IngestOptions& opts) {
  const DatasetManifest m = DatasetManifest::load(manifest_path);
  std::vector<Run> runs;
  for (std::size_t i : select_runs(m, wanted)) {
    runs.push_back(ingest_run(m, i, opts));
    if (runs.back().dropped_outside_gps > 0) {
      std::cerr << "warning: run " << runs.back().info.name() << ": dropped " << runs.back().dropped_outside_gps
                << " frame(s) outside the GPS span\n";
    }
  }
  return runs;
}

std::vector<ExternalFeatures> load_external(const std::vector<std::string>& paths) {
  std::vector<ExternalFeatures> out;
  for (const auto& p : paths) out.push_back(read_external_features(p));
  return out;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << body;
  if (!os) throw IoError("failed writing " + path.string());
}

int cmd_synth(const Shared& s, const SynthOptions& base, const std::string& profile) {
  const PipelineConfig cfg = resolve_config(s);
  SynthOptions o = base;
  o.seed = cfg.seed;
  o.width = cfg.frame_width;
  o.height = cfg.frame_height;
  o.disparity = parse_disparity_profile(profile);
  const SynthDataset data = generate_synthetic(o);
  const DatasetManifest m = write_synthetic(data, ensure_dir(s.out));
  std::cout << "wrote " << m.runs.size() << " runs (" << data.runs.front().frames.size()
            << " frames each) to " << (fs::path(s.out) / "manifest.txt").string() << '\n';
  return kOk;
}

int cmd_ingest(const Shared& s, const std::string& manifest, const std::vector<std::string>& runs,
               bool check) {
  const PipelineConfig cfg = resolve_config(s);
  const auto loaded = load_runs(manifest, runs, ingest_options(s, cfg));
  std::size_t total = 0;
  for (const auto& r : loaded) {
    std::cout << r.info.name() << ": " << r.frames.size() << " frame pairs, " << r.dropped_outside_gps
              << " dropped outside GPS, " << r.track.samples().size() << " GPS fixes\n";
    total += r.frames.size();
  }
  std::cout << (check ? "ok: " : "") << total << " frame pairs in " << loaded.size() << " runs\n";
  return kOk;
}

int cmd_train(const Shared& s, const std::string& manifest, const std::vector<std::string>& runs,
              const std::vector<std::string>& external) {
  const PipelineConfig cfg = resolve_config(s);
  const auto loaded = load_runs(manifest, runs, ingest_options(s, cfg));
  const TrainResult tr = train(loaded, cfg, load_external(external));
  const fs::path out = ensure_dir(s.out);
  tr.model.save(out / "model.txt");
  std::string trace = "iteration,objective\n";
  for (std::size_t i = 0; i < tr.solve.objective_trace.size(); ++i) {
    trace += std::to_string(i) + "," + text::exact(tr.solve.objective_trace[i]) + "\n";
  }
  write_text(out / "objective_trace.csv", trace);
  const auto report = modality_report(tr.model.modality_weights());
  write_report_csv(report, out / "modality_weights.csv");
  std::cout << "trained on " << loaded.size() << " scenarios; " << tr.solve.iterations << " iterations, "
            << (tr.solve.converged ? "converged" : "not converged") << ", objective "
            << text::decimal(tr.solve.objective_trace.back()) << '\n';
  for (const auto& m : report) std::cout << "  " << m.name << ' ' << text::decimal(m.percent) << "%\n";
  std::cout << "model written to " << (out / "model.txt").string() << '\n';
  return kOk;
}

int cmd_match(const Shared& s, const std::string& model_path, const std::string& templ_manifest,
              const std::vector<std::string>& templ_runs, const std::string& query_manifest,
              const std::vector<std::string>& query_runs, const std::vector<std::string>& external) {
  const ModelFile model = ModelFile::load(model_path);
  PipelineConfig cfg = resolve_config(s);
  // Descriptors and frame geometry always come from the model.
  cfg.descriptors = model.config.descriptors;
  cfg.frame_width = model.config.frame_width;
  cfg.frame_height = model.config.frame_height;
  cfg.hyper = model.config.hyper;
  cfg.solver = model.config.solver;
  const IngestOptions opts = ingest_options(s, cfg);
  const auto templates = load_runs(templ_manifest, templ_runs, opts);
  const auto queries = load_runs(query_manifest.empty() ? templ_manifest : query_manifest, query_runs, opts);
  const MatchOutcome out = match_runs(model, templates, queries, cfg.threshold, cfg.radius_m,
                                      cfg.threshold_count, load_external(external));
  write_match_outputs(out, cfg, ensure_dir(s.out));
  const std::string summary = summarize(out, cfg);
  std::cout << summary.substr(0, summary.find("config\n"));
  return kOk;
}

int cmd_eval(const Shared& s, const std::string& scores_path, const std::string& truth_path,
             const std::string& name) {
  const PipelineConfig cfg = resolve_config(s);
  const ScoreTable scores = read_score_csv(scores_path);
  const ScoreTable truth = read_score_csv(truth_path);
  if (scores.query_ids != truth.query_ids || scores.template_ids != truth.template_ids) {
    throw ShapeError("score and ground-truth tables list different ids");
  }
  GroundTruth gt{(truth.scores.array() != 0.0), cfg.radius_m};
  const PrCurve curve = pr_curve(scores.scores, gt, default_thresholds(cfg.threshold_count));
  emit_plots({{name, curve}}, std::nullopt, ensure_dir(s.out));
  std::cout << "auc " << text::decimal(curve.auc) << '\n';
  std::cout << "top1 " << text::decimal(top1_recall(scores.scores, gt.same_place)) << '\n';
  return kOk;
}

int cmd_report(const Shared& s, const std::string& model_path) {
  const ModelFile model = ModelFile::load(model_path);
  const auto report = modality_report(model.modality_weights());
  emit_plots({}, report, ensure_dir(s.out));
  write_text(fs::path(s.out) / "config.txt", model.config.to_text());
  for (const auto& m : report) std::cout << m.name << ' ' << text::decimal(m.percent) << "%\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal place recognition with structured sparse modality weights"};
  app.require_subcommand(1);

  Shared shared;
  SynthOptions synth_opts;
  std::string profile = "noise_only";
  std::string manifest, model_path, templ_manifest, query_manifest, scores_path, truth_path;
  std::string curve_name = "scores";
  std::vector<std::string> runs, templ_runs, query_runs, external;
  bool check = false;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-scenario dataset");
  add_shared(synth, shared);
  synth->add_option("--places", synth_opts.n_places, "Number of places on the loop");
  synth->add_option("--scenarios", synth_opts.n_scenarios, "Number of season/time scenarios");
  synth->add_option("--disparity", profile, "Disparity profile: noise_only|structured");
  synth->add_flag("--direction-flip", synth_opts.direction_flip, "Also emit backward traversals");

  auto* ingest = app.add_subcommand("ingest", "Decode and pair a dataset");
  add_shared(ingest, shared);
  ingest->add_option("--manifest", manifest, "Dataset manifest")->required();
  ingest->add_option("--runs", runs, "Run names or indices")->delimiter(',');
  ingest->add_flag("--check", check, "Validate only");

  auto* trn = app.add_subcommand("train", "Learn modality weights");
  add_shared(trn, shared);
  trn->add_option("--manifest", manifest, "Dataset manifest")->required();
  trn->add_option("--runs", runs, "Training runs (names or indices), one scenario each")->delimiter(',');
  trn->add_option("--external", external, "External feature file (repeatable)");

  auto* mtc = app.add_subcommand("match", "Score queries against templates");
  add_shared(mtc, shared);
  mtc->add_option("--model", model_path, "Model file")->required();
  mtc->add_option("--templates", templ_manifest, "Template manifest")->required();
  mtc->add_option("--template-runs", templ_runs, "Template runs")->delimiter(',');
  mtc->add_option("--queries", query_manifest, "Query manifest (defaults to the template manifest)");
  mtc->add_option("--query-runs", query_runs, "Query runs")->delimiter(',');
  mtc->add_option("--external", external, "External feature file (repeatable)");

  auto* evl = app.add_subcommand("eval", "PR curve of a score matrix against ground truth");
  add_shared(evl, shared);
  evl->add_option("--scores", scores_path, "Score CSV")->required();
  evl->add_option("--truth", truth_path, "Ground-truth CSV (0/1)")->required();
  evl->add_option("--name", curve_name, "Curve name used in output files");

  auto* rep = app.add_subcommand("report", "Modality importance of a model");
  add_shared(rep, shared);
  rep->add_option("--model", model_path, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(shared, synth_opts, profile);
    if (*ingest) return cmd_ingest(shared, manifest, runs, check);
    if (*trn) return cmd_train(shared, manifest, runs, external);
    if (*mtc) return cmd_match(shared, model_path, templ_manifest, templ_runs, query_manifest, query_runs, external);
    if (*evl) return cmd_eval(shared, scores_path, truth_path, curve_name);
    if (*rep) return cmd_report(shared, model_path);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return kIngestion;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kUsage;
}
