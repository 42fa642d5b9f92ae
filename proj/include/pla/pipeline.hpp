#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pla/config.hpp"
#include "pla/csv.hpp"
#include "pla/simgen.hpp"
#include "pla/trajectory.hpp"

namespace pla {

// File layout inside a pipeline working directory. Commands read their
// inputs and write their outputs here; every file embeds the config hash.
struct PipelinePaths {
  std::filesystem::path dir;

  std::filesystem::path history() const { return dir / "history.csv"; }
  std::filesystem::path outcomes() const { return dir / "outcomes.csv"; }
  std::filesystem::path ground_truth() const { return dir / "ground_truth.csv"; }
  std::filesystem::path planted_steps() const { return dir / "planted_steps.csv"; }
  std::filesystem::path embeddings() const { return dir / "embeddings.csv"; }
  std::filesystem::path eigenvalues() const { return dir / "eigenvalues.csv"; }
  std::filesystem::path checkpoint(const std::string& method) const {
    return dir / ("checkpoint_" + method + ".json");
  }
  std::filesystem::path trace(const std::string& method) const {
    return dir / ("trace_" + method + ".csv");
  }
  std::filesystem::path attributions(const std::string& method) const {
    return dir / ("attributions_" + method + ".csv");
  }
  std::filesystem::path curves() const { return dir / "curves"; }
  std::filesystem::path eval_report_txt() const { return dir / "eval_report.txt"; }
  std::filesystem::path eval_report_csv() const { return dir / "eval_report.csv"; }
};

struct MethodEval {
  std::string method;
  std::vector<std::optional<double>> fold_r;
  std::optional<double> pooled_r;  // held-out predictions pooled over folds
  bool degenerate = false;         // variance guard tripped somewhere
  bool has_attribution = false;
  AttributionMetrics attribution;
};

struct EvalReport {
  std::string config_hash;
  std::size_t n_wafers = 0;
  std::size_t folds = 0;
  MethodEval ptr_eval;
  MethodEval pla_eval;
  double runtime_seconds = 0.0;  // console only; never serialized
};

// CLI entry points (also the library-level pipeline API).
void cmd_simulate(const PipelineConfig& config, const std::filesystem::path& out_dir);
void cmd_embed(const PipelineConfig& config, const std::filesystem::path& out_dir);
void cmd_train(const std::string& method, const PipelineConfig& config,
               const std::filesystem::path& out_dir);
void cmd_attribute(const std::string& method, const PipelineConfig& config,
                   const std::filesystem::path& out_dir,
                   const std::filesystem::path& checkpoint_path = {});
EvalReport cmd_evaluate(const PipelineConfig& config,
                        const std::filesystem::path& out_dir);

// Shared loader: history + embeddings (+ outcomes / ground truth on demand),
// token resolution and hash-consistency checks against the current config.
struct LoadedData {
  Dataset dataset;  // trajectories in history order; embedding table attached
  Vocabulary vocab;
  std::optional<GroundTruth> truth;
};
LoadedData load_pipeline_data(const PipelineConfig& config,
                              const PipelinePaths& paths, bool need_outcomes,
                              bool need_embeddings_file);

}  // namespace pla
