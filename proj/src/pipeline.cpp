#include "pla/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <thread>

#include "pla/checkpoint.hpp"
#include "pla/error.hpp"
#include "pla/format.hpp"
#include "pla/pla_model.hpp"
#include "pla/ptr.hpp"
#include "pla/rng.hpp"
#include "pla/stats.hpp"
#include "pla/svg.hpp"

namespace pla {

namespace {

void require_hash(const std::string& file_hash, const std::string& expect,
                  const std::filesystem::path& path) {
  if (file_hash != expect)
    raise("ConfigHashMismatch", path.string() + " carries config hash '" +
                                    file_hash + "' but the current config hashes to '" +
                                    expect + "'");
}

std::size_t clamped_embed_dim(const PipelineConfig& config, std::size_t vocab_size) {
  if (config.embed_dim <= vocab_size) return config.embed_dim;
  std::cout << "embed: clamping dimension " << config.embed_dim
            << " to vocabulary size " << vocab_size << "\n";
  return vocab_size;
}

EmbeddingsFile compute_embeddings(const PipelineConfig& config,
                                  const std::vector<ProcessRecord>& records) {
  EmbeddingsFile out;
  out.vocab = build_vocabulary(records, config.attribute_order, config.separator);
  const KernelMatrix kernel =
      kernel_matrix(out.vocab, config.kernel_params(), config.kernel_normalize);
  out.table = spectral_embed(kernel, clamped_embed_dim(config, out.vocab.size()));
  return out;
}

Dataset assemble_dataset(const PipelineConfig& config, const HistoryFile& history,
                         const Vocabulary& vocab, EmbeddingTable embedding,
                         const OutcomesFile* outcomes) {
  Dataset data;
  data.embedding = std::move(embedding);

  std::unordered_map<std::string, std::size_t> traj_index;
  for (const auto& rec : history.records) {
    auto [it, fresh] = traj_index.emplace(rec.wafer_id, data.trajectories.size());
    if (fresh) {
      Trajectory t;
      t.wafer_id = rec.wafer_id;
      data.trajectories.push_back(std::move(t));
    }
    const Token token = make_token(rec, config.attribute_order, config.separator);
    const long long id = vocab.find(token.text);
    if (id < 0)
      raise("UnknownToken", "token '" + token.text +
                                "' from wafer " + rec.wafer_id +
                                " is missing from the embedding table");
    data.trajectories[it->second].steps.push_back(
        {static_cast<std::size_t>(id), rec.timestamp_h});
  }

  if (outcomes) {
    std::size_t used = 0;
    for (auto& traj : data.trajectories) {
      auto it = outcomes->by_wafer.find(traj.wafer_id);
      if (it == outcomes->by_wafer.end())
        raise("MissingOutcome", "wafer " + traj.wafer_id + " has no outcome row");
      traj.outcome = it->second;
      ++used;
    }
    if (used != outcomes->by_wafer.size())
      raise("CsvSchemaError", "outcomes.csv lists wafers absent from history.csv");
  }
  return data;
}

void check_truth_alignment(const Dataset& data, const GroundTruth& truth) {
  if (truth.wafers.size() != data.trajectories.size())
    raise("CsvSchemaError", "ground truth wafer count does not match history");
  for (std::size_t i = 0; i < truth.wafers.size(); ++i) {
    if (truth.wafers[i].wafer_id != data.trajectories[i].wafer_id ||
        truth.wafers[i].gamma.size() != data.trajectories[i].length())
      raise("CsvSchemaError", "ground truth misaligned at wafer " +
                                  data.trajectories[i].wafer_id);
  }
}

}  // namespace

LoadedData load_pipeline_data(const PipelineConfig& config,
                              const PipelinePaths& paths, bool need_outcomes,
                              bool need_embeddings_file) {
  const std::string expect = config.hash();
  HistoryFile history = read_history_csv(paths.history(), config.clock_skew_tolerance_h);
  require_hash(history.config_hash, expect, paths.history());

  EmbeddingsFile emb;
  if (need_embeddings_file) {
    emb = read_embeddings_csv(paths.embeddings(), paths.eigenvalues());
    require_hash(emb.config_hash, expect, paths.embeddings());
  } else {
    emb = compute_embeddings(config, history.records);
  }

  OutcomesFile outcomes;
  if (need_outcomes) {
    outcomes = read_outcomes_csv(paths.outcomes());
    require_hash(outcomes.config_hash, expect, paths.outcomes());
  }

  LoadedData out;
  out.vocab = std::move(emb.vocab);
  out.dataset = assemble_dataset(config, history, out.vocab, std::move(emb.table),
                                 need_outcomes ? &outcomes : nullptr);

  if (std::filesystem::exists(paths.ground_truth())) {
    GroundTruthFile gt =
        read_ground_truth_csv(paths.ground_truth(), paths.planted_steps());
    require_hash(gt.config_hash, expect, paths.ground_truth());
    for (auto& w : gt.truth.wafers) w.base = config.sim.base_y;
    check_truth_alignment(out.dataset, gt.truth);
    out.truth = std::move(gt.truth);
  }
  return out;
}

void cmd_simulate(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const PipelinePaths paths{out_dir};
  const std::string hash = config.hash();

  const SimData data = generate(config.sim_config());
  write_history_csv(paths.history(), data.records, config.attribute_order, hash);
  write_outcomes_csv(paths.outcomes(), data.wafer_ids, data.outcomes, hash);
  write_ground_truth_csv(paths.ground_truth(), data.truth, hash);
  write_planted_steps_csv(paths.planted_steps(), data.truth, hash);

  std::cout << "simulate: wrote " << data.wafer_ids.size() << " wafers ("
            << data.records.size() << " steps) under " << out_dir.string()
            << " [config " << hash << "]\n";
}

void cmd_embed(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const PipelinePaths paths{out_dir};
  const std::string hash = config.hash();

  const HistoryFile history =
      read_history_csv(paths.history(), config.clock_skew_tolerance_h);
  require_hash(history.config_hash, hash, paths.history());

  const EmbeddingsFile emb = compute_embeddings(config, history.records);
  write_embeddings_csv(paths.embeddings(), emb.vocab, emb.table, hash);
  write_eigenvalues_csv(paths.eigenvalues(), emb.table, hash);

  const double total = emb.table.total_positive_energy;
  std::cout << "embed: V_d=" << emb.vocab.size() << ", D=" << emb.table.dimension
            << ", retained energy ratio="
            << fmt_double(total > 0.0 ? emb.table.retained_energy() / total : 0.0)
            << "\n";
}

namespace {

std::vector<double> collect_outcomes(const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& traj : data.trajectories) {
    if (!traj.outcome)
      raise("MissingOutcome", "wafer " + traj.wafer_id + " has no outcome");
    out.push_back(*traj.outcome);
  }
  return out;
}

PtrConfig ptr_config(const PipelineConfig& config, std::uint64_t init_seed) {
  PtrConfig c;
  c.hidden = config.ptr_hidden;
  c.eta = config.ptr_eta;
  c.lr = config.ptr_lr;
  c.epochs = config.ptr_epochs;
  c.init_seed = init_seed;
  c.roll = config.roll_config();
  return c;
}

PlaConfig pla_config(const PipelineConfig& config, std::uint64_t init_seed) {
  PlaConfig c;
  c.hidden = config.pla_hidden;
  c.output_act = act_from_name(config.pla_output_activation);
  c.mu = config.pla_mu;
  c.mu_td = config.pla_mu_td;
  c.lr = config.pla_lr;
  c.epochs = config.pla_epochs;
  c.init_seed = init_seed;
  c.roll = config.roll_config();
  return c;
}

void require_method(const std::string& method) {
  if (method != "ptr" && method != "pla")
    raise("InvalidConfig", "method must be 'ptr' or 'pla', got '" + method + "'");
}

}  // namespace

void cmd_train(const std::string& method, const PipelineConfig& config,
               const std::filesystem::path& out_dir) {
  require_method(method);
  const PipelinePaths paths{out_dir};
  const std::string hash = config.hash();
  const LoadedData loaded = load_pipeline_data(config, paths, /*need_outcomes=*/true,
                                               /*need_embeddings_file=*/true);
  std::vector<double> trace;
  if (method == "ptr") {
    const PtrModel model =
        train_ptr(loaded.dataset, ptr_config(config, Rng::derive(config.seed, "init-ptr")),
                  &trace);
    save_ptr_checkpoint(paths.checkpoint(method), model, hash);
    write_trace_csv(paths.trace(method), "loss", trace, hash);
    std::cout << "train ptr: final loss " << fmt_double(model.final_loss) << " after "
              << model.epochs << " epochs\n";
  } else {
    const PlaModel model =
        train_pla(loaded.dataset, pla_config(config, Rng::derive(config.seed, "init-pla")),
                  &trace);
    save_pla_checkpoint(paths.checkpoint(method), model, hash);
    write_trace_csv(paths.trace(method), "objective", trace, hash);
    std::cout << "train pla: final objective " << fmt_double(model.final_objective)
              << " after " << model.epochs << " epochs\n";
  }
}

namespace {

struct WaferAttributionRow {
  std::string wafer_id;
  std::vector<double> alphas;
  std::vector<double> timestamps;
  double base = 0.0;
};

void write_attribution_outputs(const std::string& method,
                               const PipelineConfig& config,
                               const PipelinePaths& paths,
                               const std::vector<WaferAttributionRow>& rows,
                               const std::string& hash) {
  std::vector<std::string> header = {"wafer_id", "step_index", "timestamp", "alpha",
                                     "cumulative"};
  if (method == "pla") header.push_back("method");
  std::vector<std::vector<std::string>> csv_rows;
  for (const auto& row : rows) {
    double cum = row.base;
    for (std::size_t k = 0; k < row.alphas.size(); ++k) {
      cum += row.alphas[k];
      std::vector<std::string> fields = {row.wafer_id, std::to_string(k + 1),
                                         fmt_double(row.timestamps[k]),
                                         fmt_double(row.alphas[k]), fmt_double(cum)};
      if (method == "pla") fields.push_back("pla");
      csv_rows.push_back(std::move(fields));
    }
  }
  write_csv(paths.attributions(method), hash, header, csv_rows);

  std::filesystem::create_directories(paths.curves());
  const std::size_t limit =
      config.svg_limit == 0 ? rows.size() : std::min(config.svg_limit, rows.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& row = rows[i];
    const double t0 = row.timestamps.empty()
                          ? 0.0
                          : row.timestamps.front() - config.t0_offset_h;
    const auto points = cumulative_curve(row.alphas, row.base, row.timestamps, t0);
    write_curve_svg(paths.curves() / (method + "_" + row.wafer_id + ".svg"),
                    method + " cumulative attribution, wafer " + row.wafer_id, points,
                    hash);
  }
}

}  // namespace

void cmd_attribute(const std::string& method, const PipelineConfig& config,
                   const std::filesystem::path& out_dir,
                   const std::filesystem::path& checkpoint_path) {
  require_method(method);
  const PipelinePaths paths{out_dir};
  const std::string hash = config.hash();
  const std::filesystem::path ckpt =
      checkpoint_path.empty() ? paths.checkpoint(method) : checkpoint_path;

  const LoadedData loaded = load_pipeline_data(config, paths, /*need_outcomes=*/false,
                                               /*need_embeddings_file=*/true);
  const auto states = batch_states(loaded.dataset, config.roll_config());

  std::vector<WaferAttributionRow> rows;
  rows.reserve(states.size());
  auto timestamps_of = [](const Trajectory& traj) {
    std::vector<double> ts;
    ts.reserve(traj.steps.size());
    for (const auto& s : traj.steps) ts.push_back(s.timestamp_h);
    return ts;
  };

  if (method == "ptr") {
    const PtrModel model = load_ptr_checkpoint(ckpt, hash);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& traj = loaded.dataset.trajectories[i];
      PtrAttribution attr = attribute_ptr(model, states[i], traj.wafer_id);
      rows.push_back({traj.wafer_id, std::move(attr.alphas), timestamps_of(traj),
                      attr.baseline});
    }
  } else {
    const PlaModel model = load_pla_checkpoint(ckpt, hash);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& traj = loaded.dataset.trajectories[i];
      PlaAttribution attr = attribute_pla(model, states[i], traj.wafer_id);
      rows.push_back(
          {traj.wafer_id, std::move(attr.alphas), timestamps_of(traj), attr.base});
    }
  }
  write_attribution_outputs(method, config, paths, rows, hash);
  std::cout << "attribute " << method << ": wrote " << rows.size() << " wafers to "
            << paths.attributions(method).string() << "\n";
}

namespace {

struct FoldResult {
  std::vector<std::size_t> test_indices;
  std::vector<double> ptr_pred, pla_pred;  // aligned with test_indices
  std::vector<WaferAlphas> ptr_alphas, pla_alphas;
  std::optional<double> ptr_r, pla_r;
};

FoldResult run_fold(const PipelineConfig& config, const Dataset& data,
                    const std::vector<StateSequence>& states,
                    const std::vector<double>& outcomes,
                    const std::vector<std::size_t>& train_idx,
                    const std::vector<std::size_t>& test_idx, std::size_t fold) {
  std::vector<StateSequence> train_states;
  std::vector<double> train_y;
  train_states.reserve(train_idx.size());
  for (std::size_t i : train_idx) {
    train_states.push_back(states[i]);
    train_y.push_back(outcomes[i]);
  }
  const std::size_t dim = data.embedding.dimension;

  const PtrModel ptr_model = train_ptr_on(
      train_states, train_y, dim,
      ptr_config(config, Rng::derive(config.seed, "init-ptr-fold", fold)));
  const PlaModel pla_model = train_pla_on(
      train_states, train_y, dim,
      pla_config(config, Rng::derive(config.seed, "init-pla-fold", fold)));

  FoldResult result;
  result.test_indices = test_idx;
  std::vector<double> y_test;
  for (std::size_t i : test_idx) {
    const StateSequence& seq = states[i];
    const std::string& wafer = data.trajectories[i].wafer_id;
    result.ptr_pred.push_back(predict_ptr(ptr_model, seq, seq.length()));
    result.pla_pred.push_back(f_value(pla_model, seq, seq.length()));
    y_test.push_back(outcomes[i]);

    PtrAttribution pa = attribute_ptr(ptr_model, seq, wafer);
    result.ptr_alphas.push_back({wafer, std::move(pa.alphas), pa.baseline});
    PlaAttribution qa = attribute_pla(pla_model, seq, wafer);
    result.pla_alphas.push_back({wafer, std::move(qa.alphas), qa.base});
  }
  result.ptr_r = pearson(result.ptr_pred, y_test);
  result.pla_r = pearson(result.pla_pred, y_test);
  return result;
}

void write_eval_reports(const PipelinePaths& paths, const EvalReport& report) {
  auto opt_text = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };

  std::vector<std::vector<std::string>> rows;
  for (const MethodEval* ev : {&report.ptr_eval, &report.pla_eval}) {
    for (std::size_t f = 0; f < ev->fold_r.size(); ++f)
      rows.push_back({ev->method, "fold_" + std::to_string(f) + "_r",
                      opt_text(ev->fold_r[f])});
    rows.push_back({ev->method, "pooled_r", opt_text(ev->pooled_r)});
    rows.push_back({ev->method, "degenerate_variance", ev->degenerate ? "1" : "0"});
    if (ev->has_attribution) {
      rows.push_back({ev->method, "attr_top_k_recall",
                      fmt_double(ev->attribution.top_k_recall)});
      rows.push_back({ev->method, "attr_mean_spearman",
                      fmt_double(ev->attribution.mean_spearman)});
      rows.push_back({ev->method, "attr_curve_rmse",
                      fmt_double(ev->attribution.curve_rmse)});
      rows.push_back({ev->method, "attr_top1_hit_fraction",
                      fmt_double(ev->attribution.top1_hit_fraction)});
    }
  }
  write_csv(paths.eval_report_csv(), report.config_hash, {"method", "metric", "value"},
            rows);

  std::ofstream txt(paths.eval_report_txt(), std::ios::binary);
  if (!txt) raise("IoError", "cannot write " + paths.eval_report_txt().string());
  txt << "evaluation report (config " << report.config_hash << ")\n";
  txt << "wafers: " << report.n_wafers << ", folds: " << report.folds << "\n\n";
  for (const MethodEval* ev : {&report.ptr_eval, &report.pla_eval}) {
    txt << ev->method << ":\n";
    for (std::size_t f = 0; f < ev->fold_r.size(); ++f) {
      txt << "  fold " << f << " r = ";
      if (ev->fold_r[f]) txt << fmt_double(*ev->fold_r[f]);
      else txt << "degenerate variance";
      txt << "\n";
    }
    txt << "  pooled r = ";
    if (ev->pooled_r) txt << fmt_double(*ev->pooled_r);
    else txt << "degenerate variance";
    txt << "\n";
    if (ev->has_attribution) {
      txt << "  attribution top-k recall = " << fmt_double(ev->attribution.top_k_recall)
          << "\n";
      txt << "  attribution mean spearman = "
          << fmt_double(ev->attribution.mean_spearman) << "\n";
      txt << "  attribution curve rmse = " << fmt_double(ev->attribution.curve_rmse)
          << "\n";
      txt << "  attribution top-1 hit fraction = "
          << fmt_double(ev->attribution.top1_hit_fraction) << "\n";
    }
    txt << "\n";
  }
}

}  // namespace

EvalReport cmd_evaluate(const PipelineConfig& config,
                        const std::filesystem::path& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  const PipelinePaths paths{out_dir};
  const LoadedData loaded = load_pipeline_data(config, paths, /*need_outcomes=*/true,
                                               /*need_embeddings_file=*/false);
  const Dataset& data = loaded.dataset;
  const std::size_t n = data.size();
  const std::size_t folds = config.cv_folds;

  const auto states = batch_states(data, config.roll_config());
  const auto outcomes = collect_outcomes(data);

  // deterministic shuffled fold assignment, split by wafer
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng fold_rng = Rng::substream(config.seed, "folds");
  fold_rng.shuffle(perm);
  std::vector<std::vector<std::size_t>> fold_test(folds);
  for (std::size_t i = 0; i < n; ++i) fold_test[i % folds].push_back(perm[i]);
  for (std::size_t f = 0; f < folds; ++f) {
    if (fold_test[f].size() < 2)
      raise("FoldTooSmall", "fold " + std::to_string(f) + " has " +
                                std::to_string(fold_test[f].size()) +
                                " wafers; need at least 2");
    std::sort(fold_test[f].begin(), fold_test[f].end());
  }

  std::vector<FoldResult> results(folds);
  auto run_one = [&](std::size_t f) {
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - fold_test[f].size());
    for (std::size_t g = 0; g < folds; ++g) {
      if (g == f) continue;
      train_idx.insert(train_idx.end(), fold_test[g].begin(), fold_test[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    return run_fold(config, data, states, outcomes, train_idx, fold_test[f], f);
  };

  if (config.parallel_folds && std::thread::hardware_concurrency() > 1) {
    std::vector<std::future<FoldResult>> futs;
    for (std::size_t f = 0; f < folds; ++f)
      futs.push_back(std::async(std::launch::async, run_one, f));
    for (std::size_t f = 0; f < folds; ++f) results[f] = futs[f].get();
  } else {
    for (std::size_t f = 0; f < folds; ++f) results[f] = run_one(f);
  }

  EvalReport report;
  report.config_hash = config.hash();
  report.n_wafers = n;
  report.folds = folds;
  report.ptr_eval.method = "ptr";
  report.pla_eval.method = "pla";

  // pool held-out predictions back into wafer order
  std::vector<double> ptr_pooled(n, 0.0), pla_pooled(n, 0.0);
  std::vector<WaferAlphas> ptr_alphas(n), pla_alphas(n);
  for (std::size_t f = 0; f < folds; ++f) {
    const FoldResult& r = results[f];
    report.ptr_eval.fold_r.push_back(r.ptr_r);
    report.pla_eval.fold_r.push_back(r.pla_r);
    if (!r.ptr_r || !r.pla_r) {
      report.ptr_eval.degenerate |= !r.ptr_r;
      report.pla_eval.degenerate |= !r.pla_r;
    }
    for (std::size_t i = 0; i < r.test_indices.size(); ++i) {
      const std::size_t w = r.test_indices[i];
      ptr_pooled[w] = r.ptr_pred[i];
      pla_pooled[w] = r.pla_pred[i];
      ptr_alphas[w] = r.ptr_alphas[i];
      pla_alphas[w] = r.pla_alphas[i];
    }
  }
  report.ptr_eval.pooled_r = pearson(ptr_pooled, outcomes);
  report.pla_eval.pooled_r = pearson(pla_pooled, outcomes);
  report.ptr_eval.degenerate |= !report.ptr_eval.pooled_r;
  report.pla_eval.degenerate |= !report.pla_eval.pooled_r;

  if (loaded.truth) {
    const std::uint64_t tie_seed = Rng::derive(config.seed, "ties");
    report.ptr_eval.attribution =
        score_attribution(ptr_alphas, *loaded.truth, config.eval_top_k, tie_seed);
    report.pla_eval.attribution =
        score_attribution(pla_alphas, *loaded.truth, config.eval_top_k, tie_seed);
    report.ptr_eval.has_attribution = true;
    report.pla_eval.has_attribution = true;
  }

  write_eval_reports(paths, report);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::cout << "evaluate: ptr pooled r="
            << (report.ptr_eval.pooled_r ? fmt_double(*report.ptr_eval.pooled_r)
                                         : "degenerate")
            << ", pla pooled r="
            << (report.pla_eval.pooled_r ? fmt_double(*report.pla_eval.pooled_r)
                                         : "degenerate")
            << " (" << fmt_double(report.runtime_seconds) << " s)\n";
  return report;
}

}  // namespace pla
