#include "pla/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pla/error.hpp"
#include "pla/rng.hpp"
#include "pla/stats.hpp"

namespace pla {

namespace {

const char* kToolTypes[] = {"WET", "RTP", "INS", "LIT", "RIE", "IMP", "FUR", "CMP"};

std::string format_id(const char* prefix, std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, v);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  if (route_len_min < 1) raise("InvalidConfig", "route_len_min must be >= 1");
  if (route_len_max < route_len_min)
    raise("InvalidConfig", "route_len_max must be >= route_len_min");
  if (n_tools == 0 || recipes_per_tool == 0 || n_photo_layers == 0 || n_routes == 0)
    raise("InvalidConfig", "tool/recipe/layer/route counts must be positive");
  if (n_routes > 26) raise("InvalidConfig", "n_routes is limited to 26");
  if (!(wait_lognorm_sigma >= 0.0))
    raise("InvalidConfig", "wait_lognorm_sigma must be >= 0");
  if (!(noise_sigma >= 0.0)) raise("InvalidConfig", "noise_sigma must be >= 0");
  for (const auto& cause : planted) {
    if (cause.tool_id >= n_tools)
      raise("InvalidConfig", "planted cause references tool " +
                                 std::to_string(cause.tool_id) + " beyond catalog");
    if (!std::isfinite(cause.effect) || !std::isfinite(cause.wait_threshold_h))
      raise("InvalidConfig", "planted cause parameters must be finite");
  }
}

SimData generate(const SimConfig& config) {
  config.validate();
  SimData data;
  data.wafer_ids.reserve(config.n_wafers);

  // reference weight of a median-ish wait; signed mode recenters the smooth
  // term around it so short waits contribute negatively
  const double signed_offset = config.signed_contributions
                                   ? config.smooth_coeff * std::log10(2.0)
                                   : 0.0;

  for (std::size_t w = 0; w < config.n_wafers; ++w) {
    Rng rng = Rng::substream(config.seed, "sim", w);
    const std::string wafer_id = format_id("W", w);
    const std::size_t length = static_cast<std::size_t>(
        rng.uniform_int(config.route_len_min, config.route_len_max));
    const std::string route =
        std::string("RT") +
        static_cast<char>('A' + rng.uniform_int(0, config.n_routes - 1));

    WaferTruth truth;
    truth.wafer_id = wafer_id;
    truth.base = config.base_y;
    truth.gamma.reserve(length);
    truth.planted.reserve(length);

    double t = 0.0;
    for (std::size_t k = 1; k <= length; ++k) {
      const std::size_t tool = rng.uniform_int(0, config.n_tools - 1);
      const std::size_t recipe = rng.uniform_int(0, config.recipes_per_tool - 1);
      const double wait =
          rng.lognormal(config.wait_lognorm_mu, config.wait_lognorm_sigma);
      t += wait;
      const std::size_t layer = (k - 1) * config.n_photo_layers / length;

      ProcessRecord rec;
      rec.wafer_id = wafer_id;
      rec.step_index = k;
      rec.timestamp_h = t;
      rec.attributes = {
          {"eqp", format_id("E", tool)},
          {"recipe", format_id("R", tool) + "_" + std::to_string(recipe)},
          {"tool_type", kToolTypes[tool % 8]},
          {"photo_layer", "L" + std::to_string(layer)},
          {"route", route},
      };
      data.records.push_back(std::move(rec));

      double gamma = config.smooth_coeff * std::log10(1.0 + wait) - signed_offset;
      bool hit = false;
      for (const auto& cause : config.planted) {
        if (tool == cause.tool_id && wait >= cause.wait_threshold_h) {
          gamma += cause.effect;
          hit = true;
        }
      }
      truth.gamma.push_back(gamma);
      truth.planted.push_back(hit);
    }

    truth.noise = config.noise_sigma == 0.0 ? 0.0 : rng.normal(0.0, config.noise_sigma);
    double y = truth.base + truth.noise;
    for (double g : truth.gamma) y += g;

    data.wafer_ids.push_back(wafer_id);
    data.outcomes.push_back(y);
    data.truth.wafers.push_back(std::move(truth));
  }
  return data;
}

AttributionMetrics score_attribution(std::span<const WaferAlphas> alphas,
                                     const GroundTruth& truth, std::size_t k,
                                     std::uint64_t tie_break_seed) {
  if (alphas.size() != truth.wafers.size())
    raise("LengthMismatch", "attribution/ground-truth wafer counts differ");

  AttributionMetrics metrics;
  double recall_sum = 0.0, spearman_sum = 0.0, rmse_sum = 0.0;
  std::size_t spearman_count = 0, top1_hits = 0, top1_total = 0;

  for (std::size_t w = 0; w < alphas.size(); ++w) {
    const WaferAlphas& wa = alphas[w];
    const WaferTruth& wt = truth.wafers[w];
    if (wa.wafer_id != wt.wafer_id)
      raise("LengthMismatch", "attribution wafer '" + wa.wafer_id +
                                  "' does not match ground truth '" + wt.wafer_id +
                                  "'");
    const std::size_t length = wt.gamma.size();
    if (wa.alphas.size() != length)
      raise("LengthMismatch", "wafer " + wa.wafer_id + " has " +
                                  std::to_string(wa.alphas.size()) + " scores for " +
                                  std::to_string(length) + " steps");
    metrics.wafers_scored += 1;

    // rank by alpha, equal scores ordered by a per-wafer seeded shuffle
    std::vector<std::size_t> perm(length);
    std::iota(perm.begin(), perm.end(), 0);
    Rng tie_rng = Rng::substream(tie_break_seed, "ties", w);
    tie_rng.shuffle(perm);
    std::vector<std::size_t> order = perm;
    std::stable_sort(order.begin(), order.end(),
                     [&wa](std::size_t a, std::size_t b) {
                       return wa.alphas[a] > wa.alphas[b];
                     });

    const std::size_t n_planted = static_cast<std::size_t>(
        std::count(wt.planted.begin(), wt.planted.end(), true));
    if (n_planted > 0) {
      metrics.wafers_with_planted += 1;
      std::size_t found = 0;
      for (std::size_t i = 0; i < std::min(k, length); ++i)
        if (wt.planted[order[i]]) ++found;
      recall_sum += static_cast<double>(found) / static_cast<double>(n_planted);
      top1_total += 1;
      if (wt.planted[order[0]]) ++top1_hits;
    }

    if (const auto rho = spearman(wa.alphas, wt.gamma)) {
      spearman_sum += *rho;
      spearman_count += 1;
    }

    double ca = wa.base, cg = wt.base, sq = 0.0;
    sq += (ca - cg) * (ca - cg);
    for (std::size_t i = 0; i < length; ++i) {
      ca += wa.alphas[i];
      cg += wt.gamma[i];
      sq += (ca - cg) * (ca - cg);
    }
    rmse_sum += std::sqrt(sq / static_cast<double>(length + 1));
  }

  if (metrics.wafers_with_planted > 0) {
    metrics.top_k_recall =
        recall_sum / static_cast<double>(metrics.wafers_with_planted);
    metrics.top1_hit_fraction =
        static_cast<double>(top1_hits) / static_cast<double>(top1_total);
  }
  if (spearman_count > 0)
    metrics.mean_spearman = spearman_sum / static_cast<double>(spearman_count);
  if (metrics.wafers_scored > 0)
    metrics.curve_rmse = rmse_sum / static_cast<double>(metrics.wafers_scored);
  return metrics;
}

}  // namespace pla
