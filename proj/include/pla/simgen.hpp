#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pla/tokenize.hpp"

namespace pla {

// A fault planted by the simulator: wafers pay `effect` extra log defect
// density whenever a step runs on `tool_id` after waiting at least
// `wait_threshold_h` hours. This is the known-root-cause signal attribution
// has to recover.
struct PlantedCause {
  std::size_t tool_id = 0;
  double wait_threshold_h = 0.0;
  double effect = 0.0;
};

struct SimConfig {
  std::size_t n_wafers = 787;
  std::size_t route_len_min = 50;
  std::size_t route_len_max = 200;
  std::size_t n_tools = 32;
  std::size_t recipes_per_tool = 3;
  std::size_t n_photo_layers = 4;
  std::size_t n_routes = 2;
  double wait_lognorm_mu = 0.0;     // log-hours
  double wait_lognorm_sigma = 1.0;
  std::vector<PlantedCause> planted = {
      {3, 3.6, 0.7}, {11, 3.6, 0.7}, {19, 3.6, 0.7}};
  double smooth_coeff = 0.01;  // gamma per step = smooth_coeff*log10(1+wait)
  double base_y = 1.0;         // gamma_0
  double noise_sigma = 0.05;
  bool signed_contributions = false;  // misspecification probe: allow gamma < 0
  std::uint64_t seed = 0;

  void validate() const;
};

struct WaferTruth {
  std::string wafer_id;
  double base = 0.0;           // gamma_0
  std::vector<double> gamma;   // per-step true contribution
  std::vector<bool> planted;   // planted condition fired at this step
  double noise = 0.0;          // drawn noise; y = base + sum gamma + noise
};

struct GroundTruth {
  std::vector<WaferTruth> wafers;
};

struct SimData {
  std::vector<ProcessRecord> records;   // all wafers, route order
  std::vector<std::string> wafer_ids;   // generation order
  std::vector<double> outcomes;         // y per wafer, same order
  GroundTruth truth;
};

// Deterministic given the seed; each wafer draws from its own derived
// substream, so per-wafer generation order cannot leak between wafers.
SimData generate(const SimConfig& config);

struct WaferAlphas {
  std::string wafer_id;
  std::vector<double> alphas;
  double base = 0.0;  // model-side curve anchor (f(z_0) or c0)
};

struct AttributionMetrics {
  double top_k_recall = 0.0;    // mean over wafers with >= 1 planted step
  double mean_spearman = 0.0;   // mean per-wafer Spearman(alpha, gamma)
  double curve_rmse = 0.0;      // mean per-wafer RMSE of cumulative curves
  std::size_t wafers_with_planted = 0;
  std::size_t wafers_scored = 0;
  double top1_hit_fraction = 0.0;  // wafers whose largest alpha is planted
};

// Ranks steps by alpha (ties broken by a seeded shuffle so uniform scores
// spread evenly); throws Error("LengthMismatch") when wafer ids or lengths
// do not line up with the ground truth.
AttributionMetrics score_attribution(std::span<const WaferAlphas> alphas,
                                     const GroundTruth& truth, std::size_t k,
                                     std::uint64_t tie_break_seed = 0);

}  // namespace pla
