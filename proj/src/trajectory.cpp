#include "pla/trajectory.hpp"

#include <cmath>

#include "pla/error.hpp"

namespace pla {

double psi(double t_h, double t_prev_h, double hours_per_unit) {
  const double dt = (t_h - t_prev_h) / hours_per_unit;
  return std::log10(1.0 + std::max(0.0, dt));
}

StateSequence roll_states(const Trajectory& traj, const EmbeddingTable& emb,
                          const RollConfig& cfg, const WarnSink& warn) {
  const std::size_t length = traj.length();
  const std::size_t dim = emb.dimension;
  if (length == 0) raise("InvalidConfig", "trajectory " + traj.wafer_id + " is empty");

  StateSequence seq;
  seq.states = Matrix(length + 1, dim, 0.0);
  seq.psi_weights.resize(length);

  double t_prev = traj.steps[0].timestamp_h - cfg.t0_offset_h;
  for (std::size_t k = 0; k < length; ++k) {
    const auto& step = traj.steps[k];
    if (step.token_id >= emb.vectors.rows)
      raise("UnknownToken", "trajectory " + traj.wafer_id + " step " +
                                std::to_string(k + 1) + " references token id " +
                                std::to_string(step.token_id));
    if (step.timestamp_h < t_prev && warn)
      warn("wafer " + traj.wafer_id + " step " + std::to_string(k + 1) +
           ": timestamp decreases; delta clamped to 0");
    const double w = psi(step.timestamp_h, t_prev, cfg.hours_per_unit);
    seq.psi_weights[k] = w;

    const auto x = emb.vectors.row(step.token_id);
    auto prev = seq.states.row(k);
    auto cur = seq.states.row(k + 1);
    for (std::size_t d = 0; d < dim; ++d) cur[d] = prev[d] + w * x[d];

    t_prev = step.timestamp_h;
  }
  return seq;
}

std::vector<StateSequence> batch_states(const Dataset& data, const RollConfig& cfg,
                                        const WarnSink& warn) {
  std::vector<StateSequence> out;
  out.reserve(data.trajectories.size());
  for (const auto& traj : data.trajectories)
    out.push_back(roll_states(traj, data.embedding, cfg, warn));
  return out;
}

}  // namespace pla
