#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pla/embed.hpp"
#include "pla/matrix.hpp"

namespace pla {

struct TrajectoryStep {
  std::size_t token_id = 0;
  double timestamp_h = 0.0;
};

// One wafer's processing route: ordered steps plus the terminal outcome
// (log defect density) when inspected.
struct Trajectory {
  std::string wafer_id;
  std::vector<TrajectoryStep> steps;
  std::optional<double> outcome;

  std::size_t length() const { return steps.size(); }
};

// Wafer states z_0..z_L under the linear cell z_k = psi_k * x_k + z_{k-1},
// with z_0 = 0 so the additive form z_k = sum_{i<=k} psi_i x_i holds with no
// offset.
struct StateSequence {
  Matrix states;                    // (L+1) x D, row 0 = zeros
  std::vector<double> psi_weights;  // L entries

  std::size_t length() const { return psi_weights.size(); }
  std::span<const double> state(std::size_t k) const { return states.row(k); }
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  EmbeddingTable embedding;

  std::size_t size() const { return trajectories.size(); }
};

struct RollConfig {
  // t_0 = t_1 - t0_offset_h, so the first step keeps a nonzero weight
  // (offset 1h gives psi_1 = log10(2)).
  double t0_offset_h = 1.0;
  // psi evaluates delta-t in this unit; timestamps are always stored in hours.
  double hours_per_unit = 1.0;
};

// Temporal weight log10(1 + dt) with dt clamped at 0; dt is given in the
// configured time unit.
double psi(double t_h, double t_prev_h, double hours_per_unit = 1.0);

using WarnSink = std::function<void(const std::string&)>;

// Rolls the full state sequence for one trajectory. Negative time deltas are
// clamped to zero and reported through `warn` (clock skew / rework ordering
// is a data-quality problem, not a hard error). Unknown token ids throw
// Error("UnknownToken").
StateSequence roll_states(const Trajectory& traj, const EmbeddingTable& emb,
                          const RollConfig& cfg = {},
                          const WarnSink& warn = nullptr);

std::vector<StateSequence> batch_states(const Dataset& data,
                                        const RollConfig& cfg = {},
                                        const WarnSink& warn = nullptr);

}  // namespace pla
