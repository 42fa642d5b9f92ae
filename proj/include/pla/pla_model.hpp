#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pla/nn.hpp"
#include "pla/trajectory.hpp"

namespace pla {

struct PlaConfig {
  std::vector<std::size_t> hidden = {64, 64};
  Act output_act = Act::Softplus;  // softplus (default) or relu; both keep G >= 0
  double mu = 0.01;                // reward weight
  double mu_td = 1.0;              // TD penalty weight
  double lr = 3e-3;
  std::size_t epochs = 300;
  std::uint64_t init_seed = 0;
  RollConfig roll;
};

// Potential-loss model. F(z_t) = c0 + sum_{i<=t} G(z_{i-1}, z_i), where the
// difference network G takes the concatenated pair of states and its output
// activation keeps it non-negative, so F is non-decreasing along any
// trajectory by construction. c0 = softplus(base_raw) models F at the common
// origin state z_0 = 0.
struct PlaModel {
  MlpSpec g_spec;      // input 2D -> hidden -> scalar, non-negative output
  ParamBundle params;  // G parameters followed by one trailing base_raw scalar
  double mu = 0.0;
  double mu_td = 0.0;
  double final_objective = 0.0;
  std::size_t epochs = 0;

  std::size_t base_raw_index() const { return g_spec.param_count(); }
  double base_raw() const { return params.values[base_raw_index()]; }
  double base_value() const;  // c0 = softplus(base_raw)
};

struct PlaAttribution {
  std::string wafer_id;
  std::vector<double> alphas;  // alpha_k = G(z_{k-1}, z_k) >= 0
  double base = 0.0;           // c0
  double terminal = 0.0;       // F(z_L) = base + sum alphas
};

// G(z_prev, z_next); both vectors must have the embedding dimension.
double g_value(const PlaModel& model, std::span<const double> z_prev,
               std::span<const double> z_next);

// F(z_t) accumulated along the given sequence; t in [0, L].
double f_value(const PlaModel& model, const StateSequence& states, std::size_t t);

// The training objective R (to be maximized), evaluated without the tape:
//   (1/N) sum_n [ (mu/L_n) sum_{t=1..L_n} F(z_t)
//                 - 1/2 (y_n - F(z_L))^2
//                 - 1/2 mu_td sum_{t=1..L_n-1} G(z_t, z_{t+1})^2 ]
double pla_objective(const PlaModel& model, std::span<const StateSequence> states,
                     std::span<const double> outcomes, double mu, double mu_td);
double pla_objective(const PlaModel& model, const Dataset& data, double mu,
                     double mu_td, const RollConfig& roll = {});

// -R and (optionally) its gradient via the tape; the quantity the trainer
// minimizes and tests finite-difference.
double pla_neg_objective(const MlpSpec& g_spec, const std::vector<double>& params,
                         std::span<const StateSequence> states,
                         std::span<const double> outcomes, double mu, double mu_td,
                         std::vector<double>* grad = nullptr);

PlaModel train_pla(const Dataset& data, const PlaConfig& cfg,
                   std::vector<double>* objective_trace = nullptr);

PlaModel train_pla_on(std::span<const StateSequence> states,
                      std::span<const double> outcomes, std::size_t state_dim,
                      const PlaConfig& cfg,
                      std::vector<double>* objective_trace = nullptr);

PlaAttribution attribute_pla(const PlaModel& model, const StateSequence& states,
                             const std::string& wafer_id = {});

// Cumulative curve points (t_k, base + sum_{i<=k} alpha_i) for k = 0..L, with
// the k = 0 point at t0. Works for both attribution flavors.
std::vector<std::pair<double, double>> cumulative_curve(
    std::span<const double> alphas, double base,
    std::span<const double> timestamps, double t0);

}  // namespace pla
