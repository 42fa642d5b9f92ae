#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pla/nn.hpp"
#include "pla/trajectory.hpp"

namespace pla {

struct PtrConfig {
  std::vector<std::size_t> hidden;  // empty = affine baseline
  double eta = 1e-4;                // l1 strength (weights only)
  double lr = 0.01;
  std::size_t epochs = 1500;
  std::uint64_t init_seed = 0;
  RollConfig roll;
};

// Partial trajectory regression model: f(z_k) predicts the terminal outcome
// from any prefix state, trained on all prefixes of every wafer.
struct PtrModel {
  MlpSpec spec;
  ParamBundle params;
  double eta = 0.0;
  double final_loss = 0.0;
  std::size_t epochs = 0;
};

struct PtrAttribution {
  std::string wafer_id;
  std::vector<double> alphas;  // alpha_k = f(z_k) - f(z_{k-1}); may be negative
  double baseline = 0.0;       // f(z_0)
};

// Training objective:
//   (1/2N) sum_n (1/L_n) sum_{k=1..L_n} (y_n - f(z_k))^2 + eta * sum |W|
// (biases are exempt from the l1 term). When `grad` is non-null it receives
// the full gradient. Exposed so tests can finite-difference the exact loss
// the trainer optimizes.
double ptr_loss(const MlpSpec& spec, const std::vector<double>& params,
                std::span<const StateSequence> states,
                std::span<const double> outcomes, double eta,
                std::vector<double>* grad = nullptr);

// Full-batch Adam on ptr_loss. Throws Error("MissingOutcome") if a trajectory
// lacks an outcome and Error("NonFiniteLoss") if the loss leaves the reals.
PtrModel train_ptr(const Dataset& data, const PtrConfig& cfg,
                   std::vector<double>* loss_trace = nullptr);

// Fold-level variant over prerolled states (states/outcomes already aligned).
PtrModel train_ptr_on(std::span<const StateSequence> states,
                      std::span<const double> outcomes, std::size_t input_dim,
                      const PtrConfig& cfg,
                      std::vector<double>* loss_trace = nullptr);

// f(z_k); k in [0, L], Error("IndexOutOfRange") otherwise.
double predict_ptr(const PtrModel& model, const StateSequence& states,
                   std::size_t k);

PtrAttribution attribute_ptr(const PtrModel& model, const StateSequence& states,
                             const std::string& wafer_id = {});

}  // namespace pla
