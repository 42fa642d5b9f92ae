#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pla/autodiff.hpp"
#include "pla/matrix.hpp"

namespace pla {

enum class Act { Identity, Relu, Softplus };

std::string act_name(Act a);
Act act_from_name(const std::string& name);

// Fully-connected stack; empty hidden list with identity output is a plain
// affine model. Parameters are laid out per layer as W (out x in, row-major)
// then b (out), all in one flat vector.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 1;
  Act hidden_act = Act::Relu;
  Act output_act = Act::Identity;

  void validate() const;
  std::size_t layer_count() const { return hidden.size() + 1; }
  std::size_t param_count() const;

  struct LayerSlices {
    ad::Slice w;
    ad::Slice b;
  };
  // slices into a flat parameter vector starting at `base`
  std::vector<LayerSlices> layers(std::size_t base = 0) const;
  std::vector<ad::Slice> weight_slices(std::size_t base = 0) const;
};

// Flat trainable parameters plus the seed they were initialized from.
struct ParamBundle {
  std::vector<double> values;
  std::uint64_t rng_seed = 0;
};

// Glorot-uniform weight init (a = sqrt(6/(fan_in+fan_out))), zero biases.
// `extra` appends that many zero-initialized trailing parameters (used for
// scalar heads such as the learned base value).
ParamBundle init_mlp_params(const MlpSpec& spec, std::uint64_t seed,
                            std::size_t extra = 0);

// Plain batched forward: X (n x input_dim) -> out (n x output_dim).
void mlp_forward_batch(const MlpSpec& spec, std::span<const double> params,
                       const Matrix& x, Matrix& out);

// Single-vector convenience wrapper around the batched forward.
std::vector<double> mlp_forward(const MlpSpec& spec, const ParamBundle& params,
                                std::span<const double> input);

// Builds the MLP on a tape; returns the output node ((rows of x) x output_dim).
int mlp_tape_forward(ad::Tape& tape, const MlpSpec& spec, std::size_t base,
                     int x);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimState {
  std::size_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  AdamConfig cfg;

  explicit OptimState(std::size_t n = 0, AdamConfig c = {})
      : m(n, 0.0), v(n, 0.0), cfg(c) {}
};

// Standard Adam with bias correction; deterministic given inputs.
void adam_step(std::vector<double>& params, std::span<const double> grads,
               OptimState& state);

using LossFn = std::function<double(const std::vector<double>&)>;
using GradFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Central-difference gradient check. Returns the maximum relative error
// over all parameters (or a seeded random subset of 512 above 10k params);
// the denominator is max(|analytic|, |numeric|, 1e-3). h must be > 0
// (Error("InvalidStep") otherwise).
double finite_diff_check(const std::vector<double>& params, const LossFn& loss,
                         const GradFn& grad, double h,
                         std::uint64_t subset_seed = 0);

}  // namespace pla
