#include "pla/ptr.hpp"

#include <cmath>

#include "pla/error.hpp"

namespace pla {

double ptr_loss(const MlpSpec& spec, const std::vector<double>& params,
                std::span<const StateSequence> states,
                std::span<const double> outcomes, double eta,
                std::vector<double>* grad) {
  if (states.size() != outcomes.size())
    raise("ShapeMismatch", "states/outcomes count mismatch");
  const std::size_t n = states.size();
  if (n == 0) raise("InvalidConfig", "ptr loss needs at least one wafer");

  ad::Tape tape;
  tape.bind(&params, grad);
  double total = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    const StateSequence& seq = states[w];
    const std::size_t length = seq.length();
    tape.reset();
    // prefix states z_1..z_L (row 0 of the sequence is z_0)
    const int x = tape.constant(
        {seq.states.data.data() + seq.states.cols, length * seq.states.cols},
        length, seq.states.cols);
    const int f = mlp_tape_forward(tape, spec, 0, x);
    const int resid = tape.add_const(tape.scale(f, -1.0), outcomes[w]);
    const int wafer_term = tape.scale(
        tape.sum(tape.square(resid)),
        1.0 / (2.0 * static_cast<double>(n) * static_cast<double>(length)));
    total += tape.value_scalar(wafer_term);
    if (grad) tape.backward(wafer_term);
  }

  if (eta != 0.0) {
    tape.reset();
    const auto weights = spec.weight_slices();
    const int reg = tape.scale(tape.l1(weights), eta);
    total += tape.value_scalar(reg);
    if (grad) tape.backward(reg);
  }
  return total;
}

namespace {

MlpSpec ptr_spec(std::size_t input_dim, const PtrConfig& cfg) {
  MlpSpec spec;
  spec.input_dim = input_dim;
  spec.hidden = cfg.hidden;
  spec.output_dim = 1;
  spec.hidden_act = Act::Relu;
  spec.output_act = Act::Identity;
  spec.validate();
  return spec;
}

}  // namespace

PtrModel train_ptr_on(std::span<const StateSequence> states,
                      std::span<const double> outcomes, std::size_t input_dim,
                      const PtrConfig& cfg, std::vector<double>* loss_trace) {
  if (states.size() < 2)
    raise("InvalidConfig", "ptr training needs at least 2 wafers");
  PtrModel model;
  model.spec = ptr_spec(input_dim, cfg);
  model.params = init_mlp_params(model.spec, cfg.init_seed);
  model.eta = cfg.eta;
  model.epochs = cfg.epochs;

  OptimState opt(model.params.values.size(), AdamConfig{.lr = cfg.lr});
  std::vector<double> grad(model.params.values.size());
  double loss = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    loss = ptr_loss(model.spec, model.params.values, states, outcomes, cfg.eta,
                    &grad);
    if (!std::isfinite(loss))
      raise("NonFiniteLoss", "ptr loss diverged at epoch " + std::to_string(epoch));
    if (loss_trace) loss_trace->push_back(loss);
    adam_step(model.params.values, grad, opt);
  }
  model.final_loss = ptr_loss(model.spec, model.params.values, states, outcomes,
                              cfg.eta, nullptr);
  if (loss_trace) loss_trace->push_back(model.final_loss);
  return model;
}

PtrModel train_ptr(const Dataset& data, const PtrConfig& cfg,
                   std::vector<double>* loss_trace) {
  std::vector<double> outcomes;
  outcomes.reserve(data.size());
  for (const auto& traj : data.trajectories) {
    if (!traj.outcome)
      raise("MissingOutcome", "wafer " + traj.wafer_id + " has no outcome");
    outcomes.push_back(*traj.outcome);
  }
  const auto states = batch_states(data, cfg.roll);
  return train_ptr_on(states, outcomes, data.embedding.dimension, cfg, loss_trace);
}

double predict_ptr(const PtrModel& model, const StateSequence& states,
                   std::size_t k) {
  if (k > states.length())
    raise("IndexOutOfRange", "prefix index " + std::to_string(k) +
                                 " exceeds trajectory length " +
                                 std::to_string(states.length()));
  return mlp_forward(model.spec, model.params, states.state(k))[0];
}

PtrAttribution attribute_ptr(const PtrModel& model, const StateSequence& states,
                             const std::string& wafer_id) {
  const std::size_t length = states.length();
  if (length == 0) raise("InvalidConfig", "cannot attribute an empty trajectory");
  Matrix out;
  mlp_forward_batch(model.spec, model.params.values, states.states, out);

  PtrAttribution attr;
  attr.wafer_id = wafer_id;
  attr.baseline = out(0, 0);
  attr.alphas.resize(length);
  for (std::size_t k = 1; k <= length; ++k)
    attr.alphas[k - 1] = out(k, 0) - out(k - 1, 0);
  return attr;
}

}  // namespace pla
