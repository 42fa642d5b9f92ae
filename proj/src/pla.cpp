#include "pla/pla_model.hpp"

#include <algorithm>
#include <cmath>

#include "pla/error.hpp"

namespace pla {

namespace {

double inverse_softplus(double y) {
  // softplus(x) = y  =>  x = log(e^y - 1); y must be > 0
  if (y >= 700.0) return y;  // softplus is the identity to double precision here
  return std::log(std::expm1(y));
}

// one (L x 2D) row block of [z_{t-1} | z_t] pairs for a trajectory
Matrix transition_inputs(const StateSequence& seq) {
  const std::size_t length = seq.length();
  const std::size_t dim = seq.states.cols;
  Matrix x(length, 2 * dim);
  for (std::size_t t = 0; t < length; ++t) {
    const auto prev = seq.state(t);
    const auto next = seq.state(t + 1);
    double* row = x.data.data() + t * 2 * dim;
    std::copy(prev.begin(), prev.end(), row);
    std::copy(next.begin(), next.end(), row + dim);
  }
  return x;
}

}  // namespace

double PlaModel::base_value() const { return ad::stable_softplus(base_raw()); }

double g_value(const PlaModel& model, std::span<const double> z_prev,
               std::span<const double> z_next) {
  const std::size_t dim = model.g_spec.input_dim / 2;
  if (z_prev.size() != dim || z_next.size() != dim)
    raise("ShapeMismatch", "g_value expects two state vectors of dimension " +
                               std::to_string(dim));
  std::vector<double> input(2 * dim);
  std::copy(z_prev.begin(), z_prev.end(), input.begin());
  std::copy(z_next.begin(), z_next.end(), input.begin() + dim);
  return mlp_forward(model.g_spec, model.params, input)[0];
}

namespace {

// G over every transition of a sequence in one batched forward
std::vector<double> g_values(const PlaModel& model, const StateSequence& seq) {
  const Matrix x = transition_inputs(seq);
  Matrix out;
  mlp_forward_batch(model.g_spec, model.params.values, x, out);
  return out.data;
}

}  // namespace

double f_value(const PlaModel& model, const StateSequence& states, std::size_t t) {
  if (t > states.length())
    raise("IndexOutOfRange", "state index " + std::to_string(t) +
                                 " exceeds trajectory length " +
                                 std::to_string(states.length()));
  const auto g = g_values(model, states);
  double f = model.base_value();
  for (std::size_t i = 0; i < t; ++i) f += g[i];
  return f;
}

double pla_neg_objective(const MlpSpec& g_spec, const std::vector<double>& params,
                         std::span<const StateSequence> states,
                         std::span<const double> outcomes, double mu, double mu_td,
                         std::vector<double>* grad) {
  if (states.size() != outcomes.size())
    raise("ShapeMismatch", "states/outcomes count mismatch");
  const std::size_t n = states.size();
  if (n == 0) raise("InvalidConfig", "pla objective needs at least one wafer");

  const ad::Slice base_slice{g_spec.param_count(), 1, 1};
  ad::Tape tape;
  tape.bind(&params, grad);
  double total = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    const StateSequence& seq = states[w];
    const std::size_t length = seq.length();
    const Matrix inputs = transition_inputs(seq);
    tape.reset();
    const int x = tape.constant(inputs.data, length, inputs.cols);
    const int g = mlp_tape_forward(tape, g_spec, 0, x);
    const int c0 = tape.softplus(tape.param(base_slice));
    const int f = tape.add_scalar(tape.prefix_sum(g), c0);

    const int reward =
        tape.scale(tape.sum(f), mu / static_cast<double>(length));
    const int resid =
        tape.add_const(tape.scale(tape.pick(f, length - 1), -1.0), outcomes[w]);
    const int terminal = tape.scale(tape.square(resid), -0.5);
    // TD penalty runs over transitions z_1 -> z_2 .. z_{L-1} -> z_L,
    // i.e. G entries 2..L (index 1 onward)
    const int td = tape.scale(tape.sum_sq_from(g, 1), -0.5 * mu_td);

    const int wafer_r = tape.add(tape.add(reward, terminal), td);
    const int contrib = tape.scale(wafer_r, -1.0 / static_cast<double>(n));
    total += tape.value_scalar(contrib);
    if (grad) tape.backward(contrib);
  }
  return total;
}

double pla_objective(const PlaModel& model, std::span<const StateSequence> states,
                     std::span<const double> outcomes, double mu, double mu_td) {
  // plain evaluation, independent of the tape path
  if (states.size() != outcomes.size())
    raise("ShapeMismatch", "states/outcomes count mismatch");
  const std::size_t n = states.size();
  if (n == 0) raise("InvalidConfig", "pla objective needs at least one wafer");
  const double c0 = model.base_value();
  double total = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    const auto g = g_values(model, states[w]);
    const std::size_t length = g.size();
    double f = c0, sum_f = 0.0, td = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
      f += g[t];
      sum_f += f;
      if (t >= 1) td += g[t] * g[t];
    }
    const double resid = outcomes[w] - f;
    total += mu / static_cast<double>(length) * sum_f - 0.5 * resid * resid -
             0.5 * mu_td * td;
  }
  return total / static_cast<double>(n);
}

double pla_objective(const PlaModel& model, const Dataset& data, double mu,
                     double mu_td, const RollConfig& roll) {
  std::vector<double> outcomes;
  for (const auto& traj : data.trajectories) {
    if (!traj.outcome)
      raise("MissingOutcome", "wafer " + traj.wafer_id + " has no outcome");
    outcomes.push_back(*traj.outcome);
  }
  const auto states = batch_states(data, roll);
  return pla_objective(model, states, outcomes, mu, mu_td);
}

PlaModel train_pla_on(std::span<const StateSequence> states,
                      std::span<const double> outcomes, std::size_t state_dim,
                      const PlaConfig& cfg, std::vector<double>* objective_trace) {
  if (states.size() < 2)
    raise("InvalidConfig", "pla training needs at least 2 wafers");
  if (!(cfg.mu >= 0.0) || !(cfg.mu_td >= 0.0))
    raise("InvalidConfig", "pla mu and mu_td must be non-negative");
  if (cfg.output_act == Act::Identity)
    raise("InvalidConfig", "pla output activation must keep G non-negative");

  PlaModel model;
  model.g_spec.input_dim = 2 * state_dim;
  model.g_spec.hidden = cfg.hidden;
  model.g_spec.output_dim = 1;
  model.g_spec.hidden_act = Act::Relu;
  model.g_spec.output_act = cfg.output_act;
  model.g_spec.validate();
  model.mu = cfg.mu;
  model.mu_td = cfg.mu_td;
  model.epochs = cfg.epochs;
  model.params = init_mlp_params(model.g_spec, cfg.init_seed, 1);

  // Anchor c0 near the outcome mean so F starts at a sane level, and start
  // the softplus head with zero weights and a low bias so attributions grow
  // from ~0 instead of unwinding a random positive sum. A relu head keeps
  // Glorot weights: a negative preactivation would have zero gradient.
  double mean_y = 0.0;
  for (double y : outcomes) mean_y += y;
  mean_y /= static_cast<double>(outcomes.size());
  model.params.values[model.base_raw_index()] =
      inverse_softplus(std::max(mean_y, 1e-3));
  if (cfg.output_act == Act::Softplus) {
    const auto head = model.g_spec.layers().back();
    for (std::size_t i = 0; i < head.w.size(); ++i)
      model.params.values[head.w.offset + i] = 0.0;
    model.params.values[head.b.offset] = inverse_softplus(0.01);
  }

  OptimState opt(model.params.values.size(), AdamConfig{.lr = cfg.lr});
  std::vector<double> grad(model.params.values.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double neg = pla_neg_objective(model.g_spec, model.params.values, states,
                                         outcomes, cfg.mu, cfg.mu_td, &grad);
    if (!std::isfinite(neg))
      raise("NonFiniteLoss", "pla objective diverged at epoch " + std::to_string(epoch));
    if (objective_trace) objective_trace->push_back(-neg);
    adam_step(model.params.values, grad, opt);
  }
  model.final_objective = -pla_neg_objective(model.g_spec, model.params.values,
                                             states, outcomes, cfg.mu, cfg.mu_td);
  if (objective_trace) objective_trace->push_back(model.final_objective);
  return model;
}

PlaModel train_pla(const Dataset& data, const PlaConfig& cfg,
                   std::vector<double>* objective_trace) {
  std::vector<double> outcomes;
  outcomes.reserve(data.size());
  for (const auto& traj : data.trajectories) {
    if (!traj.outcome)
      raise("MissingOutcome", "wafer " + traj.wafer_id + " has no outcome");
    outcomes.push_back(*traj.outcome);
  }
  const auto states = batch_states(data, cfg.roll);
  return train_pla_on(states, outcomes, data.embedding.dimension, cfg,
                      objective_trace);
}

PlaAttribution attribute_pla(const PlaModel& model, const StateSequence& states,
                             const std::string& wafer_id) {
  if (states.length() == 0)
    raise("InvalidConfig", "cannot attribute an empty trajectory");
  PlaAttribution attr;
  attr.wafer_id = wafer_id;
  attr.alphas = g_values(model, states);
  attr.base = model.base_value();
  double f = attr.base;
  for (double a : attr.alphas) f += a;
  attr.terminal = f;
  return attr;
}

std::vector<std::pair<double, double>> cumulative_curve(
    std::span<const double> alphas, double base,
    std::span<const double> timestamps, double t0) {
  if (alphas.size() != timestamps.size())
    raise("LengthMismatch", "alphas and timestamps differ in length");
  std::vector<std::pair<double, double>> points;
  points.reserve(alphas.size() + 1);
  points.emplace_back(t0, base);
  double acc = base;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    acc += alphas[k];
    points.emplace_back(timestamps[k], acc);
  }
  return points;
}

}  // namespace pla
