#include "pla/nn.hpp"

#include <algorithm>
#include <cmath>

#include "pla/error.hpp"
#include "pla/rng.hpp"

namespace pla {

std::string act_name(Act a) {
  switch (a) {
    case Act::Identity: return "identity";
    case Act::Relu: return "relu";
    case Act::Softplus: return "softplus";
  }
  return "identity";
}

Act act_from_name(const std::string& name) {
  if (name == "identity") return Act::Identity;
  if (name == "relu") return Act::Relu;
  if (name == "softplus") return Act::Softplus;
  raise("InvalidConfig", "unknown activation '" + name + "'");
}

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0)
    raise("InvalidConfig", "mlp input/output dims must be positive");
  for (std::size_t h : hidden)
    if (h == 0) raise("InvalidConfig", "mlp hidden widths must be positive");
  if (hidden_act == Act::Identity && !hidden.empty())
    raise("InvalidConfig", "hidden activation must be nonlinear");
}

std::size_t MlpSpec::param_count() const {
  std::size_t count = 0, in = input_dim;
  for (std::size_t h : hidden) {
    count += h * in + h;
    in = h;
  }
  count += output_dim * in + output_dim;
  return count;
}

std::vector<MlpSpec::LayerSlices> MlpSpec::layers(std::size_t base) const {
  std::vector<LayerSlices> out;
  std::size_t offset = base, in = input_dim;
  auto push = [&](std::size_t width) {
    LayerSlices l;
    l.w = {offset, width, in};
    offset += width * in;
    l.b = {offset, width, 1};
    offset += width;
    out.push_back(l);
    in = width;
  };
  for (std::size_t h : hidden) push(h);
  push(output_dim);
  return out;
}

std::vector<ad::Slice> MlpSpec::weight_slices(std::size_t base) const {
  std::vector<ad::Slice> out;
  for (const auto& l : layers(base)) out.push_back(l.w);
  return out;
}

ParamBundle init_mlp_params(const MlpSpec& spec, std::uint64_t seed,
                            std::size_t extra) {
  spec.validate();
  ParamBundle bundle;
  bundle.rng_seed = seed;
  bundle.values.assign(spec.param_count() + extra, 0.0);
  Rng rng(seed);
  for (const auto& layer : spec.layers()) {
    const double fan_in = static_cast<double>(layer.w.cols);
    const double fan_out = static_cast<double>(layer.w.rows);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < layer.w.size(); ++i)
      bundle.values[layer.w.offset + i] = rng.uniform(-a, a);
    // biases stay zero
  }
  return bundle;
}

namespace {

void apply_act(Act act, double* data, std::size_t n) {
  switch (act) {
    case Act::Identity:
      return;
    case Act::Relu:
      for (std::size_t i = 0; i < n; ++i) data[i] = data[i] > 0.0 ? data[i] : 0.0;
      return;
    case Act::Softplus:
      for (std::size_t i = 0; i < n; ++i) data[i] = ad::stable_softplus(data[i]);
      return;
  }
}

}  // namespace

void mlp_forward_batch(const MlpSpec& spec, std::span<const double> params,
                       const Matrix& x, Matrix& out) {
  if (x.cols != spec.input_dim)
    raise("ShapeMismatch", "mlp input has width " + std::to_string(x.cols) +
                               ", expected " + std::to_string(spec.input_dim));
  const auto layers = spec.layers();
  Matrix cur = x;
  Matrix next;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& l = layers[li];
    next = Matrix(cur.rows, l.w.rows);
    const double* wp = params.data() + l.w.offset;
    const double* bp = params.data() + l.b.offset;
    for (std::size_t r = 0; r < cur.rows; ++r) {
      const double* xr = cur.data.data() + r * l.w.cols;
      double* yr = next.data.data() + r * l.w.rows;
      for (std::size_t o = 0; o < l.w.rows; ++o)
        yr[o] = ad::dot(wp + o * l.w.cols, xr, l.w.cols) + bp[o];
    }
    const bool last = li + 1 == layers.size();
    apply_act(last ? spec.output_act : spec.hidden_act, next.data.data(),
              next.data.size());
    cur = std::move(next);
  }
  out = std::move(cur);
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamBundle& params,
                                std::span<const double> input) {
  Matrix x(1, input.size());
  std::copy(input.begin(), input.end(), x.data.begin());
  Matrix out;
  mlp_forward_batch(spec, params.values, x, out);
  return out.data;
}

int mlp_tape_forward(ad::Tape& tape, const MlpSpec& spec, std::size_t base,
                     int x) {
  const auto layers = spec.layers(base);
  int cur = x;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    cur = tape.affine(cur, layers[li].w, layers[li].b);
    const Act act = (li + 1 == layers.size()) ? spec.output_act : spec.hidden_act;
    if (act == Act::Relu) cur = tape.relu(cur);
    else if (act == Act::Softplus) cur = tape.softplus(cur);
  }
  return cur;
}

void adam_step(std::vector<double>& params, std::span<const double> grads,
               OptimState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    raise("ShapeMismatch", "adam: parameter/gradient/state sizes disagree");
  const AdamConfig& c = state.cfg;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
}

double finite_diff_check(const std::vector<double>& params, const LossFn& loss,
                         const GradFn& grad, double h,
                         std::uint64_t subset_seed) {
  if (!(h > 0.0)) raise("InvalidStep", "finite-difference step must be > 0");
  const std::vector<double> analytic = grad(params);
  if (analytic.size() != params.size())
    raise("ShapeMismatch", "gradient size does not match parameters");

  std::vector<std::size_t> indices(params.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  constexpr std::size_t kSubsetThreshold = 10000;
  constexpr std::size_t kSubsetSize = 512;
  if (params.size() > kSubsetThreshold) {
    Rng rng = Rng::substream(subset_seed, "fdcheck");
    rng.shuffle(indices);
    indices.resize(kSubsetSize);
  }

  std::vector<double> work = params;
  double max_rel = 0.0;
  for (std::size_t i : indices) {
    const double orig = work[i];
    work[i] = orig + h;
    const double up = loss(work);
    work[i] = orig - h;
    const double down = loss(work);
    work[i] = orig;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
    max_rel = std::max(max_rel, std::abs(numeric - analytic[i]) / denom);
  }
  return max_rel;
}

}  // namespace pla
