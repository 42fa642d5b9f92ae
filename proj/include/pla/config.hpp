#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pla/kernel.hpp"
#include "pla/nn.hpp"
#include "pla/simgen.hpp"
#include "pla/trajectory.hpp"

namespace pla {

// Flat key = value pipeline configuration. Unknown or duplicate keys are
// rejected; every output file embeds hash() so stale mixtures are caught.
struct PipelineConfig {
  // tokens
  std::vector<std::string> attribute_order = {"eqp", "recipe", "tool_type",
                                              "photo_layer", "route"};
  char separator = '|';

  // kernel + embedding
  std::size_t kernel_p = 3;
  double kernel_decay = 0.5;
  bool kernel_normalize = true;
  bool kernel_char_level = true;
  std::size_t embed_dim = 16;

  // state recursion
  double t0_offset_h = 1.0;
  std::string time_unit = "hours";  // hours | minutes | days
  double clock_skew_tolerance_h = 0.0;

  // ptr
  std::vector<std::size_t> ptr_hidden;  // empty = affine
  double ptr_eta = 1e-4;
  double ptr_lr = 0.01;
  std::size_t ptr_epochs = 1500;

  // pla
  std::vector<std::size_t> pla_hidden = {64, 64};
  std::string pla_output_activation = "softplus";  // softplus | relu
  double pla_mu = 0.01;
  double pla_mu_td = 1.0;
  double pla_lr = 3e-3;
  std::size_t pla_epochs = 300;

  // evaluation
  std::size_t cv_folds = 5;
  bool parallel_folds = true;
  std::size_t eval_top_k = 5;
  std::size_t svg_limit = 0;  // 0 = a curve file for every wafer

  std::uint64_t seed = 42;

  // simulator (sim_* keys); use sim_config(), which derives sim.seed from
  // the root seed
  SimConfig sim;
  SimConfig sim_config() const;

  static PipelineConfig from_file(const std::filesystem::path& path);
  static PipelineConfig from_text(const std::string& text);

  // every known key in sorted order with normalized values; hash input
  std::string canonical_text() const;
  std::string hash() const;  // 16 hex chars (fnv-1a of canonical_text)

  KernelParams kernel_params() const;
  RollConfig roll_config() const;
  double hours_per_unit() const;

  void validate() const;
};

}  // namespace pla
