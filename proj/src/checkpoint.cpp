#include "pla/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "pla/error.hpp"

namespace pla {

namespace {

using nlohmann::json;

json spec_to_json(const MlpSpec& spec) {
  return json{{"input_dim", spec.input_dim},
              {"hidden", spec.hidden},
              {"output_dim", spec.output_dim},
              {"hidden_act", act_name(spec.hidden_act)},
              {"output_act", act_name(spec.output_act)}};
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<std::size_t>();
  spec.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  spec.output_dim = j.at("output_dim").get<std::size_t>();
  spec.hidden_act = act_from_name(j.at("hidden_act").get<std::string>());
  spec.output_act = act_from_name(j.at("output_act").get<std::string>());
  spec.validate();
  return spec;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise("IoError", "cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) raise("IoError", "short write to " + path.string());
}

json read_json(const std::filesystem::path& path, const std::string& method,
               const std::string& expect_hash) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open checkpoint " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise("CheckpointError", path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "pla-checkpoint" || j.value("version", 0) != 1)
    raise("CheckpointError", path.string() + ": not a version-1 checkpoint");
  if (j.value("method", "") != method)
    raise("StaleCheckpoint", path.string() + ": holds a '" +
                                 j.value("method", "?") + "' model, expected '" +
                                 method + "'");
  if (!expect_hash.empty() && j.value("config_hash", "") != expect_hash)
    raise("StaleCheckpoint", path.string() + ": config hash " +
                                 j.value("config_hash", "?") +
                                 " does not match current config " + expect_hash);
  return j;
}

}  // namespace

void save_ptr_checkpoint(const std::filesystem::path& path, const PtrModel& model,
                         const std::string& config_hash) {
  json j{{"format", "pla-checkpoint"},
         {"version", 1},
         {"method", "ptr"},
         {"config_hash", config_hash},
         {"spec", spec_to_json(model.spec)},
         {"eta", model.eta},
         {"final_loss", model.final_loss},
         {"epochs", model.epochs},
         {"rng_seed", model.params.rng_seed},
         {"params", model.params.values}};
  write_json(path, j);
}

PtrModel load_ptr_checkpoint(const std::filesystem::path& path,
                             const std::string& expect_hash) {
  const json j = read_json(path, "ptr", expect_hash);
  PtrModel model;
  model.spec = spec_from_json(j.at("spec"));
  model.eta = j.at("eta").get<double>();
  model.final_loss = j.at("final_loss").get<double>();
  model.epochs = j.at("epochs").get<std::size_t>();
  model.params.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  model.params.values = j.at("params").get<std::vector<double>>();
  if (model.params.values.size() != model.spec.param_count())
    raise("CheckpointError", path.string() + ": parameter count mismatch");
  return model;
}

void save_pla_checkpoint(const std::filesystem::path& path, const PlaModel& model,
                         const std::string& config_hash) {
  json j{{"format", "pla-checkpoint"},
         {"version", 1},
         {"method", "pla"},
         {"config_hash", config_hash},
         {"spec", spec_to_json(model.g_spec)},
         {"mu", model.mu},
         {"mu_td", model.mu_td},
         {"final_objective", model.final_objective},
         {"epochs", model.epochs},
         {"rng_seed", model.params.rng_seed},
         {"params", model.params.values}};
  write_json(path, j);
}

PlaModel load_pla_checkpoint(const std::filesystem::path& path,
                             const std::string& expect_hash) {
  const json j = read_json(path, "pla", expect_hash);
  PlaModel model;
  model.g_spec = spec_from_json(j.at("spec"));
  model.mu = j.at("mu").get<double>();
  model.mu_td = j.at("mu_td").get<double>();
  model.final_objective = j.at("final_objective").get<double>();
  model.epochs = j.at("epochs").get<std::size_t>();
  model.params.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  model.params.values = j.at("params").get<std::vector<double>>();
  if (model.params.values.size() != model.g_spec.param_count() + 1)
    raise("CheckpointError", path.string() + ": parameter count mismatch");
  if (model.g_spec.output_act == Act::Identity)
    raise("CheckpointError", path.string() + ": pla checkpoint with identity output");
  return model;
}

}  // namespace pla
