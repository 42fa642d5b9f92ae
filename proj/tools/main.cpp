#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pla/config.hpp"
#include "pla/error.hpp"
#include "pla/pipeline.hpp"

namespace {

pla::PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return pla::PipelineConfig{};
  return pla::PipelineConfig::from_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"potential loss analysis pipeline for wafer defect attribution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "pla_out";
  std::string method;
  std::string checkpoint;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--out", out_dir, "pipeline working directory");
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "generate a synthetic fab dataset");
  add_common(simulate);

  CLI::App* embed =
      app.add_subcommand("embed", "tokenize history and export kernel embeddings");
  add_common(embed);

  CLI::App* train = app.add_subcommand("train", "train a regression model");
  add_common(train);
  train->add_option("--method", method, "ptr or pla")->required();

  CLI::App* attribute =
      app.add_subcommand("attribute", "emit per-process attribution scores");
  add_common(attribute);
  attribute->add_option("--method", method, "ptr or pla")->required();
  attribute->add_option("--checkpoint", checkpoint,
                        "checkpoint file (default: <out>/checkpoint_<method>.json)");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "cross-validated comparison of ptr and pla");
  add_common(evaluate);

  CLI11_PARSE(app, argc, argv);

  try {
    const pla::PipelineConfig config = load_config(config_path);
    if (simulate->parsed()) {
      pla::cmd_simulate(config, out_dir);
    } else if (embed->parsed()) {
      pla::cmd_embed(config, out_dir);
    } else if (train->parsed()) {
      pla::cmd_train(method, config, out_dir);
    } else if (attribute->parsed()) {
      pla::cmd_attribute(method, config, out_dir, checkpoint);
    } else if (evaluate->parsed()) {
      pla::cmd_evaluate(config, out_dir);
    }
  } catch (const pla::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
