#include "pla/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pla/error.hpp"
#include "pla/format.hpp"
#include "pla/rng.hpp"

namespace pla {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  raise("InvalidConfig", "key '" + key + "': '" + v + "' is not a boolean");
}

std::size_t parse_size(const std::string& v, const std::string& key) {
  const long long n = parse_int(v, "key '" + key + "'");
  if (n < 0) raise("InvalidConfig", "key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(n);
}

std::vector<std::size_t> parse_size_list(const std::string& v, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& part : split(v, ',')) out.push_back(parse_size(part, key));
  return out;
}

std::string size_list_text(const std::vector<std::size_t>& v) {
  std::vector<std::string> parts;
  for (std::size_t x : v) parts.push_back(std::to_string(x));
  return join(parts, ',');
}

std::vector<PlantedCause> parse_planted(const std::string& v, const std::string& key) {
  std::vector<PlantedCause> out;
  for (const auto& item : split(v, ';')) {
    const auto fields = split(item, ':');
    if (fields.size() != 3)
      raise("InvalidConfig",
            "key '" + key + "': planted cause must be tool:threshold:effect");
    PlantedCause c;
    c.tool_id = parse_size(fields[0], key);
    c.wait_threshold_h = parse_double(fields[1], "key '" + key + "'");
    c.effect = parse_double(fields[2], "key '" + key + "'");
    out.push_back(c);
  }
  return out;
}

std::string planted_text(const std::vector<PlantedCause>& v) {
  std::vector<std::string> parts;
  for (const auto& c : v)
    parts.push_back(std::to_string(c.tool_id) + ":" + fmt_double(c.wait_threshold_h) +
                    ":" + fmt_double(c.effect));
  return join(parts, ';');
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

PipelineConfig PipelineConfig::from_text(const std::string& text) {
  PipelineConfig cfg;
  std::map<std::string, std::string> seen;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise("InvalidConfig",
            "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      raise("InvalidConfig", "line " + std::to_string(lineno) + ": empty key");
    if (!seen.emplace(key, value).second)
      raise("InvalidConfig", "duplicate key '" + key + "'");
  }

  for (const auto& [key, value] : seen) {
    if (key == "attribute_order") {
      cfg.attribute_order = split(value, ',');
    } else if (key == "separator") {
      if (value.size() != 1)
        raise("InvalidConfig", "separator must be a single character");
      cfg.separator = value[0];
    } else if (key == "kernel_p") {
      cfg.kernel_p = parse_size(value, key);
    } else if (key == "kernel_decay") {
      cfg.kernel_decay = parse_double(value, key);
    } else if (key == "kernel_normalize") {
      cfg.kernel_normalize = parse_bool(value, key);
    } else if (key == "kernel_char_level") {
      cfg.kernel_char_level = parse_bool(value, key);
    } else if (key == "embed_dim") {
      cfg.embed_dim = parse_size(value, key);
    } else if (key == "t0_offset_h") {
      cfg.t0_offset_h = parse_double(value, key);
    } else if (key == "time_unit") {
      cfg.time_unit = value;
    } else if (key == "clock_skew_tolerance_h") {
      cfg.clock_skew_tolerance_h = parse_double(value, key);
    } else if (key == "ptr_hidden") {
      cfg.ptr_hidden = parse_size_list(value, key);
    } else if (key == "ptr_eta") {
      cfg.ptr_eta = parse_double(value, key);
    } else if (key == "ptr_lr") {
      cfg.ptr_lr = parse_double(value, key);
    } else if (key == "ptr_epochs") {
      cfg.ptr_epochs = parse_size(value, key);
    } else if (key == "pla_hidden") {
      cfg.pla_hidden = parse_size_list(value, key);
    } else if (key == "pla_output_activation") {
      cfg.pla_output_activation = value;
    } else if (key == "pla_mu") {
      cfg.pla_mu = parse_double(value, key);
    } else if (key == "pla_mu_td") {
      cfg.pla_mu_td = parse_double(value, key);
    } else if (key == "pla_lr") {
      cfg.pla_lr = parse_double(value, key);
    } else if (key == "pla_epochs") {
      cfg.pla_epochs = parse_size(value, key);
    } else if (key == "cv_folds") {
      cfg.cv_folds = parse_size(value, key);
    } else if (key == "parallel_folds") {
      cfg.parallel_folds = parse_bool(value, key);
    } else if (key == "eval_top_k") {
      cfg.eval_top_k = parse_size(value, key);
    } else if (key == "svg_limit") {
      cfg.svg_limit = parse_size(value, key);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "sim_n_wafers") {
      cfg.sim.n_wafers = parse_size(value, key);
    } else if (key == "sim_route_len_min") {
      cfg.sim.route_len_min = parse_size(value, key);
    } else if (key == "sim_route_len_max") {
      cfg.sim.route_len_max = parse_size(value, key);
    } else if (key == "sim_n_tools") {
      cfg.sim.n_tools = parse_size(value, key);
    } else if (key == "sim_recipes_per_tool") {
      cfg.sim.recipes_per_tool = parse_size(value, key);
    } else if (key == "sim_n_photo_layers") {
      cfg.sim.n_photo_layers = parse_size(value, key);
    } else if (key == "sim_n_routes") {
      cfg.sim.n_routes = parse_size(value, key);
    } else if (key == "sim_wait_mu") {
      cfg.sim.wait_lognorm_mu = parse_double(value, key);
    } else if (key == "sim_wait_sigma") {
      cfg.sim.wait_lognorm_sigma = parse_double(value, key);
    } else if (key == "sim_planted") {
      cfg.sim.planted = parse_planted(value, key);
    } else if (key == "sim_smooth_coeff") {
      cfg.sim.smooth_coeff = parse_double(value, key);
    } else if (key == "sim_base_y") {
      cfg.sim.base_y = parse_double(value, key);
    } else if (key == "sim_noise_sigma") {
      cfg.sim.noise_sigma = parse_double(value, key);
    } else if (key == "sim_signed_contributions") {
      cfg.sim.signed_contributions = parse_bool(value, key);
    } else {
      raise("InvalidConfig", "unknown key '" + key + "'");
    }
  }

  cfg.validate();
  return cfg;
}

SimConfig PipelineConfig::sim_config() const {
  SimConfig s = sim;
  s.seed = Rng::derive(seed, "sim-root");
  return s;
}

std::string PipelineConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  kv["attribute_order"] = join(attribute_order, ',');
  kv["separator"] = std::string(1, separator);
  kv["kernel_p"] = std::to_string(kernel_p);
  kv["kernel_decay"] = fmt_double(kernel_decay);
  kv["kernel_normalize"] = kernel_normalize ? "true" : "false";
  kv["kernel_char_level"] = kernel_char_level ? "true" : "false";
  kv["embed_dim"] = std::to_string(embed_dim);
  kv["t0_offset_h"] = fmt_double(t0_offset_h);
  kv["time_unit"] = time_unit;
  kv["clock_skew_tolerance_h"] = fmt_double(clock_skew_tolerance_h);
  kv["ptr_hidden"] = size_list_text(ptr_hidden);
  kv["ptr_eta"] = fmt_double(ptr_eta);
  kv["ptr_lr"] = fmt_double(ptr_lr);
  kv["ptr_epochs"] = std::to_string(ptr_epochs);
  kv["pla_hidden"] = size_list_text(pla_hidden);
  kv["pla_output_activation"] = pla_output_activation;
  kv["pla_mu"] = fmt_double(pla_mu);
  kv["pla_mu_td"] = fmt_double(pla_mu_td);
  kv["pla_lr"] = fmt_double(pla_lr);
  kv["pla_epochs"] = std::to_string(pla_epochs);
  kv["cv_folds"] = std::to_string(cv_folds);
  kv["parallel_folds"] = parallel_folds ? "true" : "false";
  kv["eval_top_k"] = std::to_string(eval_top_k);
  kv["svg_limit"] = std::to_string(svg_limit);
  kv["seed"] = std::to_string(seed);
  kv["sim_n_wafers"] = std::to_string(sim.n_wafers);
  kv["sim_route_len_min"] = std::to_string(sim.route_len_min);
  kv["sim_route_len_max"] = std::to_string(sim.route_len_max);
  kv["sim_n_tools"] = std::to_string(sim.n_tools);
  kv["sim_recipes_per_tool"] = std::to_string(sim.recipes_per_tool);
  kv["sim_n_photo_layers"] = std::to_string(sim.n_photo_layers);
  kv["sim_n_routes"] = std::to_string(sim.n_routes);
  kv["sim_wait_mu"] = fmt_double(sim.wait_lognorm_mu);
  kv["sim_wait_sigma"] = fmt_double(sim.wait_lognorm_sigma);
  kv["sim_planted"] = planted_text(sim.planted);
  kv["sim_smooth_coeff"] = fmt_double(sim.smooth_coeff);
  kv["sim_base_y"] = fmt_double(sim.base_y);
  kv["sim_noise_sigma"] = fmt_double(sim.noise_sigma);
  kv["sim_signed_contributions"] = sim.signed_contributions ? "true" : "false";

  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string PipelineConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : canonical_text()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

KernelParams PipelineConfig::kernel_params() const {
  KernelParams kp;
  kp.max_subseq_len = kernel_p;
  kp.decay = kernel_decay;
  kp.char_level = kernel_char_level;
  kp.field_separator = separator;
  return kp;
}

RollConfig PipelineConfig::roll_config() const {
  return RollConfig{.t0_offset_h = t0_offset_h, .hours_per_unit = hours_per_unit()};
}

double PipelineConfig::hours_per_unit() const {
  if (time_unit == "hours") return 1.0;
  if (time_unit == "minutes") return 1.0 / 60.0;
  if (time_unit == "days") return 24.0;
  raise("InvalidConfig", "time_unit must be hours, minutes or days");
}

void PipelineConfig::validate() const {
  if (attribute_order.empty())
    raise("InvalidConfig", "attribute_order must not be empty");
  kernel_params().validate();
  if (embed_dim == 0) raise("InvalidConfig", "embed_dim must be positive");
  (void)hours_per_unit();
  if (!(clock_skew_tolerance_h >= 0.0))
    raise("InvalidConfig", "clock_skew_tolerance_h must be >= 0");
  if (!(ptr_eta >= 0.0)) raise("InvalidConfig", "ptr_eta must be >= 0");
  if (!(ptr_lr > 0.0) || !(pla_lr > 0.0))
    raise("InvalidConfig", "learning rates must be positive");
  if (ptr_epochs == 0 || pla_epochs == 0)
    raise("InvalidConfig", "epoch counts must be positive");
  if (!(pla_mu >= 0.0) || !(pla_mu_td >= 0.0))
    raise("InvalidConfig", "pla_mu and pla_mu_td must be >= 0");
  act_from_name(pla_output_activation);
  if (pla_output_activation == "identity")
    raise("InvalidConfig", "pla output activation must keep G non-negative");
  if (cv_folds < 2) raise("InvalidConfig", "cv_folds must be >= 2");
  if (eval_top_k == 0) raise("InvalidConfig", "eval_top_k must be positive");
  sim.validate();
}

}  // namespace pla
