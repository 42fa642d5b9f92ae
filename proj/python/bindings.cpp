#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pla/config.hpp"
#include "pla/embed.hpp"
#include "pla/error.hpp"
#include "pla/kernel.hpp"
#include "pla/pipeline.hpp"
#include "pla/pla_model.hpp"
#include "pla/simgen.hpp"
#include "pla/trajectory.hpp"

namespace py = pybind11;

namespace {

pla::KernelParams make_params(std::size_t p, double decay, bool char_level,
                              char separator) {
  pla::KernelParams params;
  params.max_subseq_len = p;
  params.decay = decay;
  params.char_level = char_level;
  params.field_separator = separator;
  return params;
}

py::dict method_dict(const pla::MethodEval& ev) {
  py::dict d;
  d["method"] = ev.method;
  py::list folds;
  for (const auto& r : ev.fold_r)
    folds.append(r ? py::object(py::float_(*r)) : py::object(py::none()));
  d["fold_r"] = folds;
  d["pooled_r"] = ev.pooled_r ? py::object(py::float_(*ev.pooled_r))
                              : py::object(py::none());
  d["degenerate"] = ev.degenerate;
  if (ev.has_attribution) {
    d["top_k_recall"] = ev.attribution.top_k_recall;
    d["mean_spearman"] = ev.attribution.mean_spearman;
    d["curve_rmse"] = ev.attribution.curve_rmse;
    d["top1_hit_fraction"] = ev.attribution.top1_hit_fraction;
  }
  return d;
}

pla::PipelineConfig config_of(const std::string& text) {
  return text.empty() ? pla::PipelineConfig{} : pla::PipelineConfig::from_text(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "potential loss analysis: process embedding, trajectory regression "
            "and non-negative defect attribution";

  py::register_exception<pla::Error>(m, "PlaError");

  m.def(
      "subseq_kernel",
      [](const std::string& s, const std::string& t, std::size_t p, double decay,
         bool char_level, char separator) {
        return pla::subseq_kernel(s, t, make_params(p, decay, char_level, separator));
      },
      py::arg("s"), py::arg("t"), py::arg("p") = 3, py::arg("decay") = 0.5,
      py::arg("char_level") = true, py::arg("separator") = '|',
      "gap-weighted subsequence kernel of exact length p");

  m.def(
      "subseq_kernel_sum",
      [](const std::string& s, const std::string& t, std::size_t p, double decay,
         bool char_level, char separator) {
        return pla::subseq_kernel_sum(s, t,
                                      make_params(p, decay, char_level, separator));
      },
      py::arg("s"), py::arg("t"), py::arg("p") = 3, py::arg("decay") = 0.5,
      py::arg("char_level") = true, py::arg("separator") = '|',
      "subsequence kernel summed over lengths 1..p (the matrix variant)");

  m.def(
      "embed_tokens",
      [](const std::vector<std::string>& tokens, std::size_t dim, std::size_t p,
         double decay, bool normalize, bool char_level, char separator) {
        pla::Vocabulary vocab;
        for (const auto& t : tokens) vocab.add(pla::Token{t});
        if (vocab.size() != tokens.size())
          pla::raise("InvalidConfig", "duplicate tokens in embedding request");
        const auto kernel = pla::kernel_matrix(
            vocab, make_params(p, decay, char_level, separator), normalize);
        const auto table = pla::spectral_embed(kernel, dim);
        std::vector<std::vector<double>> rows(vocab.size());
        for (std::size_t i = 0; i < vocab.size(); ++i) {
          rows[i].assign(table.vectors.row(i).begin(), table.vectors.row(i).end());
        }
        return py::make_tuple(rows, table.eigenvalues);
      },
      py::arg("tokens"), py::arg("dim"), py::arg("p") = 3, py::arg("decay") = 0.5,
      py::arg("normalize") = true, py::arg("char_level") = true,
      py::arg("separator") = '|',
      "kernel-matrix spectral embedding; returns (vectors, eigenvalues)");

  m.def("psi", &pla::psi, py::arg("t_h"), py::arg("t_prev_h"),
        py::arg("hours_per_unit") = 1.0,
        "temporal weight log10(1 + max(0, dt))");

  m.def("default_config", [] { return pla::PipelineConfig{}.canonical_text(); },
        "canonical text of the default pipeline configuration");

  m.def(
      "config_hash",
      [](const std::string& text) { return config_of(text).hash(); },
      py::arg("config_text") = std::string(),
      "hash embedded in every output file");

  m.def(
      "simulate",
      [](const std::string& config_text, const std::filesystem::path& out_dir) {
        pla::cmd_simulate(config_of(config_text), out_dir);
      },
      py::arg("config_text") = std::string(), py::arg("out_dir"));

  m.def(
      "embed",
      [](const std::string& config_text, const std::filesystem::path& out_dir) {
        pla::cmd_embed(config_of(config_text), out_dir);
      },
      py::arg("config_text") = std::string(), py::arg("out_dir"));

  m.def(
      "train",
      [](const std::string& method, const std::string& config_text,
         const std::filesystem::path& out_dir) {
        pla::cmd_train(method, config_of(config_text), out_dir);
      },
      py::arg("method"), py::arg("config_text") = std::string(), py::arg("out_dir"));

  m.def(
      "attribute",
      [](const std::string& method, const std::string& config_text,
         const std::filesystem::path& out_dir) {
        pla::cmd_attribute(method, config_of(config_text), out_dir);
      },
      py::arg("method"), py::arg("config_text") = std::string(), py::arg("out_dir"));

  m.def(
      "evaluate",
      [](const std::string& config_text, const std::filesystem::path& out_dir) {
        const pla::EvalReport report = pla::cmd_evaluate(config_of(config_text), out_dir);
        py::dict d;
        d["config_hash"] = report.config_hash;
        d["n_wafers"] = report.n_wafers;
        d["folds"] = report.folds;
        d["ptr"] = method_dict(report.ptr_eval);
        d["pla"] = method_dict(report.pla_eval);
        d["runtime_seconds"] = report.runtime_seconds;
        return d;
      },
      py::arg("config_text") = std::string(), py::arg("out_dir"));

#ifdef VERSION_INFO
#define PLAKIT_STR_(x) #x
#define PLAKIT_STR(x) PLAKIT_STR_(x)
  m.attr("__version__") = PLAKIT_STR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
