#include "pla/csv.hpp"

#include <fstream>
#include <set>

#include "pla/error.hpp"
#include "pla/format.hpp"

namespace pla {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void check_field(const std::string& field) {
  if (field.find(',') != std::string::npos || field.find('\n') != std::string::npos)
    raise("CsvSchemaError", "field '" + field + "' contains a separator character");
}

constexpr const char* kHashPrefix = "# config_hash=";

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kHashPrefix, 0) == 0) {
      table.config_hash = line.substr(std::string(kHashPrefix).size());
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty()) continue;
    if (!have_header) {
      table.header = split_row(line);
      have_header = true;
    } else {
      auto row = split_row(line);
      if (row.size() != table.header.size())
        raise("CsvSchemaError", path.string() + " row " + std::to_string(lineno) +
                                    ": expected " + std::to_string(table.header.size()) +
                                    " fields, got " + std::to_string(row.size()));
      table.rows.push_back(std::move(row));
    }
  }
  if (!have_header) raise("CsvSchemaError", path.string() + ": missing header row");
  return table;
}

void write_csv(const std::filesystem::path& path, const std::string& config_hash,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise("IoError", "cannot write " + path.string());
  out << kHashPrefix << config_hash << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    check_field(header[i]);
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      check_field(row[i]);
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
  if (!out) raise("IoError", "short write to " + path.string());
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<ProcessRecord>& records,
                       const std::vector<std::string>& attribute_order,
                       const std::string& config_hash) {
  std::vector<std::string> header = {"wafer_id", "step_index", "timestamp_h"};
  header.insert(header.end(), attribute_order.begin(), attribute_order.end());
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const auto& rec : records) {
    std::vector<std::string> row = {rec.wafer_id, std::to_string(rec.step_index),
                                    fmt_double(rec.timestamp_h)};
    for (const auto& name : attribute_order) {
      const std::string* v = rec.find_attribute(name);
      if (v == nullptr)
        raise("MissingAttribute", "record " + rec.wafer_id + " step " +
                                      std::to_string(rec.step_index) +
                                      " lacks attribute '" + name + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, config_hash, header, rows);
}

HistoryFile read_history_csv(const std::filesystem::path& path,
                             double clock_skew_tolerance_h) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 4 || table.header[0] != "wafer_id" ||
      table.header[1] != "step_index" || table.header[2] != "timestamp_h")
    raise("CsvSchemaError",
          path.string() + ": header must start wafer_id,step_index,timestamp_h "
                          "and carry at least one attribute column");

  HistoryFile out;
  out.config_hash = table.config_hash;
  std::set<std::pair<std::string, std::size_t>> seen;
  std::unordered_map<std::string, std::size_t> last_step;
  std::unordered_map<std::string, double> last_time;

  std::size_t rowno = 1;  // header is row 1 in user terms
  for (const auto& row : table.rows) {
    ++rowno;
    const std::string where = path.string() + " row " + std::to_string(rowno);
    ProcessRecord rec;
    rec.wafer_id = row[0];
    if (rec.wafer_id.empty())
      raise("CsvSchemaError", where + ", column wafer_id: empty value");
    const long long step = parse_int(row[1], where + ", column step_index");
    if (step < 1) raise("CsvSchemaError", where + ", column step_index: must be >= 1");
    rec.step_index = static_cast<std::size_t>(step);
    rec.timestamp_h = parse_double(row[2], where + ", column timestamp_h");
    for (std::size_t c = 3; c < table.header.size(); ++c)
      rec.attributes.emplace_back(table.header[c], row[c]);

    if (!seen.emplace(rec.wafer_id, rec.step_index).second)
      raise("CsvSchemaError", where + ": duplicate (wafer_id, step_index) pair " +
                                  rec.wafer_id + "/" + std::to_string(rec.step_index));

    auto it = last_step.find(rec.wafer_id);
    if (it == last_step.end()) {
      if (rec.step_index != 1)
        raise("CsvSchemaError",
              where + ": wafer " + rec.wafer_id + " must start at step_index 1");
      out.wafer_order.push_back(rec.wafer_id);
      last_step[rec.wafer_id] = 1;
      last_time[rec.wafer_id] = rec.timestamp_h;
    } else {
      if (rec.step_index != it->second + 1)
        raise("CsvSchemaError", where + ": gap in step_index for wafer " +
                                    rec.wafer_id + " (expected " +
                                    std::to_string(it->second + 1) + ")");
      it->second = rec.step_index;
      double& prev_t = last_time[rec.wafer_id];
      if (rec.timestamp_h + clock_skew_tolerance_h < prev_t)
        raise("CsvSchemaError", where + ", column timestamp_h: decreases by more "
                                        "than the clock-skew tolerance");
      prev_t = std::max(prev_t, rec.timestamp_h);
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) raise("CsvSchemaError", path.string() + ": no data rows");
  return out;
}

void write_outcomes_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& wafer_ids,
                        const std::vector<double>& outcomes,
                        const std::string& config_hash) {
  if (wafer_ids.size() != outcomes.size())
    raise("ShapeMismatch", "wafer id / outcome count mismatch");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < wafer_ids.size(); ++i)
    rows.push_back({wafer_ids[i], fmt_double(outcomes[i])});
  write_csv(path, config_hash, {"wafer_id", "log_defect_density"}, rows);
}

OutcomesFile read_outcomes_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"wafer_id", "log_defect_density"})
    raise("CsvSchemaError", path.string() + ": expected header wafer_id,log_defect_density");
  OutcomesFile out;
  out.config_hash = table.config_hash;
  std::size_t rowno = 1;
  for (const auto& row : table.rows) {
    ++rowno;
    const std::string where = path.string() + " row " + std::to_string(rowno);
    if (!out.by_wafer
             .emplace(row[0], parse_double(row[1], where + ", column log_defect_density"))
             .second)
      raise("CsvSchemaError", where + ": duplicate wafer_id " + row[0]);
  }
  return out;
}

void write_ground_truth_csv(const std::filesystem::path& path,
                            const GroundTruth& truth, const std::string& config_hash) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& w : truth.wafers)
    for (std::size_t k = 0; k < w.gamma.size(); ++k)
      rows.push_back({w.wafer_id, std::to_string(k + 1), fmt_double(w.gamma[k])});
  write_csv(path, config_hash, {"wafer_id", "step_index", "gamma"}, rows);
}

void write_planted_steps_csv(const std::filesystem::path& path,
                             const GroundTruth& truth, const std::string& config_hash) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& w : truth.wafers)
    for (std::size_t k = 0; k < w.planted.size(); ++k)
      if (w.planted[k]) rows.push_back({w.wafer_id, std::to_string(k + 1)});
  write_csv(path, config_hash, {"wafer_id", "step_index"}, rows);
}

GroundTruthFile read_ground_truth_csv(
    const std::filesystem::path& gamma_path,
    const std::optional<std::filesystem::path>& planted_path) {
  const CsvTable table = read_csv(gamma_path);
  if (table.header != std::vector<std::string>{"wafer_id", "step_index", "gamma"})
    raise("CsvSchemaError",
          gamma_path.string() + ": expected header wafer_id,step_index,gamma");

  GroundTruthFile out;
  out.config_hash = table.config_hash;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t rowno = 1;
  for (const auto& row : table.rows) {
    ++rowno;
    const std::string where = gamma_path.string() + " row " + std::to_string(rowno);
    const long long step = parse_int(row[1], where + ", column step_index");
    auto [it, fresh] = index.emplace(row[0], out.truth.wafers.size());
    if (fresh) {
      WaferTruth w;
      w.wafer_id = row[0];
      out.truth.wafers.push_back(std::move(w));
    }
    WaferTruth& w = out.truth.wafers[it->second];
    if (step != static_cast<long long>(w.gamma.size()) + 1)
      raise("CsvSchemaError", where + ": step_index out of order for wafer " + row[0]);
    w.gamma.push_back(parse_double(row[2], where + ", column gamma"));
    w.planted.push_back(false);
  }

  if (planted_path && std::filesystem::exists(*planted_path)) {
    const CsvTable flags = read_csv(*planted_path);
    if (flags.header != std::vector<std::string>{"wafer_id", "step_index"})
      raise("CsvSchemaError",
            planted_path->string() + ": expected header wafer_id,step_index");
    rowno = 1;
    for (const auto& row : flags.rows) {
      ++rowno;
      const std::string where = planted_path->string() + " row " + std::to_string(rowno);
      auto it = index.find(row[0]);
      if (it == index.end())
        raise("CsvSchemaError", where + ": unknown wafer_id " + row[0]);
      WaferTruth& w = out.truth.wafers[it->second];
      const long long step = parse_int(row[1], where + ", column step_index");
      if (step < 1 || step > static_cast<long long>(w.planted.size()))
        raise("CsvSchemaError", where + ": step_index out of range");
      w.planted[static_cast<std::size_t>(step - 1)] = true;
    }
  }
  return out;
}

void write_embeddings_csv(const std::filesystem::path& path, const Vocabulary& vocab,
                          const EmbeddingTable& table, const std::string& config_hash) {
  std::vector<std::string> header = {"token"};
  for (std::size_t k = 1; k <= table.dimension; ++k)
    header.push_back("x_" + std::to_string(k));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    std::vector<std::string> row = {vocab.token(i).text};
    for (std::size_t k = 0; k < table.dimension; ++k)
      row.push_back(fmt_double17(table.vectors(i, k)));
    rows.push_back(std::move(row));
  }
  write_csv(path, config_hash, header, rows);
}

void write_eigenvalues_csv(const std::filesystem::path& path,
                           const EmbeddingTable& table, const std::string& config_hash) {
  std::vector<std::vector<std::string>> rows;
  const double total = table.total_positive_energy;
  for (std::size_t k = 0; k < table.eigenvalues.size(); ++k) {
    const double lam = table.eigenvalues[k];
    rows.push_back({std::to_string(k + 1), fmt_double17(lam),
                    fmt_double17(total > 0.0 ? lam / total : 0.0)});
  }
  write_csv(path, config_hash, {"k", "lambda", "energy_ratio"}, rows);
}

EmbeddingsFile read_embeddings_csv(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& eigenvalues_path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.header[0] != "token")
    raise("CsvSchemaError", path.string() + ": expected header token,x_1,...");
  const std::size_t dim = table.header.size() - 1;

  EmbeddingsFile out;
  out.config_hash = table.config_hash;
  out.table.dimension = dim;
  out.table.vectors = Matrix(table.rows.size(), dim);
  out.table.eigenvalues.assign(dim, 0.0);
  std::size_t rowno = 1;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    ++rowno;
    const auto& row = table.rows[i];
    const std::string where = path.string() + " row " + std::to_string(rowno);
    if (out.vocab.add(Token{row[0]}) != i)
      raise("CsvSchemaError", where + ": duplicate token '" + row[0] + "'");
    for (std::size_t k = 0; k < dim; ++k)
      out.table.vectors(i, k) =
          parse_double(row[k + 1], where + ", column x_" + std::to_string(k + 1));
  }

  if (eigenvalues_path && std::filesystem::exists(*eigenvalues_path)) {
    const CsvTable eig = read_csv(*eigenvalues_path);
    if (eig.header != std::vector<std::string>{"k", "lambda", "energy_ratio"})
      raise("CsvSchemaError",
            eigenvalues_path->string() + ": expected header k,lambda,energy_ratio");
    for (const auto& row : eig.rows) {
      const long long k = parse_int(row[0], eigenvalues_path->string() + " column k");
      if (k >= 1 && static_cast<std::size_t>(k) <= dim)
        out.table.eigenvalues[static_cast<std::size_t>(k - 1)] =
            parse_double(row[1], eigenvalues_path->string() + " column lambda");
    }
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::string& column,
                     const std::vector<double>& values, const std::string& config_hash) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < values.size(); ++i)
    rows.push_back({std::to_string(i), fmt_double(values[i])});
  write_csv(path, config_hash, {"epoch", column}, rows);
}

}  // namespace pla
