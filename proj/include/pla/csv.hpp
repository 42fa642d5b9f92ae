#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pla/config.hpp"
#include "pla/embed.hpp"
#include "pla/simgen.hpp"
#include "pla/tokenize.hpp"

namespace pla {

// Minimal unquoted CSV with a leading "# config_hash=<hex>" comment line.
// Fields must not contain commas or newlines; writers enforce this so a
// write -> read -> write round trip is byte-identical.
struct CsvTable {
  std::string config_hash;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::string& config_hash,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// ---- domain files -------------------------------------------------------

// history.csv: wafer_id,step_index,timestamp_h,<attribute columns...>
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<ProcessRecord>& records,
                       const std::vector<std::string>& attribute_order,
                       const std::string& config_hash);

struct HistoryFile {
  std::vector<ProcessRecord> records;  // grouped by wafer, steps ascending
  std::vector<std::string> wafer_order;
  std::string config_hash;
};

// Validates on load: contiguous 1-based step_index per wafer, no duplicate
// (wafer_id, step_index), timestamps non-decreasing up to the clock-skew
// tolerance (small dips are clamped later, larger ones are schema errors).
HistoryFile read_history_csv(const std::filesystem::path& path,
                             double clock_skew_tolerance_h);

void write_outcomes_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& wafer_ids,
                        const std::vector<double>& outcomes,
                        const std::string& config_hash);

struct OutcomesFile {
  std::unordered_map<std::string, double> by_wafer;
  std::string config_hash;
};
OutcomesFile read_outcomes_csv(const std::filesystem::path& path);

void write_ground_truth_csv(const std::filesystem::path& path,
                            const GroundTruth& truth,
                            const std::string& config_hash);
void write_planted_steps_csv(const std::filesystem::path& path,
                             const GroundTruth& truth,
                             const std::string& config_hash);

struct GroundTruthFile {
  GroundTruth truth;  // base filled by the caller (not part of the csv)
  std::string config_hash;
};
// Reads gamma (and, when planted_path exists, the planted-step flags).
GroundTruthFile read_ground_truth_csv(
    const std::filesystem::path& gamma_path,
    const std::optional<std::filesystem::path>& planted_path);

void write_embeddings_csv(const std::filesystem::path& path, const Vocabulary& vocab,
                          const EmbeddingTable& table, const std::string& config_hash);
void write_eigenvalues_csv(const std::filesystem::path& path,
                           const EmbeddingTable& table, const std::string& config_hash);

struct EmbeddingsFile {
  Vocabulary vocab;  // row order defines token ids
  EmbeddingTable table;
  std::string config_hash;
};
EmbeddingsFile read_embeddings_csv(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& eigenvalues_path);

void write_trace_csv(const std::filesystem::path& path, const std::string& column,
                     const std::vector<double>& values, const std::string& config_hash);

}  // namespace pla
