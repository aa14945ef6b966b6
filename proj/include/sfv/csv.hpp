#pragma once

#include "sfv/partition.hpp"
#include "sfv/uq.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sfv {

/// Shortest decimal form that parses back to the identical double.
std::string format_real(Real value);

Real parse_real(const std::string& text);

/// One CSV artifact: `# key: value` comment lines, a header row, data rows.
struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::string header;
  std::vector<std::string> rows;
};

/// Writes with '\n' terminators; throws std::runtime_error naming the path
/// on I/O failure.
void write_csv(const CsvDocument& doc, const std::filesystem::path& path);

CsvDocument samples_csv(const SampleSet& samples);
CsvDocument partition_csv(const Partition& partition);
CsvDocument cluster_stats_csv(const ClusterStats& stats);
CsvDocument estimates_csv(const std::vector<UqEstimate>& estimates);
CsvDocument convergence_csv(const ConvergenceRecord& record);

/// Reads a samples.csv written by samples_csv; values round-trip exactly.
/// The seed is recovered from the `# seed:` comment when present.
SampleSet read_sample_set_csv(const std::filesystem::path& path);

}  // namespace sfv
