#include "sfv/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sfv {

std::string format_real(Real value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Real parse_real(const std::string& text) {
  Real value = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("parse_real: bad number '" + text + "'");
  return value;
}

void write_csv(const CsvDocument& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const auto& [key, value] : doc.metadata)
    out << "# " << key << ": " << value << "\n";
  out << doc.header << "\n";
  for (const auto& row : doc.rows) out << row << "\n";
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvDocument samples_csv(const SampleSet& samples) {
  CsvDocument doc;
  doc.metadata.emplace_back("seed", std::to_string(samples.seed));
  doc.metadata.emplace_back("n", std::to_string(samples.size()));
  std::string header = "sample_index";
  for (int j = 1; j <= samples.dim(); ++j)
    header += ",y" + std::to_string(j);
  doc.header = std::move(header);
  doc.rows.reserve(static_cast<std::size_t>(samples.size()));
  for (int i = 0; i < samples.size(); ++i) {
    std::string row = std::to_string(i);
    for (int j = 0; j < samples.dim(); ++j)
      row += "," + format_real(samples.values(i, j));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

CsvDocument partition_csv(const Partition& partition) {
  CsvDocument doc;
  doc.metadata.emplace_back("method", partition.method);
  doc.metadata.emplace_back("n_clusters", std::to_string(partition.n_clusters));
  doc.header = "sample_index,cluster";
  doc.rows.reserve(partition.assignment.size());
  for (std::size_t i = 0; i < partition.assignment.size(); ++i)
    doc.rows.push_back(std::to_string(i) + "," +
                       std::to_string(partition.assignment[i]));
  return doc;
}

CsvDocument cluster_stats_csv(const ClusterStats& stats) {
  CsvDocument doc;
  doc.header = "cluster,m,W,s,r";
  doc.rows.reserve(stats.count.size());
  for (std::size_t j = 0; j < stats.count.size(); ++j) {
    const auto e = static_cast<Eigen::Index>(j);
    doc.rows.push_back(std::to_string(j) + "," +
                       std::to_string(stats.count[j]) + "," +
                       format_real(stats.weight[e]) + "," +
                       format_real(stats.sigma[e]) + "," +
                       format_real(stats.radius[e]));
  }
  return doc;
}

CsvDocument estimates_csv(const std::vector<UqEstimate>& estimates) {
  CsvDocument doc;
  doc.header = "method,budget,mean,variance,std,seed";
  doc.rows.reserve(estimates.size());
  for (const auto& est : estimates)
    doc.rows.push_back(est.method + "," + std::to_string(est.budget) + "," +
                       format_real(est.mean) + "," +
                       format_real(est.variance) + "," +
                       format_real(est.stddev) + "," +
                       std::to_string(est.seed));
  return doc;
}

CsvDocument convergence_csv(const ConvergenceRecord& record) {
  CsvDocument doc;
  doc.metadata.emplace_back("reference_mean", format_real(record.reference.mean));
  doc.metadata.emplace_back("reference_std", format_real(record.reference.stddev));
  doc.metadata.emplace_back("reference_budget",
                            std::to_string(record.reference.budget));
  doc.metadata.emplace_back("slope_mean_err", format_real(record.slope_mean_err));
  doc.header = "method,budget,mean_err,std_err";
  doc.rows.reserve(record.rows.size());
  for (const auto& row : record.rows)
    doc.rows.push_back(record.method + "," + std::to_string(row.budget) + "," +
                       format_real(row.mean_err) + "," +
                       format_real(row.std_err));
  return doc;
}

SampleSet read_sample_set_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  SampleSet set;
  std::string line;
  std::string header;
  std::vector<std::vector<Real>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("seed:");
      if (pos != std::string::npos)
        set.seed = std::stoull(line.substr(pos + 5));
      continue;
    }
    if (header.empty()) {
      header = line;
      continue;
    }
    std::vector<Real> row;
    std::stringstream ss(line);
    std::string field;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      if (first) {  // sample_index column
        first = false;
        continue;
      }
      row.push_back(parse_real(field));
    }
    rows.push_back(std::move(row));
  }
  if (header.empty() || rows.empty())
    throw std::runtime_error("no sample rows in " + path.string());

  const std::size_t d = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != d)
      throw std::runtime_error("ragged sample rows in " + path.string());
  set.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      set.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return set;
}

}  // namespace sfv
