// Command-line front end: sampling, partitioning, UQ runs and convergence
// studies over the shipped Darcy-flow cases, with seeded, reproducible CSV
// artifacts.

#include "sfv/case_config.hpp"
#include "sfv/csv.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

namespace {

namespace fs = std::filesystem;
using namespace sfv;

struct CommonArgs {
  std::string case_path;
  std::string samples_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int n = 0;
  int jobs = 0;
  double pi_override = 0;
  double thickness_override = 0;
  bool swept_include_porosity = false;
  bool paper_literal = false;

  bool has_pi = false;
  bool has_thickness = false;
  bool has_swept = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_samples) {
  cmd->add_option("--case", args.case_path, "case configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "RNG seed")->default_val(0);
  cmd->add_option("--out", args.out_dir, "output directory")->default_val(".");
  cmd->add_option("--jobs", args.jobs,
                  "worker threads (default: SFV_UQ_JOBS or hardware)")
      ->envname("SFV_UQ_JOBS")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--pi", args.pi_override, "override every well's PI")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--thickness", args.thickness_override,
                  "override the grid thickness h (m)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--swept-include-porosity", args.swept_include_porosity,
                "multiply swept volume by porosity");
  cmd->add_flag("--paper-literal-estimator", args.paper_literal,
                "keep the 1/N_c prefactor in the SFV moments");
  if (needs_samples)
    cmd->add_option("--samples", args.samples_path,
                    "reuse a frozen samples.csv instead of drawing")
        ->check(CLI::ExistingFile);
}

int resolve_jobs(const CommonArgs& args) {
  if (args.jobs > 0) return args.jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

CaseOverrides overrides_of(const CommonArgs& args) {
  CaseOverrides o;
  if (args.has_pi) o.pi = args.pi_override;
  if (args.has_thickness) o.thickness = args.thickness_override;
  if (args.has_swept) o.swept_include_porosity = true;
  return o;
}

// Reproducibility metadata embedded at the top of every artifact. Worker
// count is deliberately absent: results do not depend on it.
std::vector<std::pair<std::string, std::string>> run_metadata(
    const CommonArgs& args, const CaseSpec& spec) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("case", spec.name);
  meta.emplace_back("case_hash", case_fingerprint(args.case_path));
  meta.emplace_back("seed", std::to_string(args.seed));
  if (args.n > 0) meta.emplace_back("n", std::to_string(args.n));
  if (!args.samples_path.empty())
    meta.emplace_back("frozen_samples", fs::path(args.samples_path).filename());
  meta.emplace_back("pi_override",
                    args.has_pi ? format_real(args.pi_override) : "none");
  meta.emplace_back("thickness_override",
                    args.has_thickness ? format_real(args.thickness_override)
                                       : "none");
  meta.emplace_back("swept_include_porosity",
                    args.has_swept || args.swept_include_porosity ? "1" : "0");
  meta.emplace_back("paper_literal_estimator", args.paper_literal ? "1" : "0");
  return meta;
}

SampleSet obtain_samples(const CommonArgs& args, const CaseSpec& spec) {
  if (!args.samples_path.empty()) {
    SampleSet set = read_sample_set_csv(args.samples_path);
    if (set.dim() != static_cast<int>(spec.components.size()))
      throw std::runtime_error("frozen samples have " +
                               std::to_string(set.dim()) +
                               " columns, case expects " +
                               std::to_string(spec.components.size()));
    set.spec = spec.components;
    return set;
  }
  if (args.n < 1)
    throw CLI::ValidationError("--n", "need a positive sample count");
  return draw_sample_set(spec.components, args.n, args.seed);
}

fs::path prepare_out(const CommonArgs& args) {
  fs::path dir(args.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

std::string join_strings(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out += (i ? "," : "") + values[i];
  return out;
}

void emit(const CsvDocument& body, const CommonArgs& args,
          const CaseSpec& spec,
          const std::vector<std::pair<std::string, std::string>>& extra,
          const fs::path& path) {
  CsvDocument doc = body;
  auto meta = run_metadata(args, spec);
  meta.insert(meta.end(), extra.begin(), extra.end());
  meta.insert(meta.end(), doc.metadata.begin(), doc.metadata.end());
  doc.metadata.clear();
  for (auto& kv : meta) {  // first occurrence of a key wins
    bool seen = false;
    for (const auto& have : doc.metadata) seen = seen || have.first == kv.first;
    if (!seen) doc.metadata.push_back(std::move(kv));
  }
  write_csv(doc, path);
  std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finite-volume Darcy flow simulation with Monte Carlo and cluster-SFV "
      "forward uncertainty quantification"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<int> budgets;
  std::vector<std::string> method_names{"mc", "sfv-kmeans"};
  std::vector<int> bins;
  int clusters = 0;
  int budget = 0;
  std::string partition_method = "kmeans";
  std::string kmeans_init = "kmeans++";

  CLI::App* sample = app.add_subcommand("sample", "draw and export a sample set");
  add_common(sample, args, false);
  sample->add_option("--n", args.n, "number of samples")
      ->required()
      ->check(CLI::PositiveNumber);

  CLI::App* partition =
      app.add_subcommand("partition", "cluster samples into parameter cells");
  add_common(partition, args, true);
  partition->add_option("--n", args.n, "samples to draw when none are frozen")
      ->check(CLI::PositiveNumber);
  partition->add_option("--clusters", clusters, "k-means cluster count")
      ->check(CLI::PositiveNumber);
  partition->add_option("--bins", bins, "tensor bins per dimension")
      ->delimiter(',');
  partition->add_option("--method", partition_method, "kmeans or tensor")
      ->check(CLI::IsMember({"kmeans", "tensor"}));
  partition->add_option("--kmeans-init", kmeans_init, "centre seeding rule")
      ->check(CLI::IsMember({"kmeans++", "random"}));

  CLI::App* run_mc = app.add_subcommand("run-mc", "Monte Carlo estimate");
  add_common(run_mc, args, true);
  run_mc->add_option("--budget", budget, "forward simulations to spend")
      ->required()
      ->check(CLI::PositiveNumber);
  run_mc->add_option("--n", args.n, "sample pool size (default: budget)")
      ->check(CLI::PositiveNumber);

  CLI::App* run_sfv = app.add_subcommand("run-sfv", "cluster-SFV estimate");
  add_common(run_sfv, args, true);
  run_sfv->add_option("--clusters", clusters, "parameter cells to build")
      ->required()
      ->check(CLI::PositiveNumber);
  run_sfv->add_option("--n", args.n, "base sample count")
      ->check(CLI::PositiveNumber);
  run_sfv->add_option("--method", partition_method, "kmeans or tensor")
      ->check(CLI::IsMember({"kmeans", "tensor"}));
  run_sfv->add_option("--kmeans-init", kmeans_init, "centre seeding rule")
      ->check(CLI::IsMember({"kmeans++", "random"}));

  CLI::App* converge =
      app.add_subcommand("converge", "error decay versus the MC reference");
  add_common(converge, args, true);
  converge->add_option("--n", args.n, "base sample count")
      ->check(CLI::PositiveNumber);
  converge->add_option("--budgets", budgets, "increasing budget list")
      ->required()
      ->delimiter(',');
  converge->add_option("--methods", method_names, "subset of mc,sfv-kmeans,sfv-tensor")
      ->delimiter(',');
  converge->add_option("--kmeans-init", kmeans_init, "centre seeding rule")
      ->check(CLI::IsMember({"kmeans++", "random"}));

  CLI::App* case_info =
      app.add_subcommand("case-info", "print the resolved case");
  add_common(case_info, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  args.has_pi = app.get_subcommands().front()->count("--pi") > 0;
  args.has_thickness =
      app.get_subcommands().front()->count("--thickness") > 0;
  args.has_swept =
      app.get_subcommands().front()->count("--swept-include-porosity") > 0;

  try {
    const CaseSpec spec = load_case(args.case_path, overrides_of(args));
    StudyOptions options;
    options.jobs = resolve_jobs(args);
    options.paper_literal = args.paper_literal;
    options.kmeans_init =
        kmeans_init == "random" ? KMeansInit::Random : KMeansInit::PlusPlus;

    if (sample->parsed()) {
      const SampleSet set = draw_sample_set(spec.components, args.n, args.seed);
      emit(samples_csv(set), args, spec, {},
           prepare_out(args) / "samples.csv");
    } else if (partition->parsed()) {
      const SampleSet set = obtain_samples(args, spec);
      Partition part;
      std::vector<std::pair<std::string, std::string>> extra;
      if (partition_method == "kmeans") {
        if (clusters < 1)
          throw CLI::ValidationError("--clusters",
                                     "k-means needs a cluster count");
        part = kmeans_partition(set, clusters, args.seed, 300, nullptr,
                                options.kmeans_init);
        extra = {{"clusters", std::to_string(clusters)},
                 {"kmeans_init", kmeans_init}};
      } else {
        if (bins.empty())
          throw CLI::ValidationError("--bins",
                                     "tensor partition needs bin counts");
        part = tensor_partition(set, bins);
        extra = {{"bins", join_ints(bins)}};
      }
      const fs::path dir = prepare_out(args);
      emit(partition_csv(part), args, spec, extra, dir / "partition.csv");
      emit(cluster_stats_csv(compute_cluster_stats(part, set)), args, spec,
           extra, dir / "cluster_stats.csv");
    } else if (run_mc->parsed()) {
      if (args.n == 0) args.n = budget;
      const SampleSet set = obtain_samples(args, spec);
      const UqEstimate est =
          run_study(spec, Method::Mc, budget, set, args.seed, options);
      emit(estimates_csv({est}), args, spec,
           {{"budget", std::to_string(budget)}},
           prepare_out(args) / "estimate_mc.csv");
    } else if (run_sfv->parsed()) {
      if (args.n == 0) args.n = clusters;
      const SampleSet set = obtain_samples(args, spec);
      const Method method = partition_method == "kmeans" ? Method::SfvKmeans
                                                         : Method::SfvTensor;
      const UqEstimate est =
          run_study(spec, method, clusters, set, args.seed, options);
      emit(estimates_csv({est}), args, spec,
           {{"clusters", std::to_string(clusters)},
            {"kmeans_init", kmeans_init}},
           prepare_out(args) / ("estimate_" + to_string(method) + ".csv"));
    } else if (converge->parsed()) {
      if (args.n == 0 && args.samples_path.empty())
        throw CLI::ValidationError("--n", "need a base sample count");
      for (std::size_t i = 1; i < budgets.size(); ++i)
        if (budgets[i] <= budgets[i - 1])
          throw CLI::ValidationError("--budgets",
                                     "budgets must be strictly increasing");
      const SampleSet set = obtain_samples(args, spec);
      std::vector<Method> methods;
      for (const auto& name : method_names) {
        const auto m = parse_method(name);
        if (!m)
          throw CLI::ValidationError("--methods", "unknown method " + name);
        methods.push_back(*m);
      }
      const auto records =
          convergence_study(spec, budgets, methods, set, args.seed, options);
      const fs::path dir = prepare_out(args);
      const std::vector<std::pair<std::string, std::string>> extra{
          {"budgets", join_ints(budgets)},
          {"methods", join_strings(method_names)},
          {"kmeans_init", kmeans_init}};
      for (const auto& rec : records)
        emit(convergence_csv(rec), args, spec, extra,
             dir / ("convergence_" + rec.method + ".csv"));
    } else if (case_info->parsed()) {
      std::cout << describe_case(spec);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
