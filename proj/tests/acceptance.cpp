// Acceptance suite. Runs each criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion.
//
// usage: sfv_acceptance <sfvuq-binary> <cases-dir>

#include "sfv/case_config.hpp"
#include "sfv/csv.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sfv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// 10x10 analog of the steady-state case: half-domain random permeability,
// unit pressure drop across the diagonal, QoI at the bottom-right corner.
CaseSpec case1_analog(int nx = 10) {
  CaseSpec spec;
  spec.name = "case1-analog";
  spec.kind = CaseKind::Elliptic;
  spec.grid = build_grid(nx, nx, 10, 10, 1);
  spec.layout_spec.kind = LayoutSpec::Kind::HalfSplit;
  spec.layout_spec.x_split = nx * 10 / 2.0;
  spec.layout = make_half_split_layout(spec.grid, spec.layout_spec.x_split);
  spec.components = {TruncatedNormal{15, 3, 10, 20},
                     UniformMixture{0.5, {1, 11}, {21, 31}}};
  spec.props.mu = 1.0;
  spec.bc = {{0, 1.0, {}}, {spec.grid.n_cells() - 1, 0.0, {}}};
  spec.qoi.kind = QoIKind::CellPressure;
  spec.qoi.cell = nx - 1;
  return spec;
}

CaseSpec case2_analog(int nx = 10) {
  CaseSpec spec;
  spec.name = "case2-analog";
  spec.kind = CaseKind::Parabolic;
  spec.grid = build_grid(nx, nx, 10, 10, 1);
  spec.layout_spec.kind = LayoutSpec::Kind::Channels;
  spec.layout_spec.n_channels = nx;
  spec.layout = make_channel_layout(spec.grid, nx);
  for (int i = 1; i <= nx; ++i) {
    const Real base = static_cast<Real>(i + 1);
    spec.components.push_back(
        UniformMixture{0.5, {base, 5 * base}, {10 * base, 15 * base}});
  }
  spec.props.porosity = 0.1;
  spec.props.c_t = 5e-8;
  spec.props.mu = 0.002;
  spec.initial_pressure = 3e7;
  spec.wells = {{0, 2e7, {}}};
  spec.dt = 1e5;
  spec.n_steps = 120;
  spec.qoi.kind = QoIKind::AccumulatedProduction;
  return spec;
}

CaseSpec case3_analog(int nx = 10, int n_steps = 200) {
  CaseSpec spec;
  spec.name = "case3-analog";
  spec.kind = CaseKind::TwoPhase;
  spec.grid = build_grid(nx, nx, 10, 10, 1);
  spec.layout_spec.kind = LayoutSpec::Kind::Channels;
  spec.layout_spec.n_channels = nx;
  spec.layout = make_channel_layout(spec.grid, nx);
  for (int i = 1; i <= nx; ++i) {
    const Real base = static_cast<Real>(i + 1);
    spec.components.push_back(
        UniformMixture{0.5, {base, 2 * base}, {3 * base, 6 * base}});
  }
  spec.props.porosity = 0.2;
  spec.props.mu_w = 1e-3;
  spec.props.mu_n = 1.8e-3;
  spec.props.s_iw = 0.2;
  spec.initial_pressure = 2.6e7;
  spec.bc = {{spec.grid.n_cells() - 1, 3e7, 1.0}, {0, 2.6e7, {}}};
  spec.dt = 28800;  // 8 h keeps the explicit saturation update under CFL
  spec.n_steps = n_steps;
  spec.qoi.kind = QoIKind::SweptVolume;
  spec.qoi.s_iw = 0.2;
  return spec;
}

double simpson(double a, double b, int intervals,
               const std::function<double(double)>& f) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<unreadable " + p.string() + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail,
            double secs) {
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL",
              id, name, detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void guarded(int id, const char* name,
             const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  report(id, name, pass, detail, seconds_since(start));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: sfv_acceptance <sfvuq-binary> <cases-dir>\n");
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path cases_dir = argv[2];

  StudyOptions jobs2;
  jobs2.jobs = 2;

  // 1. Singleton-cluster oracle: N_y = N reproduces exhaustive MC.
  guarded(1, "singleton-cluster oracle", [&] {
    const auto start = Clock::now();
    const CaseSpec spec = case1_analog(10);
    const SampleSet samples = draw_sample_set(spec.components, 64, 20240601);
    const UqEstimate mc =
        run_study(spec, Method::Mc, 64, samples, 20240601, jobs2);
    const UqEstimate sfv =
        run_study(spec, Method::SfvKmeans, 64, samples, 20240601, jobs2);
    const double mean_rel = std::abs(sfv.mean - mc.mean) / std::abs(mc.mean);
    const double var_rel =
        std::abs(sfv.variance - 63.0 / 64.0 * mc.variance) / mc.variance;
    const bool in_time = seconds_since(start) < 5.0;
    return std::make_pair(
        mean_rel <= 1e-12 && var_rel <= 1e-12 && in_time,
        "mean rel diff " + fmt(mean_rel) + ", variance rel diff " +
            fmt(var_rel) + " (tol 1e-12)");
  });

  // 2 + 3 share the five seeded convergence studies.
  std::vector<double> slopes_mc, slopes_kmeans;
  int kmeans_wins = 0;
  bool studies_ok = false;
  double study_secs = 0;
  {
    const auto start = Clock::now();
    try {
      const CaseSpec spec = case1_analog(10);
      const std::vector<int> budgets{4, 8, 16, 32, 64, 128, 256};
      for (std::uint64_t s = 0; s < 5; ++s) {
        const std::uint64_t seed = 3000 + s;
        const SampleSet samples =
            draw_sample_set(spec.components, 4096, seed);
        const auto records = convergence_study(
            spec, budgets, {Method::Mc, Method::SfvKmeans, Method::SfvTensor},
            samples, seed, jobs2);
        slopes_mc.push_back(records[0].slope_mean_err);
        slopes_kmeans.push_back(records[1].slope_mean_err);
        kmeans_wins +=
            records[1].rows.back().mean_err <= records[2].rows.back().mean_err;
      }
      studies_ok = true;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "convergence studies failed: %s\n", e.what());
    }
    study_secs = seconds_since(start);
  }

  {
    double mc_avg = 0, kmeans_avg = 0;
    for (double v : slopes_mc) mc_avg += v;
    for (double v : slopes_kmeans) kmeans_avg += v;
    if (!slopes_mc.empty()) mc_avg /= static_cast<double>(slopes_mc.size());
    if (!slopes_kmeans.empty())
      kmeans_avg /= static_cast<double>(slopes_kmeans.size());
    const bool pass = studies_ok && kmeans_avg <= -0.7 && mc_avg <= -0.3 &&
                      mc_avg >= -0.7 && study_secs < 180.0;
    report(2, "convergence-rate reproduction", pass,
           "avg slopes: sfv-kmeans " + fmt(kmeans_avg) +
               " (need <= -0.7), mc " + fmt(mc_avg) + " (need in [-0.7,-0.3])",
           study_secs);
    report(3, "kmeans vs tensor ordering", studies_ok && kmeans_wins >= 4,
           "sfv-kmeans error <= sfv-tensor error at budget 256 in " +
               std::to_string(kmeans_wins) + "/5 seeds (need >= 4)",
           0.0);
  }

  // 4. Discrete maximum principle over 200 realizations of the real case 1.
  guarded(4, "elliptic maximum principle", [&] {
    const CaseSpec spec = load_case(cases_dir / "case1.json");
    const SampleSet samples = draw_sample_set(spec.components, 200, 99);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < samples.size(); ++i) {
      const CaseCoefficients coef = assemble_sample_coefficients(
          spec, samples.values.row(i).transpose());
      const Vector p = solve_elliptic(spec.grid, coef.face_trans, spec.bc);
      lo = std::min(lo, p.minCoeff());
      hi = std::max(hi, p.maxCoeff());
    }
    return std::make_pair(lo >= -1e-10 && hi <= 1 + 1e-10,
                          "pressure range [" + fmt(lo) + ", " + fmt(hi) +
                              "] within [0,1] +- 1e-10");
  });

  // 5. Implicit-step closed form and global mass balance.
  guarded(5, "parabolic conservation and closed form", [&] {
    const auto start = Clock::now();
    double max_rel_closed = 0;
    {
      const Grid2D g = build_grid(1, 1, 10, 10, 1);
      const Real a = g.cell_volume * 0.1 * 5e-8 / 1e5;
      const WellSpec well{0, 3e-11, 2e7};
      SimState s;
      s.pressure = Vector::Constant(1, 3e7);
      Real expected = 3e7;
      for (int step = 0; step < 120; ++step) {
        s = step_parabolic(s, g, Vector(0), Vector::Constant(1, a), {well},
                           1e5);
        expected = (a * expected + well.pi * well.bhp) / (a + well.pi);
        max_rel_closed = std::max(
            max_rel_closed, std::abs(s.pressure[0] - expected) / expected);
      }
    }

    double max_rel_balance = 0;
    {
      const CaseSpec spec = case2_analog(10);
      Vector sample(spec.layout.n_components);
      for (int j = 0; j < sample.size(); ++j) sample[j] = 12.0 * (j + 1);
      const CaseCoefficients coef =
          assemble_sample_coefficients(spec, sample);
      const Vector accum = spec.grid.cell_volume * coef.cell_phi_ct / spec.dt;
      const std::vector<WellSpec> wells{
          {spec.wells[0].cell, coef.well_pi[0], spec.wells[0].bhp}};
      SimState s;
      s.pressure = Vector::Constant(spec.grid.n_cells(), 3e7);
      for (int step = 0; step < spec.n_steps; ++step) {
        const SimState next = step_parabolic(s, spec.grid, coef.face_trans,
                                             accum, wells, spec.dt);
        const Real stored =
            (accum.array() * (next.pressure - s.pressure).array()).sum();
        const Real injected =
            wells[0].pi * (wells[0].bhp - next.pressure[wells[0].cell]);
        max_rel_balance =
            std::max(max_rel_balance,
                     std::abs(stored - injected) / std::abs(injected));
        s = next;
      }
    }
    const bool in_time = seconds_since(start) < 10.0;
    return std::make_pair(
        max_rel_closed <= 1e-12 && max_rel_balance <= 1e-8 && in_time,
        "closed-form rel err " + fmt(max_rel_closed) +
            " (tol 1e-12), balance rel err " + fmt(max_rel_balance) +
            " (tol 1e-8)");
  });

  // 6. Two-phase invariants under the CFL limit.
  guarded(6, "two-phase invariants", [&] {
    const auto start = Clock::now();
    const CaseSpec spec = case3_analog(10, 200);
    Vector sample(spec.layout.n_components);
    for (int j = 0; j < sample.size(); ++j)
      sample[j] = 4.0 * (j + 2);  // the upper mixture branch: fast sweep
    const CaseCoefficients coef = assemble_sample_coefficients(spec, sample);

    SimState s;
    s.pressure = Vector::Constant(spec.grid.n_cells(), spec.initial_pressure);
    for (const auto& d : spec.bc) s.pressure[d.cell] = d.pressure;
    s.saturation_w = Vector::Constant(spec.grid.n_cells(), spec.props.s_iw);

    double sat_lo = 1e300, sat_hi = -1e300, max_imbalance = 0;
    bool monotone = true, under_cfl = true;
    Real prev_swept = 0;
    ImpesReport rep;
    for (int step = 0; step < spec.n_steps; ++step) {
      s = impes_step(s, spec.grid, coef.face_trans, spec.props, spec.bc,
                     spec.dt, &rep, spec.cfl_limit);
      sat_lo = std::min(sat_lo, rep.pre_clamp_min);
      sat_hi = std::max(sat_hi, rep.pre_clamp_max);
      under_cfl = under_cfl && !rep.cfl_violated;
      Real in = 0, out = 0;
      for (Real r : rep.boundary_rates) (r > 0 ? in : out) += r;
      max_imbalance =
          std::max(max_imbalance, std::abs(in + out) / std::max(in, -out));
      const Real swept =
          (s.saturation_w.array() - spec.props.s_iw).sum() *
          spec.grid.cell_volume;
      monotone = monotone && swept >= prev_swept - 1e-9;
      prev_swept = swept;
    }
    const bool bounds_ok =
        sat_lo >= spec.props.s_iw - 1e-9 && sat_hi <= 1 + 1e-9;
    const bool in_time = seconds_since(start) < 30.0;
    return std::make_pair(
        bounds_ok && monotone && under_cfl && max_imbalance <= 1e-8 && in_time,
        "saturation range [" + fmt(sat_lo) + ", " + fmt(sat_hi) +
            "], swept volume " + std::string(monotone ? "monotone" : "NOT monotone") +
            ", flux imbalance " + fmt(max_imbalance) + " (tol 1e-8), CFL " +
            (under_cfl ? "respected" : "violated"));
  });

  // 7. Indicator variance identity.
  guarded(7, "indicator-variance identity", [&] {
    Rng rng(4242);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const long n = 2 + static_cast<long>(uniform01(rng) * 1000);
      const long m = static_cast<long>(uniform01(rng) * (n + 1)) % (n + 1);
      Vector indicator = Vector::Zero(n);
      indicator.head(m).setOnes();
      const Real mean = indicator.mean();
      const Real var = (indicator.array() - mean).square().sum() /
                       static_cast<Real>(n - 1);
      const Real s = indicator_sigma(m, n);
      worst = std::max(worst, std::abs(s * s - var));
    }
    return std::make_pair(worst <= 1e-14,
                          "max |s^2 - two-pass variance| = " + fmt(worst) +
                              " (tol 1e-14)");
  });

  // 8. Truncated-normal sampler against the quadrature oracle.
  guarded(8, "truncated-normal sampler", [&] {
    const TruncatedNormal dist{15, 3, 10, 20};
    const auto pdf = [&](double x) {
      const double z = (x - 15) / 3;
      return std::exp(-z * z / 2);
    };
    const double z = simpson(10, 20, 4000, pdf);
    const double mean_oracle =
        simpson(10, 20, 4000, [&](double x) { return x * pdf(x); }) / z;
    const double var_oracle =
        simpson(10, 20, 4000,
                [&](double x) {
                  return (x - mean_oracle) * (x - mean_oracle) * pdf(x);
                }) /
        z;

    const int n = 100000;
    const SampleSet set = draw_sample_set({dist}, n, 818);
    const double mean = set.values.col(0).mean();
    const double se = std::sqrt(var_oracle / n);
    const double dev = std::abs(mean - mean_oracle);
    return std::make_pair(dev < 3 * se,
                          "empirical mean " + fmt(mean) + " vs oracle " +
                              fmt(mean_oracle) + ", |diff| " + fmt(dev) +
                              " < 3 SE = " + fmt(3 * se));
  });

  // 9. Bitwise determinism of the CLI across reruns and worker counts.
  guarded(9, "CLI determinism", [&] {
    const fs::path base = fs::temp_directory_path() / "sfvuq_acceptance";
    fs::remove_all(base);
    const std::string common =
        " converge --case " + (cases_dir / "case1.json").string() +
        " --n 128 --seed 11 --budgets 4,8,16 --methods mc,sfv-kmeans --out ";
    const std::vector<std::pair<std::string, std::string>> runs{
        {"a", " --jobs 1"}, {"b", " --jobs 1"}, {"c", " --jobs 2"}};
    for (const auto& [tag, jobs] : runs) {
      const std::string cmd =
          bin + common + (base / tag).string() + jobs + " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0)
        return std::make_pair(false, "converge invocation failed (" + tag + ")");
    }
    bool identical = true;
    for (const char* file : {"convergence_mc.csv", "convergence_sfv-kmeans.csv"}) {
      const std::string a = slurp(base / "a" / file);
      identical = identical && a == slurp(base / "b" / file) &&
                  a == slurp(base / "c" / file) && !a.empty();
    }
    return std::make_pair(
        identical, std::string("three runs (rerun + --jobs 2) byte-identical: ") +
                       (identical ? "yes" : "NO"));
  });

  if (failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
