#include "sfv/uq.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

namespace sfv {

std::string to_string(Method method) {
  switch (method) {
    case Method::Mc: return "mc";
    case Method::SfvKmeans: return "sfv-kmeans";
    case Method::SfvTensor: return "sfv-tensor";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "mc") return Method::Mc;
  if (name == "sfv-kmeans") return Method::SfvKmeans;
  if (name == "sfv-tensor") return Method::SfvTensor;
  return std::nullopt;
}

Real peaceman_pi(Real perm, Real thickness, Real mu, Real dx) {
  if (!(perm > 0) || !(thickness > 0) || !(mu > 0) || !(dx > 0))
    throw std::invalid_argument("peaceman_pi: inputs must be > 0");
  const Real r_e = 0.2 * dx;
  const Real r_w = 0.1;
  return 2 * std::numbers::pi * perm * thickness / (mu * std::log(r_e / r_w));
}

CaseCoefficients assemble_sample_coefficients(const CaseSpec& spec,
                                              ConstVectorRef sample_md) {
  const PermField perm =
      realize_permeability(sample_md, spec.layout, spec.grid);
  const Real mu_face = spec.kind == CaseKind::TwoPhase ? Real(1) : spec.props.mu;

  CaseCoefficients coef;
  coef.face_trans = assemble_face_transmissibilities(spec.grid, perm, mu_face);
  coef.cell_phi = Vector::Constant(spec.grid.n_cells(), spec.props.porosity);
  coef.cell_phi_ct = Vector::Constant(spec.grid.n_cells(),
                                      spec.props.porosity * spec.props.c_t);
  coef.well_pi.resize(static_cast<Eigen::Index>(spec.wells.size()));
  for (std::size_t w = 0; w < spec.wells.size(); ++w) {
    const WellConfig& well = spec.wells[w];
    if (well.cell < 0 || well.cell >= spec.grid.n_cells())
      throw std::invalid_argument("well cell out of range");
    coef.well_pi[static_cast<Eigen::Index>(w)] =
        well.pi ? *well.pi
                : peaceman_pi(perm.values[well.cell], spec.grid.h,
                              spec.props.mu, spec.grid.dx);
  }
  return coef;
}

CaseCoefficients cluster_mean_coefficients(const Partition& partition,
                                           const SampleSet& samples,
                                           int cluster, const CaseSpec& spec) {
  if (cluster < 0 || cluster >= partition.n_clusters)
    throw std::invalid_argument("cluster_mean_coefficients: no such cluster");
  const auto& members = partition.members[static_cast<std::size_t>(cluster)];
  if (members.empty())
    throw std::invalid_argument("cluster_mean_coefficients: empty cluster");

  CaseCoefficients mean;
  bool first = true;
  for (int i : members) {
    CaseCoefficients c =
        assemble_sample_coefficients(spec, samples.values.row(i).transpose());
    if (first) {
      mean = std::move(c);
      first = false;
    } else {
      mean.face_trans += c.face_trans;
      mean.cell_phi += c.cell_phi;
      mean.cell_phi_ct += c.cell_phi_ct;
      mean.well_pi += c.well_pi;
    }
  }
  const Real inv_m = Real(1) / static_cast<Real>(members.size());
  mean.face_trans *= inv_m;
  mean.cell_phi *= inv_m;
  mean.cell_phi_ct *= inv_m;
  mean.well_pi *= inv_m;
  return mean;
}

Real extract_qoi(const Trajectory& trajectory, const QoISpec& qoi,
                 const Grid2D& grid, Real dt) {
  switch (qoi.kind) {
    case QoIKind::CellPressure:
      if (qoi.cell < 0 || qoi.cell >= trajectory.final_pressure.size())
        throw std::invalid_argument("extract_qoi: QoI cell out of range");
      return trajectory.final_pressure[qoi.cell];
    case QoIKind::AccumulatedProduction: {
      Real total = 0;
      for (Real q : trajectory.well_rates) total += q * dt;
      return total;
    }
    case QoIKind::SweptVolume: {
      if (trajectory.final_saturation.size() != grid.n_cells())
        throw std::invalid_argument("extract_qoi: no saturation trajectory");
      Real swept = (trajectory.final_saturation.array() - qoi.s_iw).sum() *
                   grid.cell_volume;
      if (qoi.include_porosity) swept *= qoi.porosity;
      return swept;
    }
  }
  throw std::invalid_argument("extract_qoi: unknown QoI kind");
}

namespace {

Trajectory simulate(const CaseSpec& spec, const CaseCoefficients& coef) {
  Trajectory traj;
  traj.dt = spec.dt;
  traj.n_steps = spec.n_steps;
  const int n = spec.grid.n_cells();

  switch (spec.kind) {
    case CaseKind::Elliptic: {
      traj.final_pressure =
          solve_elliptic(spec.grid, coef.face_trans, spec.bc, spec.linear_tol);
      break;
    }
    case CaseKind::Parabolic: {
      SimState state;
      state.pressure = Vector::Constant(n, spec.initial_pressure);
      const Vector accum = spec.grid.cell_volume * coef.cell_phi_ct / spec.dt;
      std::vector<WellSpec> wells(spec.wells.size());
      for (std::size_t w = 0; w < spec.wells.size(); ++w)
        wells[w] = {spec.wells[w].cell,
                    coef.well_pi[static_cast<Eigen::Index>(w)],
                    spec.wells[w].bhp};
      traj.well_rates.reserve(static_cast<std::size_t>(spec.n_steps));
      for (int step = 0; step < spec.n_steps; ++step) {
        state = step_parabolic(state, spec.grid, coef.face_trans, accum, wells,
                               spec.dt);
        Real q = 0;
        for (const auto& w : wells) q += well_rate(state.pressure[w.cell], w);
        traj.well_rates.push_back(q);
      }
      traj.final_pressure = std::move(state.pressure);
      break;
    }
    case CaseKind::TwoPhase: {
      SimState state;
      state.pressure = Vector::Constant(n, spec.initial_pressure);
      for (const auto& d : spec.bc) state.pressure[d.cell] = d.pressure;
      state.saturation_w = Vector::Constant(n, spec.props.s_iw);
      ImpesReport report;
      for (int step = 0; step < spec.n_steps; ++step) {
        state = impes_step(state, spec.grid, coef.face_trans, spec.props,
                           spec.bc, spec.dt, &report, spec.cfl_limit);
        traj.cfl_violations += report.cfl_violated;
      }
      traj.final_pressure = std::move(state.pressure);
      traj.final_saturation = std::move(state.saturation_w);
      break;
    }
  }
  return traj;
}

}  // namespace

Real run_forward(const CaseSpec& spec, const CaseCoefficients& coefficients) {
  return extract_qoi(simulate(spec, coefficients), spec.qoi, spec.grid,
                     spec.dt);
}

UqEstimate estimate_mc(const std::vector<Real>& values) {
  if (values.empty())
    throw std::invalid_argument("estimate_mc: no values");
  const auto n = static_cast<Real>(values.size());
  Real sum = 0;
  for (Real v : values) sum += v;
  UqEstimate est;
  est.method = "mc";
  est.budget = static_cast<int>(values.size());
  est.mean = sum / n;
  if (values.size() < 2) {
    est.variance_degenerate = true;
  } else {
    Real ss = 0;
    for (Real v : values) ss += (v - est.mean) * (v - est.mean);
    est.variance = ss / (n - 1);
  }
  est.stddev = std::sqrt(est.variance);
  return est;
}

UqEstimate estimate_sfv(const std::vector<Real>& values, ConstVectorRef weights,
                        bool paper_literal) {
  if (values.empty())
    throw std::invalid_argument("estimate_sfv: no values");
  if (weights.size() != static_cast<Eigen::Index>(values.size()))
    throw std::invalid_argument(
        "estimate_sfv: values and weights differ in length");
  const Real wsum = weights.sum();
  if (std::abs(wsum - 1) > 1e-9)
    throw std::invalid_argument("estimate_sfv: weights must sum to one");

  const auto k = static_cast<Eigen::Index>(values.size());
  UqEstimate est;
  est.budget = static_cast<int>(values.size());
  Real wv = 0;
  for (Eigen::Index j = 0; j < k; ++j) wv += weights[j] * values[static_cast<std::size_t>(j)];
  if (paper_literal) {
    // The printed estimator keeps a 1/N_c prefactor next to weights that
    // already sum to one.
    est.mean = wv / static_cast<Real>(k);
    Real wss = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Real dv = values[static_cast<std::size_t>(j)] - est.mean;
      wss += weights[j] * dv * dv;
    }
    est.variance = wss / static_cast<Real>(k);
  } else {
    est.mean = wv / wsum;
    Real wss = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Real dv = values[static_cast<std::size_t>(j)] - est.mean;
      wss += weights[j] * dv * dv;
    }
    est.variance = wss / wsum;
  }
  est.variance_degenerate = values.size() < 2;
  est.stddev = std::sqrt(est.variance);
  return est;
}

std::vector<Real> parallel_map(int count, int jobs,
                               const std::function<Real(int)>& f) {
  std::vector<Real> values(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return values;
  const int workers = std::clamp(jobs, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) values[static_cast<std::size_t>(i)] = f(i);
    return values;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        values[static_cast<std::size_t>(i)] = f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return values;
}

namespace {

std::vector<int> isotropic_bins(int budget, int dim) {
  const int per_dim = std::max<int>(
      1, static_cast<int>(std::llround(std::pow(static_cast<Real>(budget),
                                                Real(1) / dim))));
  return std::vector<int>(static_cast<std::size_t>(dim), per_dim);
}

Real forward_with_context(const CaseSpec& spec, const CaseCoefficients& coef,
                          const char* what, int id) {
  try {
    return run_forward(spec, coef);
  } catch (const std::exception& e) {
    throw std::runtime_error("forward run failed for " + std::string(what) +
                             " " + std::to_string(id) + ": " + e.what());
  }
}

}  // namespace

UqEstimate run_study(const CaseSpec& spec, Method method, int budget,
                     const SampleSet& base_samples, std::uint64_t seed,
                     const StudyOptions& options) {
  const int n = base_samples.size();
  if (budget < 1) throw std::invalid_argument("run_study: budget must be >= 1");

  if (method == Method::Mc) {
    if (budget > n)
      throw std::invalid_argument(
          "run_study: MC budget exceeds the frozen sample count");
    const std::vector<Real> values =
        parallel_map(budget, options.jobs, [&](int i) {
          return forward_with_context(
              spec,
              assemble_sample_coefficients(
                  spec, base_samples.values.row(i).transpose()),
              "sample", i);
        });
    UqEstimate est = estimate_mc(values);
    est.seed = seed;
    return est;
  }

  Partition partition;
  if (method == Method::SfvKmeans) {
    partition = kmeans_partition(base_samples, budget, seed, 300, nullptr,
                                 options.kmeans_init);
  } else {
    const std::vector<int> bins = options.tensor_bins.empty()
                                      ? isotropic_bins(budget, base_samples.dim())
                                      : options.tensor_bins;
    partition = tensor_partition(base_samples, bins);
  }
  const Vector weights = cluster_weights(partition, n);
  const std::vector<Real> values =
      parallel_map(partition.n_clusters, options.jobs, [&](int j) {
        return forward_with_context(
            spec, cluster_mean_coefficients(partition, base_samples, j, spec),
            "cluster", j);
      });
  UqEstimate est = estimate_sfv(values, weights, options.paper_literal);
  est.method = to_string(method);
  est.budget = partition.n_clusters;
  est.seed = seed;
  return est;
}

Real fit_loglog_slope(const std::vector<ConvergenceRow>& rows) {
  std::vector<std::pair<Real, Real>> pts;
  for (const auto& r : rows)
    if (r.budget > 0 && r.mean_err > 0)
      pts.emplace_back(std::log(static_cast<Real>(r.budget)),
                       std::log(r.mean_err));
  if (pts.size() < 2) return std::numeric_limits<Real>::quiet_NaN();
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Real m = static_cast<Real>(pts.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<ConvergenceRecord> convergence_study(
    const CaseSpec& spec, const std::vector<int>& budgets,
    const std::vector<Method>& methods, const SampleSet& base_samples,
    std::uint64_t seed, const StudyOptions& options) {
  if (budgets.empty())
    throw std::invalid_argument("convergence_study: no budgets");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1)
      throw std::invalid_argument("convergence_study: budgets must be >= 1");
    if (i > 0 && budgets[i] <= budgets[i - 1])
      throw std::invalid_argument(
          "convergence_study: budgets must be strictly increasing");
  }
  const int n = base_samples.size();
  if (budgets.back() > n)
    throw std::invalid_argument(
        "convergence_study: largest budget exceeds the sample count");

  // Exhaustive per-sample values; MC prefixes reuse them unchanged.
  const std::vector<Real> sample_values =
      parallel_map(n, options.jobs, [&](int i) {
        return forward_with_context(
            spec,
            assemble_sample_coefficients(spec,
                                         base_samples.values.row(i).transpose()),
            "sample", i);
      });
  UqEstimate reference = estimate_mc(sample_values);
  reference.seed = seed;

  std::vector<ConvergenceRecord> records;
  records.reserve(methods.size());
  for (Method method : methods) {
    ConvergenceRecord rec;
    rec.method = to_string(method);
    rec.seed = seed;
    rec.reference = reference;
    for (int budget : budgets) {
      UqEstimate est;
      if (method == Method::Mc) {
        est = estimate_mc({sample_values.begin(),
                           sample_values.begin() + budget});
        est.seed = seed;
      } else {
        est = run_study(spec, method, budget, base_samples, seed, options);
      }
      rec.rows.push_back({budget, est.mean, est.stddev,
                          std::abs(est.mean - reference.mean),
                          std::abs(est.stddev - reference.stddev)});
    }
    rec.slope_mean_err = fit_loglog_slope(rec.rows);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace sfv
