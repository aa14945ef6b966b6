#pragma once

#include "sfv/partition.hpp"
#include "sfv/solvers.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sfv {

enum class CaseKind { Elliptic, Parabolic, TwoPhase };
enum class Method { Mc, SfvKmeans, SfvTensor };

std::string to_string(Method method);
std::optional<Method> parse_method(const std::string& name);

enum class QoIKind { CellPressure, AccumulatedProduction, SweptVolume };

struct QoISpec {
  QoIKind kind = QoIKind::CellPressure;
  int cell = -1;      ///< for cell-pressure
  Real s_iw = 0;      ///< for swept-volume
  bool include_porosity = false;
  Real porosity = 1;  ///< used only when include_porosity is set
};

struct LayoutSpec {
  enum class Kind { HalfSplit, Channels } kind = Kind::HalfSplit;
  Real x_split = 0;
  int n_channels = 0;
};

/// Well from the case file; PI falls back to the Peaceman formula with the
/// sampled well-block permeability when not given.
struct WellConfig {
  int cell = -1;
  Real bhp = 0;
  std::optional<Real> pi;
};

/// Fully resolved test case: grid, fluids, random field, schedule and QoI.
struct CaseSpec {
  std::string name;
  CaseKind kind = CaseKind::Elliptic;

  Grid2D grid;
  FieldLayout layout;
  LayoutSpec layout_spec;
  std::vector<ComponentDistribution> components;
  FluidRockProps props;
  std::vector<WellConfig> wells;
  BoundarySpec bc;
  QoISpec qoi;

  Real initial_pressure = 0;  ///< Pa
  Real dt = 0;                ///< s
  int n_steps = 0;
  Real cfl_limit = 0.2;
  Real linear_tol = 1e-10;
};

/// Peaceman production index 2*pi*K*h/(mu*ln(r_e/r_w)) with r_e = 0.2*dx and
/// r_w = 0.1 m.
Real peaceman_pi(Real perm, Real thickness, Real mu, Real dx);

/// Coefficient groups entering the discrete schemes. These are what gets
/// averaged per parameter cell; fields themselves never are.
struct CaseCoefficients {
  Vector face_trans;    ///< per face
  Vector cell_phi;      ///< porosity per cell
  Vector cell_phi_ct;   ///< single-phase accumulation factor per cell
  Vector well_pi;       ///< per well
};

/// Coefficients of one sample realization.
CaseCoefficients assemble_sample_coefficients(const CaseSpec& spec,
                                              ConstVectorRef sample_md);

/// Conditional mean of the member coefficients of one cluster, i.e. the
/// per-sample assemblies averaged with weight 1/m_j. Harmonic face
/// composition happens per sample, before averaging.
CaseCoefficients cluster_mean_coefficients(const Partition& partition,
                                           const SampleSet& samples,
                                           int cluster, const CaseSpec& spec);

/// Everything extract_qoi may need from one simulation.
struct Trajectory {
  Vector final_pressure;
  Vector final_saturation;
  std::vector<Real> well_rates;  ///< total production rate per step, m^3/s
  Real dt = 0;
  int n_steps = 0;
  long cfl_violations = 0;  ///< two-phase steps exceeding the saturation CFL
};

Real extract_qoi(const Trajectory& trajectory, const QoISpec& qoi,
                 const Grid2D& grid, Real dt);

/// Runs the case's scheme on one coefficient set and extracts the QoI.
Real run_forward(const CaseSpec& spec, const CaseCoefficients& coefficients);

/// Moment estimate for one QoI from one method.
struct UqEstimate {
  Real mean = 0;
  Real variance = 0;
  Real stddev = 0;
  int budget = 0;  ///< number of forward simulations spent
  std::string method;
  std::uint64_t seed = 0;
  bool variance_degenerate = false;  ///< single-value input
};

/// Plain Monte Carlo moments with Bessel-corrected variance.
UqEstimate estimate_mc(const std::vector<Real>& values);

/// Probability-weighted moments over parameter cells. Weights must sum to
/// one (1e-9 tolerance); the estimate normalizes by the exact weight sum.
/// paper_literal additionally divides both moments by the cluster count.
UqEstimate estimate_sfv(const std::vector<Real>& values, ConstVectorRef weights,
                        bool paper_literal = false);

struct StudyOptions {
  int jobs = 1;
  bool paper_literal = false;
  std::vector<int> tensor_bins;  ///< per-dim override for sfv-tensor
  KMeansInit kmeans_init = KMeansInit::PlusPlus;
};

/// One UQ estimate at the given simulation budget. MC simulates the first
/// `budget` samples of the frozen set; SFV partitions all samples into
/// `budget` cells and simulates each cell once.
UqEstimate run_study(const CaseSpec& spec, Method method, int budget,
                     const SampleSet& base_samples, std::uint64_t seed,
                     const StudyOptions& options = {});

struct ConvergenceRow {
  int budget = 0;  ///< requested budget (x-axis)
  Real mean = 0;
  Real stddev = 0;
  Real mean_err = 0;
  Real std_err = 0;
};

struct ConvergenceRecord {
  std::string method;
  std::vector<ConvergenceRow> rows;
  UqEstimate reference;
  std::uint64_t seed = 0;
  Real slope_mean_err = 0;  ///< fitted log-log slope of |mean error|
};

/// Error decay of each method against the exhaustive MC reference on the
/// frozen sample set. Per-sample QoI values are computed once and reused
/// for every MC prefix.
std::vector<ConvergenceRecord> convergence_study(
    const CaseSpec& spec, const std::vector<int>& budgets,
    const std::vector<Method>& methods, const SampleSet& base_samples,
    std::uint64_t seed, const StudyOptions& options = {});

/// Least-squares slope of log(err) vs log(budget); rows with vanishing
/// error are skipped.
Real fit_loglog_slope(const std::vector<ConvergenceRow>& rows);

/// Deterministic parallel map: values[i] = f(i), computed by up to `jobs`
/// workers. The lowest-index worker exception is rethrown.
std::vector<Real> parallel_map(int count, int jobs,
                               const std::function<Real(int)>& f);

}  // namespace sfv
