#pragma once

#include "sfv/grid.hpp"
#include "sfv/linear_solver.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sfv {

/// Pressure (and water saturation, when two-phase) at one time level.
struct SimState {
  Vector pressure;      ///< Pa per cell
  Vector saturation_w;  ///< empty unless two-phase
  Real time = 0;        ///< s
};

struct FluidRockProps {
  Real porosity = 0;    ///< fraction
  Real c_t = 0;         ///< single-phase total compressibility, 1/Pa
  Real c_r = 0;         ///< rock compressibility, 1/Pa
  Real c_w = 0;         ///< water compressibility, 1/Pa
  Real c_n = 0;         ///< non-wetting (oil) compressibility, 1/Pa
  Real mu = 0;          ///< single-phase viscosity, Pa*s
  Real mu_w = 0;        ///< water viscosity, Pa*s
  Real mu_n = 0;        ///< oil viscosity, Pa*s
  Real s_iw = 0;        ///< irreducible water saturation
};

/// Peaceman-type well: q = PI * (p - bhp), positive when producing.
struct WellSpec {
  int cell = -1;
  Real pi = 0;   ///< m^3/(Pa*s)
  Real bhp = 0;  ///< Pa
};

struct DirichletCell {
  int cell = -1;
  Real pressure = 0;  ///< Pa
  /// Saturation held at this cell when set; models a water-saturated
  /// boundary feeding the domain.
  std::optional<Real> inflow_saturation;
};

using BoundarySpec = std::vector<DirichletCell>;

inline Real well_rate(Real pressure, const WellSpec& well) {
  return well.pi * (pressure - well.bhp);
}

/// Quadratic Corey relative permeabilities (k_rw, k_rn) on the normalized
/// saturation (S_w - S_iw)/(1 - S_iw). Out-of-range saturations are clamped
/// and counted in *clamp_events when provided.
std::pair<Real, Real> relperm(Real s_w, const FluidRockProps& props,
                              long* clamp_events = nullptr);

/// Steady pressure field with flux balance at every unconstrained cell.
/// Dirichlet cells hold their fixed values exactly.
Vector solve_elliptic(const Grid2D& grid, ConstVectorRef face_trans,
                      const BoundarySpec& bc, Real tol = 1e-10);

/// One backward-Euler step of the slightly compressible pressure equation.
/// accum holds V*phi*c_t/dt per cell; the well term is implicit in p^{n+1}.
SimState step_parabolic(const SimState& state, const Grid2D& grid,
                        ConstVectorRef face_trans, ConstVectorRef accum,
                        const std::vector<WellSpec>& wells, Real dt);

/// Per-step diagnostics from impes_step.
struct ImpesReport {
  Real max_saturation_change = 0;  ///< before clamping
  Real pre_clamp_min = 0;
  Real pre_clamp_max = 0;
  bool cfl_violated = false;
  long clamp_events = 0;
  /// Net boundary exchange per Dirichlet cell, positive into the domain.
  std::vector<Real> boundary_rates;
};

/// One IMPES step: pressure implicit with upwinded total mobility, then the
/// explicit saturation update from the new pressures. face_trans must be the
/// geometric K*A/d composition (viscosity lives in the mobilities).
SimState impes_step(const SimState& state, const Grid2D& grid,
                    ConstVectorRef face_trans, const FluidRockProps& props,
                    const BoundarySpec& bc, Real dt,
                    ImpesReport* report = nullptr, Real cfl_limit = 0.2);

}  // namespace sfv
