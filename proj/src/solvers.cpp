#include "sfv/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sfv {

namespace {

void check_face_array(const Grid2D& grid, ConstVectorRef face_trans,
                      const char* who) {
  if (face_trans.size() != static_cast<Eigen::Index>(grid.faces.size()))
    throw std::invalid_argument(std::string(who) +
                                ": face array does not match grid");
  if ((face_trans.array() < 0).any())
    throw std::invalid_argument(std::string(who) +
                                ": negative face transmissibility");
}

std::vector<char> constrained_mask(const Grid2D& grid, const BoundarySpec& bc,
                                   const char* who) {
  std::vector<char> mask(static_cast<std::size_t>(grid.n_cells()), 0);
  for (const auto& d : bc) {
    if (d.cell < 0 || d.cell >= grid.n_cells())
      throw std::invalid_argument(std::string(who) + ": Dirichlet cell " +
                                  std::to_string(d.cell) + " out of range");
    if (mask[static_cast<std::size_t>(d.cell)])
      throw std::invalid_argument(std::string(who) +
                                  ": duplicate Dirichlet cell " +
                                  std::to_string(d.cell));
    mask[static_cast<std::size_t>(d.cell)] = 1;
  }
  return mask;
}

// Every ungrounded cell must reach a grounded one through faces with a
// positive coefficient, otherwise the system splits into a floating block.
void check_grounded(const Grid2D& grid, ConstVectorRef face_coef,
                    const std::vector<char>& grounded, const char* who) {
  const int n = grid.n_cells();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < grid.faces.size(); ++f) {
    if (face_coef[static_cast<Eigen::Index>(f)] <= 0) continue;
    adj[static_cast<std::size_t>(grid.faces[f].a)].push_back(grid.faces[f].b);
    adj[static_cast<std::size_t>(grid.faces[f].b)].push_back(grid.faces[f].a);
  }
  std::vector<char> reached = grounded;
  std::vector<int> stack;
  for (int c = 0; c < n; ++c)
    if (grounded[static_cast<std::size_t>(c)]) stack.push_back(c);
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    for (int nb : adj[static_cast<std::size_t>(c)])
      if (!reached[static_cast<std::size_t>(nb)]) {
        reached[static_cast<std::size_t>(nb)] = 1;
        stack.push_back(nb);
      }
  }
  for (int c = 0; c < n; ++c)
    if (!reached[static_cast<std::size_t>(c)])
      throw SingularSystemError(std::string(who) + ": cell " +
                                std::to_string(c) +
                                " is disconnected from every constraint");
}

struct Assembly {
  SparseMatrix matrix;
  Vector rhs;
};

// Symmetric strong imposition: constrained rows become identity and their
// column contributions move to the right-hand side.
Assembly assemble_flux_system(const Grid2D& grid, ConstVectorRef face_coef,
                              ConstVectorRef diag0, ConstVectorRef rhs0,
                              const std::vector<char>& constrained,
                              ConstVectorRef fixed_values) {
  const int n = grid.n_cells();
  Vector diag = diag0;
  Vector rhs = rhs0;
  std::vector<Triplet> trips;
  trips.reserve(grid.faces.size() * 2 + static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < grid.faces.size(); ++f) {
    const Real t = face_coef[static_cast<Eigen::Index>(f)];
    if (t == 0) continue;
    const int a = grid.faces[f].a;
    const int b = grid.faces[f].b;
    const bool ca = constrained[static_cast<std::size_t>(a)];
    const bool cb = constrained[static_cast<std::size_t>(b)];
    if (!ca && !cb) {
      diag[a] += t;
      diag[b] += t;
      trips.emplace_back(a, b, -t);
      trips.emplace_back(b, a, -t);
    } else if (ca && !cb) {
      diag[b] += t;
      rhs[b] += t * fixed_values[a];
    } else if (!ca && cb) {
      diag[a] += t;
      rhs[a] += t * fixed_values[b];
    }
  }
  for (int c = 0; c < n; ++c) {
    if (constrained[static_cast<std::size_t>(c)]) {
      trips.emplace_back(c, c, Real(1));
      rhs[c] = fixed_values[c];
    } else {
      trips.emplace_back(c, c, diag[c]);
    }
  }
  Assembly out;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  out.rhs = std::move(rhs);
  return out;
}

}  // namespace

std::pair<Real, Real> relperm(Real s_w, const FluidRockProps& props,
                              long* clamp_events) {
  if (!(props.s_iw >= 0 && props.s_iw < 1))
    throw std::invalid_argument("relperm: s_iw must lie in [0, 1)");
  Real s = s_w;
  if (s < props.s_iw || s > 1) {
    if (clamp_events) ++*clamp_events;
    s = std::clamp(s, props.s_iw, Real(1));
  }
  const Real se = (s - props.s_iw) / (1 - props.s_iw);
  return {se * se, (1 - se) * (1 - se)};
}

Vector solve_elliptic(const Grid2D& grid, ConstVectorRef face_trans,
                      const BoundarySpec& bc, Real tol) {
  check_face_array(grid, face_trans, "solve_elliptic");
  if (bc.empty())
    throw SingularSystemError(
        "solve_elliptic: steady problem needs a Dirichlet constraint");
  const auto mask = constrained_mask(grid, bc, "solve_elliptic");
  const int n = grid.n_cells();
  Vector fixed = Vector::Zero(n);
  for (const auto& d : bc) fixed[d.cell] = d.pressure;

  check_grounded(grid, face_trans, mask, "solve_elliptic");

  const Assembly sys = assemble_flux_system(
      grid, face_trans, Vector::Zero(n), Vector::Zero(n), mask, fixed);
  Vector p = linear_solve(sys.matrix, sys.rhs, tol);
  for (const auto& d : bc) p[d.cell] = d.pressure;
  return p;
}

SimState step_parabolic(const SimState& state, const Grid2D& grid,
                        ConstVectorRef face_trans, ConstVectorRef accum,
                        const std::vector<WellSpec>& wells, Real dt) {
  check_face_array(grid, face_trans, "step_parabolic");
  const int n = grid.n_cells();
  if (state.pressure.size() != n)
    throw std::invalid_argument("step_parabolic: state does not match grid");
  if (accum.size() != n || (accum.array() <= 0).any())
    throw std::invalid_argument(
        "step_parabolic: accumulation must be positive per cell");
  if (!(dt > 0)) throw std::invalid_argument("step_parabolic: dt must be > 0");

  Vector diag = accum;
  Vector rhs = accum.cwiseProduct(state.pressure);
  for (const auto& w : wells) {
    if (w.cell < 0 || w.cell >= n)
      throw std::invalid_argument("step_parabolic: well cell out of range");
    if (w.pi < 0)
      throw std::invalid_argument("step_parabolic: PI must be >= 0");
    diag[w.cell] += w.pi;
    rhs[w.cell] += w.pi * w.bhp;
  }

  const std::vector<char> none(static_cast<std::size_t>(n), 0);
  const Assembly sys = assemble_flux_system(grid, face_trans, diag, rhs, none,
                                            Vector::Zero(n));
  SimState next;
  next.pressure = linear_solve(sys.matrix, sys.rhs);
  next.saturation_w = state.saturation_w;
  next.time = state.time + dt;
  return next;
}

SimState impes_step(const SimState& state, const Grid2D& grid,
                    ConstVectorRef face_trans, const FluidRockProps& props,
                    const BoundarySpec& bc, Real dt, ImpesReport* report,
                    Real cfl_limit) {
  check_face_array(grid, face_trans, "impes_step");
  const int n = grid.n_cells();
  if (state.pressure.size() != n || state.saturation_w.size() != n)
    throw std::invalid_argument(
        "impes_step: state needs pressure and saturation per cell");
  if (!(dt > 0)) throw std::invalid_argument("impes_step: dt must be > 0");
  if (!(props.mu_w > 0) || !(props.mu_n > 0))
    throw std::invalid_argument("impes_step: phase viscosities must be > 0");
  if (!(props.porosity > 0))
    throw std::invalid_argument("impes_step: porosity must be > 0");

  const auto mask = constrained_mask(grid, bc, "impes_step");
  Vector fixed = Vector::Zero(n);
  for (const auto& d : bc) fixed[d.cell] = d.pressure;

  const Vector& p0 = state.pressure;
  const Vector& s0 = state.saturation_w;
  long clamps = 0;

  Vector lam_w(n), lam_t(n);
  for (int c = 0; c < n; ++c) {
    const auto [krw, krn] = relperm(s0[c], props, &clamps);
    lam_w[c] = krw / props.mu_w;
    lam_t[c] = lam_w[c] + krn / props.mu_n;
  }

  // Upwind from the previous pressure field; ties average the two sides.
  const auto n_faces = static_cast<Eigen::Index>(grid.faces.size());
  Vector coef_t(n_faces), coef_w(n_faces);
  for (Eigen::Index f = 0; f < n_faces; ++f) {
    const int a = grid.faces[static_cast<std::size_t>(f)].a;
    const int b = grid.faces[static_cast<std::size_t>(f)].b;
    Real lw, lt;
    if (p0[a] > p0[b]) {
      lw = lam_w[a];
      lt = lam_t[a];
    } else if (p0[b] > p0[a]) {
      lw = lam_w[b];
      lt = lam_t[b];
    } else {
      lw = (lam_w[a] + lam_w[b]) / 2;
      lt = (lam_t[a] + lam_t[b]) / 2;
    }
    coef_t[f] = lt * face_trans[f];
    coef_w[f] = lw * face_trans[f];
  }

  // phi*(c_r + S_n c_n + S_w c_w)*V/dt; zero for incompressible runs.
  const Real vol = grid.cell_volume;
  Vector accum(n);
  for (int c = 0; c < n; ++c)
    accum[c] = vol * props.porosity *
               (props.c_r + (1 - s0[c]) * props.c_n + s0[c] * props.c_w) / dt;

  std::vector<char> grounded = mask;
  for (int c = 0; c < n; ++c)
    if (accum[c] > 0) grounded[static_cast<std::size_t>(c)] = 1;
  check_grounded(grid, coef_t, grounded, "impes_step");

  const Assembly sys = assemble_flux_system(
      grid, coef_t, accum, accum.cwiseProduct(p0), mask, fixed);
  Vector p1 = linear_solve(sys.matrix, sys.rhs);
  for (const auto& d : bc) p1[d.cell] = d.pressure;

  // Explicit saturation update from the new pressures, same face mobilities
  // as the pressure assembly.
  Vector water_in = Vector::Zero(n);
  Vector total_in = Vector::Zero(n);
  for (Eigen::Index f = 0; f < n_faces; ++f) {
    const int a = grid.faces[static_cast<std::size_t>(f)].a;
    const int b = grid.faces[static_cast<std::size_t>(f)].b;
    const Real dp = p1[a] - p1[b];
    water_in[b] += coef_w[f] * dp;
    water_in[a] -= coef_w[f] * dp;
    total_in[b] += coef_t[f] * dp;
    total_in[a] -= coef_t[f] * dp;
  }

  const Real pore = vol * props.porosity;
  Vector s1(n);
  std::vector<char> pinned(static_cast<std::size_t>(n), 0);
  for (int c = 0; c < n; ++c) {
    const Real storage =
        pore * props.c_w * s0[c] / dt * (p1[c] - p0[c]);  // Pa-compressible part
    s1[c] = s0[c] + dt / pore * (water_in[c] - storage);
  }
  for (const auto& d : bc) {
    if (d.inflow_saturation) {
      s1[d.cell] = *d.inflow_saturation;
      pinned[static_cast<std::size_t>(d.cell)] = 1;
    } else {
      // The boundary absorbs the net interior surplus, carrying water at the
      // cell's own fractional flow.
      const Real fw = lam_t[d.cell] > 0 ? lam_w[d.cell] / lam_t[d.cell] : 0;
      s1[d.cell] =
          s0[d.cell] + dt / pore * (water_in[d.cell] - fw * total_in[d.cell]);
    }
  }

  ImpesReport rep;
  rep.pre_clamp_min = s1.minCoeff();
  rep.pre_clamp_max = s1.maxCoeff();
  for (int c = 0; c < n; ++c) {
    if (!pinned[static_cast<std::size_t>(c)])
      rep.max_saturation_change =
          std::max(rep.max_saturation_change, std::abs(s1[c] - s0[c]));
    if (s1[c] < props.s_iw || s1[c] > 1) {
      ++clamps;
      s1[c] = std::clamp(s1[c], props.s_iw, Real(1));
    }
  }
  rep.cfl_violated = rep.max_saturation_change > cfl_limit;
  rep.clamp_events = clamps;
  rep.boundary_rates.reserve(bc.size());
  for (const auto& d : bc) rep.boundary_rates.push_back(-total_in[d.cell]);
  if (report) *report = std::move(rep);

  SimState next;
  next.pressure = std::move(p1);
  next.saturation_w = std::move(s1);
  next.time = state.time + dt;
  return next;
}

}  // namespace sfv
