#pragma once

#include "sfv/types.hpp"

#include <vector>

namespace sfv {

/// Interior face between two cells with its two-point-flux geometry.
struct Face {
  int a = -1;     ///< cell index on one side
  int b = -1;     ///< cell index on the other side
  Real area = 0;  ///< face area, m^2
  Real da = 0;    ///< centre-to-face distance on side a, m
  Real db = 0;    ///< centre-to-face distance on side b, m
};

/// Cartesian 2D mesh with explicit thickness h. Cells are indexed row-major
/// with row 0 at the bottom, so cell (i, j) has index j*nx + i.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  Real dx = 0;
  Real dy = 0;
  Real h = 0;
  Real cell_volume = 0;  ///< dx*dy*h, m^3
  std::vector<Face> faces;

  int n_cells() const { return nx * ny; }
  int cell_index(int i, int j) const { return j * nx + i; }
  Real cell_center_x(int cell) const { return (cell % nx + Real(0.5)) * dx; }
  Real cell_center_y(int cell) const { return (cell / nx + Real(0.5)) * dy; }
};

/// Per-cell permeability in m^2, strictly positive.
struct PermField {
  Vector values;
};

Grid2D build_grid(int nx, int ny, Real dx, Real dy, Real h);

/// Half-cell conductance K*A/(mu*d). All arguments must be positive.
Real half_transmissibility(Real perm, Real area, Real dist, Real mu);

/// Series composition of the two half-cell conductances, ta*tb/(ta+tb).
/// Zero on either side blocks the face.
Real face_transmissibility(Real ta, Real tb);

/// One transmissibility per interior face, in the grid's face order.
/// For single-phase flow pass the fluid viscosity; for two-phase assembly
/// pass mu = 1 and fold viscosities into the phase mobilities.
Vector assemble_face_transmissibilities(const Grid2D& grid,
                                        const PermField& perm, Real mu);

}  // namespace sfv
