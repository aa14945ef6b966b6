#include "sfv/grid.hpp"

#include <string>

namespace sfv {

Grid2D build_grid(int nx, int ny, Real dx, Real dy, Real h) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_grid: cell counts must be >= 1");
  if (!(dx > 0) || !(dy > 0) || !(h > 0))
    throw std::invalid_argument("build_grid: cell dimensions must be > 0");

  Grid2D g;
  g.nx = nx;
  g.ny = ny;
  g.dx = dx;
  g.dy = dy;
  g.h = h;
  g.cell_volume = dx * dy * h;
  g.faces.reserve(static_cast<std::size_t>(ny) * (nx - 1) +
                  static_cast<std::size_t>(nx) * (ny - 1));

  // Faces between x-neighbours, then between y-neighbours.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i)
      g.faces.push_back({g.cell_index(i, j), g.cell_index(i + 1, j),
                         dy * h, dx / 2, dx / 2});
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i)
      g.faces.push_back({g.cell_index(i, j), g.cell_index(i, j + 1),
                         dx * h, dy / 2, dy / 2});
  return g;
}

Real half_transmissibility(Real perm, Real area, Real dist, Real mu) {
  if (!(perm > 0) || !(area > 0) || !(dist > 0) || !(mu > 0))
    throw std::invalid_argument("half_transmissibility: inputs must be > 0");
  return perm * area / (mu * dist);
}

Real face_transmissibility(Real ta, Real tb) {
  if (ta < 0 || tb < 0)
    throw std::invalid_argument("face_transmissibility: inputs must be >= 0");
  if (ta == 0 || tb == 0) return 0;
  return ta * tb / (ta + tb);
}

Vector assemble_face_transmissibilities(const Grid2D& grid,
                                        const PermField& perm, Real mu) {
  if (perm.values.size() != grid.n_cells())
    throw std::invalid_argument(
        "assemble_face_transmissibilities: permeability field has " +
        std::to_string(perm.values.size()) + " values for " +
        std::to_string(grid.n_cells()) + " cells");
  if (!(mu > 0))
    throw std::invalid_argument(
        "assemble_face_transmissibilities: viscosity must be > 0");

  Vector t(static_cast<Eigen::Index>(grid.faces.size()));
  for (std::size_t f = 0; f < grid.faces.size(); ++f) {
    const Face& face = grid.faces[f];
    const Real ta =
        half_transmissibility(perm.values[face.a], face.area, face.da, mu);
    const Real tb =
        half_transmissibility(perm.values[face.b], face.area, face.db, mu);
    t[static_cast<Eigen::Index>(f)] = face_transmissibility(ta, tb);
  }
  return t;
}

}  // namespace sfv
