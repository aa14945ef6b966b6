#pragma once

#include "sfv/grid.hpp"

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace sfv {

using Rng = std::mt19937_64;

/// Normal(mean, stddev) restricted to [lower, upper], drawn by rejection.
struct TruncatedNormal {
  Real mean = 0;
  Real stddev = 1;
  Real lower = 0;
  Real upper = 1;
};

struct Uniform {
  Real lower = 0;
  Real upper = 1;
};

/// Two-branch mixture of uniforms; branch one is taken with probability w1.
struct UniformMixture {
  Real w1 = 0.5;
  Uniform u1;
  Uniform u2;
};

using ComponentDistribution =
    std::variant<TruncatedNormal, Uniform, UniformMixture>;

void validate(const ComponentDistribution& dist);
bool in_support(const ComponentDistribution& dist, Real value);

/// [0, 1) from the top 53 bits of the engine output.
inline Real uniform01(Rng& rng) {
  return static_cast<Real>(rng() >> 11) * 0x1.0p-53;
}

/// One standard normal draw (Box-Muller, stateless).
Real standard_normal(Rng& rng);

/// One draw from the component distribution, always inside its support.
Real sample_component(const ComponentDistribution& dist, Rng& rng);

/// Maps each physical cell to the parameter component controlling it.
/// The per-component cell sets partition the grid exactly.
struct FieldLayout {
  int n_components = 0;
  std::vector<int> cell_component;  ///< controlling component per cell
};

/// Two components split at x = x_split: component 0 controls cells with
/// centre x < x_split, component 1 the rest.
FieldLayout make_half_split_layout(const Grid2D& grid, Real x_split);

/// n_channels vertical strips of equal width; channel c controls columns
/// [c*nx/n_channels, (c+1)*nx/n_channels).
FieldLayout make_channel_layout(const Grid2D& grid, int n_channels);

/// N draws of the d-dimensional parameter vector, in millidarcy.
struct SampleSet {
  Matrix values;  ///< N x d
  std::uint64_t seed = 0;
  std::vector<ComponentDistribution> spec;

  int size() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

/// Deterministic for fixed (spec, n, seed); component j uses distribution j.
SampleSet draw_sample_set(const std::vector<ComponentDistribution>& spec,
                          int n, std::uint64_t seed);

/// Piecewise-constant permeability realization, converted from mD to m^2.
PermField realize_permeability(ConstVectorRef sample_md,
                               const FieldLayout& layout, const Grid2D& grid);

}  // namespace sfv
