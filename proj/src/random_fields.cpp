#include "sfv/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sfv {

namespace {

constexpr long kMaxRejections = 1'000'000;

struct Validator {
  void operator()(const TruncatedNormal& d) const {
    if (!(d.stddev > 0))
      throw std::invalid_argument("truncated normal: stddev must be > 0");
    if (!(d.lower < d.upper))
      throw std::invalid_argument("truncated normal: requires lower < upper");
  }
  void operator()(const Uniform& d) const {
    if (!(d.lower < d.upper))
      throw std::invalid_argument("uniform: requires lower < upper");
  }
  void operator()(const UniformMixture& d) const {
    if (!(d.w1 > 0) || !(d.w1 < 1))
      throw std::invalid_argument("mixture: weight must be in (0, 1)");
    (*this)(d.u1);
    (*this)(d.u2);
  }
};

struct SupportCheck {
  Real v;
  bool operator()(const TruncatedNormal& d) const {
    return v >= d.lower && v <= d.upper;
  }
  bool operator()(const Uniform& d) const {
    return v >= d.lower && v <= d.upper;
  }
  bool operator()(const UniformMixture& d) const {
    return (*this)(d.u1) || (*this)(d.u2);
  }
};

Real draw_uniform(const Uniform& d, Rng& rng) {
  return d.lower + (d.upper - d.lower) * uniform01(rng);
}

struct Sampler {
  Rng& rng;
  Real operator()(const TruncatedNormal& d) const {
    for (long i = 0; i < kMaxRejections; ++i) {
      const Real v = d.mean + d.stddev * standard_normal(rng);
      if (v >= d.lower && v <= d.upper) return v;
    }
    throw ConvergenceFailure(
        "truncated normal: rejection cap reached; support [" +
        std::to_string(d.lower) + ", " + std::to_string(d.upper) +
        "] carries almost no mass");
  }
  Real operator()(const Uniform& d) const { return draw_uniform(d, rng); }
  Real operator()(const UniformMixture& d) const {
    return uniform01(rng) < d.w1 ? draw_uniform(d.u1, rng)
                                 : draw_uniform(d.u2, rng);
  }
};

}  // namespace

void validate(const ComponentDistribution& dist) {
  std::visit(Validator{}, dist);
}

bool in_support(const ComponentDistribution& dist, Real value) {
  return std::visit(SupportCheck{value}, dist);
}

Real standard_normal(Rng& rng) {
  const Real u1 = 1.0 - uniform01(rng);  // (0, 1], keeps log finite
  const Real u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Real sample_component(const ComponentDistribution& dist, Rng& rng) {
  validate(dist);
  return std::visit(Sampler{rng}, dist);
}

FieldLayout make_half_split_layout(const Grid2D& grid, Real x_split) {
  FieldLayout layout;
  layout.n_components = 2;
  layout.cell_component.resize(static_cast<std::size_t>(grid.n_cells()));
  int left = 0;
  for (int c = 0; c < grid.n_cells(); ++c) {
    const bool is_left = grid.cell_center_x(c) < x_split;
    layout.cell_component[static_cast<std::size_t>(c)] = is_left ? 0 : 1;
    left += is_left;
  }
  if (left == 0 || left == grid.n_cells())
    throw std::invalid_argument("half-split layout: x_split=" +
                                std::to_string(x_split) +
                                " leaves one half of the domain empty");
  return layout;
}

FieldLayout make_channel_layout(const Grid2D& grid, int n_channels) {
  if (n_channels < 1 || grid.nx % n_channels != 0)
    throw std::invalid_argument(
        "channel layout: nx must be a positive multiple of the channel count");
  const int width = grid.nx / n_channels;
  FieldLayout layout;
  layout.n_components = n_channels;
  layout.cell_component.resize(static_cast<std::size_t>(grid.n_cells()));
  for (int c = 0; c < grid.n_cells(); ++c)
    layout.cell_component[static_cast<std::size_t>(c)] = (c % grid.nx) / width;
  return layout;
}

SampleSet draw_sample_set(const std::vector<ComponentDistribution>& spec,
                          int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_sample_set: need n >= 1");
  if (spec.empty())
    throw std::invalid_argument("draw_sample_set: need at least one component");
  for (const auto& dist : spec) validate(dist);

  SampleSet set;
  set.seed = seed;
  set.spec = spec;
  set.values.resize(n, static_cast<Eigen::Index>(spec.size()));
  Rng rng(seed);
  for (int m = 0; m < n; ++m)
    for (std::size_t j = 0; j < spec.size(); ++j)
      set.values(m, static_cast<Eigen::Index>(j)) =
          sample_component(spec[j], rng);
  return set;
}

PermField realize_permeability(ConstVectorRef sample_md,
                               const FieldLayout& layout, const Grid2D& grid) {
  if (static_cast<int>(layout.cell_component.size()) != grid.n_cells())
    throw std::invalid_argument("realize_permeability: layout built for a different grid");
  if (sample_md.size() != layout.n_components)
    throw std::invalid_argument(
        "realize_permeability: sample has " + std::to_string(sample_md.size()) +
        " components, layout expects " + std::to_string(layout.n_components));

  PermField field;
  field.values.resize(grid.n_cells());
  for (int c = 0; c < grid.n_cells(); ++c)
    field.values[c] = millidarcy_to_m2(
        sample_md[layout.cell_component[static_cast<std::size_t>(c)]]);
  return field;
}

}  // namespace sfv
