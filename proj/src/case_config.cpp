#include "sfv/case_config.hpp"

#include "sfv/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sfv {

namespace {

using nlohmann::json;

int parse_cell(const json& node, const Grid2D& grid, const char* what) {
  int cell = -1;
  if (node.is_array()) {
    if (node.size() != 2)
      throw std::invalid_argument(std::string(what) +
                                  ": cell must be [ix, iy] or a flat index");
    const int i = node[0].get<int>();
    const int j = node[1].get<int>();
    if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny)
      throw std::invalid_argument(std::string(what) + ": cell (" +
                                  std::to_string(i) + ", " + std::to_string(j) +
                                  ") outside the grid");
    cell = grid.cell_index(i, j);
  } else {
    cell = node.get<int>();
    if (cell < 0 || cell >= grid.n_cells())
      throw std::invalid_argument(std::string(what) + ": cell index " +
                                  std::to_string(cell) + " outside the grid");
  }
  return cell;
}

ComponentDistribution parse_component(const json& node) {
  const std::string kind = node.at("kind").get<std::string>();
  if (kind == "truncated-normal") {
    TruncatedNormal d;
    d.mean = node.at("mean").get<Real>();
    d.stddev = node.at("std").get<Real>();
    d.lower = node.at("lower").get<Real>();
    d.upper = node.at("upper").get<Real>();
    return d;
  }
  if (kind == "uniform") {
    Uniform d;
    d.lower = node.at("lower").get<Real>();
    d.upper = node.at("upper").get<Real>();
    return d;
  }
  if (kind == "uniform-mixture") {
    UniformMixture d;
    d.w1 = node.at("w1").get<Real>();
    d.u1 = {node.at("u1").at("lower").get<Real>(),
            node.at("u1").at("upper").get<Real>()};
    d.u2 = {node.at("u2").at("lower").get<Real>(),
            node.at("u2").at("upper").get<Real>()};
    return d;
  }
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

}  // namespace

CaseSpec load_case(const std::filesystem::path& path,
                   const CaseOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open case file " + path.string());
  json root;
  try {
    root = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("case file " + path.string() + ": " + e.what());
  }

  CaseSpec spec;
  spec.name = root.value("name", path.stem().string());

  const std::string kind = root.at("kind").get<std::string>();
  if (kind == "elliptic")
    spec.kind = CaseKind::Elliptic;
  else if (kind == "parabolic")
    spec.kind = CaseKind::Parabolic;
  else if (kind == "twophase")
    spec.kind = CaseKind::TwoPhase;
  else
    throw std::invalid_argument("unknown case kind '" + kind + "'");

  const json& g = root.at("grid");
  const Real h = overrides.thickness.value_or(g.value("h", Real(1)));
  spec.grid = build_grid(g.at("nx").get<int>(), g.at("ny").get<int>(),
                         g.at("dx").get<Real>(), g.at("dy").get<Real>(), h);

  const json& layout = root.at("layout");
  const std::string layout_kind = layout.at("kind").get<std::string>();
  if (layout_kind == "half-split") {
    spec.layout_spec.kind = LayoutSpec::Kind::HalfSplit;
    spec.layout_spec.x_split = layout.value(
        "x_split", spec.grid.nx * spec.grid.dx / 2);
    spec.layout = make_half_split_layout(spec.grid, spec.layout_spec.x_split);
  } else if (layout_kind == "channels") {
    spec.layout_spec.kind = LayoutSpec::Kind::Channels;
    spec.layout_spec.n_channels = layout.at("count").get<int>();
    spec.layout = make_channel_layout(spec.grid, spec.layout_spec.n_channels);
  } else {
    throw std::invalid_argument("unknown layout kind '" + layout_kind + "'");
  }

  for (const json& c : root.at("components")) {
    ComponentDistribution dist = parse_component(c);
    validate(dist);
    spec.components.push_back(std::move(dist));
  }
  if (static_cast<int>(spec.components.size()) != spec.layout.n_components)
    throw std::invalid_argument(
        "case file declares " + std::to_string(spec.components.size()) +
        " components but the layout needs " +
        std::to_string(spec.layout.n_components));

  const json& fluid = root.at("fluid");
  spec.props.porosity = fluid.value("porosity", Real(0));
  spec.props.c_t = fluid.value("total_compressibility", Real(0));
  spec.props.c_r = fluid.value("c_r", Real(0));
  spec.props.c_w = fluid.value("c_w", Real(0));
  spec.props.c_n = fluid.value("c_n", Real(0));
  spec.props.mu = fluid.value("viscosity", Real(0));
  spec.props.mu_w = fluid.value("mu_w", Real(0));
  spec.props.mu_n = fluid.value("mu_n", Real(0));
  spec.props.s_iw = fluid.value("s_iw", Real(0));

  for (const json& w : root.value("wells", json::array())) {
    WellConfig well;
    well.cell = parse_cell(w.at("cell"), spec.grid, "well");
    well.bhp = w.at("bhp").get<Real>();
    if (w.contains("pi")) well.pi = w.at("pi").get<Real>();
    if (overrides.pi) well.pi = *overrides.pi;
    spec.wells.push_back(well);
  }

  for (const json& b : root.value("bc", json::array())) {
    DirichletCell d;
    d.cell = parse_cell(b.at("cell"), spec.grid, "bc");
    d.pressure = b.at("pressure").get<Real>();
    if (b.contains("inflow_saturation"))
      d.inflow_saturation = b.at("inflow_saturation").get<Real>();
    spec.bc.push_back(d);
  }

  spec.initial_pressure = root.value("initial_pressure", Real(0));
  spec.dt = root.value("dt", Real(0));
  spec.n_steps = root.value("steps", 0);
  spec.cfl_limit = root.value("cfl_limit", Real(0.2));

  const json& q = root.at("qoi");
  const std::string qoi_kind = q.at("kind").get<std::string>();
  if (qoi_kind == "cell-pressure") {
    spec.qoi.kind = QoIKind::CellPressure;
    spec.qoi.cell = parse_cell(q.at("cell"), spec.grid, "qoi");
  } else if (qoi_kind == "accumulated-production") {
    spec.qoi.kind = QoIKind::AccumulatedProduction;
  } else if (qoi_kind == "swept-volume") {
    spec.qoi.kind = QoIKind::SweptVolume;
    spec.qoi.s_iw = spec.props.s_iw;
    spec.qoi.include_porosity = overrides.swept_include_porosity.value_or(
        root.value("swept_include_porosity", false));
    spec.qoi.porosity = spec.props.porosity;
  } else {
    throw std::invalid_argument("unknown qoi kind '" + qoi_kind + "'");
  }

  if (spec.kind != CaseKind::Elliptic) {
    if (!(spec.dt > 0) || spec.n_steps < 0)
      throw std::invalid_argument("transient case needs dt > 0 and steps >= 0");
  }
  if (spec.kind == CaseKind::Elliptic && spec.bc.empty())
    throw std::invalid_argument("elliptic case needs Dirichlet constraints");
  if (spec.kind == CaseKind::Parabolic && !(spec.props.mu > 0))
    throw std::invalid_argument("parabolic case needs a viscosity");
  if (spec.kind == CaseKind::TwoPhase &&
      (!(spec.props.mu_w > 0) || !(spec.props.mu_n > 0)))
    throw std::invalid_argument("twophase case needs both phase viscosities");
  return spec;
}

std::string case_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open case file " + path.string());
  std::uint64_t hash = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

Real std_normal_pdf(Real x) {
  return std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi);
}

Real std_normal_cdf(Real x) { return std::erfc(-x / std::sqrt(Real(2))) / 2; }

struct MeanVisitor {
  Real operator()(const TruncatedNormal& d) const {
    const Real alpha = (d.lower - d.mean) / d.stddev;
    const Real beta = (d.upper - d.mean) / d.stddev;
    const Real z = std_normal_cdf(beta) - std_normal_cdf(alpha);
    return d.mean +
           d.stddev * (std_normal_pdf(alpha) - std_normal_pdf(beta)) / z;
  }
  Real operator()(const Uniform& d) const { return (d.lower + d.upper) / 2; }
  Real operator()(const UniformMixture& d) const {
    return d.w1 * (d.u1.lower + d.u1.upper) / 2 +
           (1 - d.w1) * (d.u2.lower + d.u2.upper) / 2;
  }
};

std::string describe_component(const ComponentDistribution& dist) {
  struct V {
    std::string operator()(const TruncatedNormal& d) const {
      return "truncated-normal(mean=" + format_real(d.mean) +
             ", std=" + format_real(d.stddev) + ", [" + format_real(d.lower) +
             ", " + format_real(d.upper) + "])";
    }
    std::string operator()(const Uniform& d) const {
      return "uniform(" + format_real(d.lower) + ", " + format_real(d.upper) +
             ")";
    }
    std::string operator()(const UniformMixture& d) const {
      return "mixture(" + format_real(d.w1) + "*uniform(" +
             format_real(d.u1.lower) + ", " + format_real(d.u1.upper) + ") + " +
             format_real(1 - d.w1) + "*uniform(" + format_real(d.u2.lower) +
             ", " + format_real(d.u2.upper) + "))";
    }
  };
  return std::visit(V{}, dist);
}

}  // namespace

Real distribution_mean(const ComponentDistribution& dist) {
  return std::visit(MeanVisitor{}, dist);
}

std::string describe_case(const CaseSpec& spec) {
  std::ostringstream out;
  out << "case: " << spec.name << "\n";
  out << "kind: "
      << (spec.kind == CaseKind::Elliptic
              ? "elliptic"
              : spec.kind == CaseKind::Parabolic ? "parabolic" : "twophase")
      << "\n";
  out << "grid: " << spec.grid.nx << "x" << spec.grid.ny
      << ", dx=" << format_real(spec.grid.dx)
      << " m, dy=" << format_real(spec.grid.dy)
      << " m, h=" << format_real(spec.grid.h)
      << " m, cell volume=" << format_real(spec.grid.cell_volume) << " m^3\n";
  out << "layout: ";
  if (spec.layout_spec.kind == LayoutSpec::Kind::HalfSplit)
    out << "half-split at x=" << format_real(spec.layout_spec.x_split)
        << " m\n";
  else
    out << spec.layout_spec.n_channels << " vertical channels\n";
  out << "components (mD):\n";
  for (std::size_t j = 0; j < spec.components.size(); ++j)
    out << "  y" << j + 1 << ": " << describe_component(spec.components[j])
        << "\n";
  out << "fluid: porosity=" << format_real(spec.props.porosity);
  if (spec.kind == CaseKind::TwoPhase)
    out << ", mu_w=" << format_real(spec.props.mu_w)
        << " Pa.s, mu_n=" << format_real(spec.props.mu_n)
        << " Pa.s, s_iw=" << format_real(spec.props.s_iw) << ", c_r="
        << format_real(spec.props.c_r) << ", c_w=" << format_real(spec.props.c_w)
        << ", c_n=" << format_real(spec.props.c_n) << " 1/Pa";
  else
    out << ", viscosity=" << format_real(spec.props.mu)
        << " Pa.s, c_t=" << format_real(spec.props.c_t) << " 1/Pa";
  out << "\n";
  for (const auto& w : spec.wells) {
    out << "well: cell " << w.cell << ", bhp=" << format_real(w.bhp) << " Pa, ";
    if (w.pi) {
      out << "PI=" << format_real(*w.pi) << " m^3/(Pa.s)\n";
    } else {
      const int comp =
          spec.layout.cell_component[static_cast<std::size_t>(w.cell)];
      const Real k_mean = millidarcy_to_m2(distribution_mean(
          spec.components[static_cast<std::size_t>(comp)]));
      out << "PI=peaceman-default (per-sample; "
          << format_real(peaceman_pi(k_mean, spec.grid.h, spec.props.mu,
                                     spec.grid.dx))
          << " m^3/(Pa.s) at the mean permeability)\n";
    }
  }
  for (const auto& b : spec.bc) {
    out << "bc: cell " << b.cell << ", p=" << format_real(b.pressure) << " Pa";
    if (b.inflow_saturation)
      out << ", inflow saturation " << format_real(*b.inflow_saturation);
    out << "\n";
  }
  if (spec.kind != CaseKind::Elliptic)
    out << "schedule: " << spec.n_steps << " steps, dt=" << format_real(spec.dt)
        << " s, initial pressure=" << format_real(spec.initial_pressure)
        << " Pa\n";
  out << "qoi: ";
  switch (spec.qoi.kind) {
    case QoIKind::CellPressure:
      out << "pressure at cell " << spec.qoi.cell << "\n";
      break;
    case QoIKind::AccumulatedProduction:
      out << "accumulated production\n";
      break;
    case QoIKind::SweptVolume:
      out << "swept volume (s_iw=" << format_real(spec.qoi.s_iw)
          << (spec.qoi.include_porosity ? ", pore-volume basis" : "") << ")\n";
      break;
  }
  return out.str();
}

}  // namespace sfv
