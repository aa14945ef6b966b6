#include "sfv/solvers.hpp"

#include "sfv/random_fields.hpp"

#include <doctest.h>

#include <random>

using namespace sfv;

namespace {

Vector uniform_faces(const Grid2D& g, Real value) {
  return Vector::Constant(static_cast<Eigen::Index>(g.faces.size()), value);
}

}  // namespace

TEST_CASE("linear_solve basics") {
  SparseMatrix eye(3, 3);
  eye.setIdentity();
  Vector b(3);
  b << 4, -1, 0.5;
  CHECK((linear_solve(eye, b) - b).norm() == doctest::Approx(0.0));

  SparseMatrix a(2, 2);
  std::vector<Triplet> t{{0, 0, 2}, {0, 1, -1}, {1, 0, -1}, {1, 1, 2}};
  a.setFromTriplets(t.begin(), t.end());
  Vector rhs(2);
  rhs << 1, 0;
  const Vector x = linear_solve(a, rhs);
  CHECK(x[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK((a * x - rhs).norm() <= 1e-10 * rhs.norm());
}

TEST_CASE("linear_solve rejects a floating Laplacian") {
  SparseMatrix a(2, 2);
  std::vector<Triplet> t{{0, 0, 1}, {0, 1, -1}, {1, 0, -1}, {1, 1, 1}};
  a.setFromTriplets(t.begin(), t.end());
  Vector rhs(2);
  rhs << 1, 0;  // incompatible with the singular operator
  CHECK_THROWS_AS(linear_solve(a, rhs), std::runtime_error);
}

TEST_CASE("solve_elliptic on a three-cell strip") {
  const Grid2D g = build_grid(3, 1, 1, 1, 1);
  const BoundarySpec bc{{0, 0.0, {}}, {2, 1.0, {}}};
  const Vector p = solve_elliptic(g, uniform_faces(g, 2.5), bc);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[2] == 1.0);
}

TEST_CASE("solve_elliptic is invariant under scaling every face") {
  const Grid2D g = build_grid(6, 5, 10, 10, 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-14, 1e-12);
  Vector t(static_cast<Eigen::Index>(g.faces.size()));
  for (Eigen::Index f = 0; f < t.size(); ++f) t[f] = u(rng);
  const BoundarySpec bc{{0, 1.0, {}}, {g.n_cells() - 1, 0.0, {}}};
  const Vector p1 = solve_elliptic(g, t, bc);
  const Vector p2 = solve_elliptic(g, Vector(1e9 * t), bc);
  for (int c = 0; c < g.n_cells(); ++c)
    CHECK(p2[c] == doctest::Approx(p1[c]).epsilon(1e-11));
}

TEST_CASE("solve_elliptic satisfies the discrete maximum principle") {
  const Grid2D g = build_grid(20, 20, 10, 10, 1);
  const BoundarySpec bc{{0, 1.0, {}}, {g.n_cells() - 1, 0.0, {}}};
  const Vector p = solve_elliptic(g, uniform_faces(g, 3e-13), bc);
  CHECK(p.minCoeff() >= -1e-10);
  CHECK(p.maxCoeff() <= 1 + 1e-10);
}

TEST_CASE("solve_elliptic flux balance at unconstrained cells") {
  const Grid2D g = build_grid(5, 4, 10, 10, 1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(1e-13, 1e-11);
  Vector t(static_cast<Eigen::Index>(g.faces.size()));
  for (Eigen::Index f = 0; f < t.size(); ++f) t[f] = u(rng);
  const BoundarySpec bc{{2, 5.0, {}}, {17, -1.0, {}}};
  const Vector p = solve_elliptic(g, t, bc);
  Vector net = Vector::Zero(g.n_cells());
  for (std::size_t f = 0; f < g.faces.size(); ++f) {
    const auto& face = g.faces[f];
    const Real flux = t[static_cast<Eigen::Index>(f)] * (p[face.a] - p[face.b]);
    net[face.b] += flux;
    net[face.a] -= flux;
  }
  const Real scale = t.maxCoeff() * 6.0;
  for (int c = 0; c < g.n_cells(); ++c)
    if (c != 2 && c != 17) CHECK(std::abs(net[c]) <= 1e-10 * scale);
}

TEST_CASE("solve_elliptic singular configurations") {
  const Grid2D g = build_grid(3, 1, 1, 1, 1);
  CHECK_THROWS_AS(solve_elliptic(g, uniform_faces(g, 1), {}),
                  SingularSystemError);

  // blocking the middle face strands cell 2
  Vector t = uniform_faces(g, 1);
  t[1] = 0;
  const BoundarySpec bc{{0, 1.0, {}}};
  CHECK_THROWS_AS(solve_elliptic(g, t, bc), SingularSystemError);
}

TEST_CASE("step_parabolic holds a uniform no-well state") {
  const Grid2D g = build_grid(4, 4, 10, 10, 1);
  SimState s;
  s.pressure = Vector::Constant(g.n_cells(), 3e7);
  const Vector accum = Vector::Constant(g.n_cells(), 5e-4);
  const SimState next =
      step_parabolic(s, g, uniform_faces(g, 1e-12), accum, {}, 100.0);
  for (int c = 0; c < g.n_cells(); ++c)
    CHECK(next.pressure[c] == doctest::Approx(3e7).epsilon(1e-12));
  CHECK(next.time == doctest::Approx(100.0));
}

TEST_CASE("step_parabolic single-cell well matches the closed form") {
  const Grid2D g = build_grid(1, 1, 10, 10, 1);
  const Real phi = 0.1, ct = 5e-8, dt = 1e5;
  const Real a = g.cell_volume * phi * ct / dt;
  const WellSpec well{0, 3e-11, 2e7};
  SimState s;
  s.pressure = Vector::Constant(1, 3e7);
  Real expected = 3e7;
  for (int step = 0; step < 120; ++step) {
    s = step_parabolic(s, g, Vector(0), Vector::Constant(1, a), {well}, dt);
    expected = (a * expected + well.pi * well.bhp) / (a + well.pi);
    CHECK(s.pressure[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("step_parabolic conserves mass against the well source") {
  const Grid2D g = build_grid(6, 6, 10, 10, 1);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(1e-13, 1e-11);
  Vector t(static_cast<Eigen::Index>(g.faces.size()));
  for (Eigen::Index f = 0; f < t.size(); ++f) t[f] = u(rng);
  const Vector accum = Vector::Constant(g.n_cells(), 1e-4 / 1e5 * 100);
  const WellSpec well{0, 5e-11, 2e7};
  SimState s;
  s.pressure = Vector::Constant(g.n_cells(), 3e7);
  for (int step = 0; step < 20; ++step) {
    const SimState next = step_parabolic(s, g, t, accum, {well}, 1e5);
    const Real stored =
        (accum.array() * (next.pressure - s.pressure).array()).sum();
    const Real injected = well.pi * (well.bhp - next.pressure[0]);
    CHECK(stored == doctest::Approx(injected).epsilon(1e-10));
    s = next;
  }
}

TEST_CASE("step_parabolic declines monotonically toward bhp") {
  const Grid2D g = build_grid(5, 5, 10, 10, 1);
  const Vector t = uniform_faces(g, 1e-12);
  const Vector accum = Vector::Constant(g.n_cells(), 1e-7);
  const WellSpec well{12, 1e-10, 2e7};
  SimState s;
  s.pressure = Vector::Constant(g.n_cells(), 3e7);
  Real prev = s.pressure[12];
  for (int step = 0; step < 30; ++step) {
    s = step_parabolic(s, g, t, accum, {well}, 1e5);
    CHECK(s.pressure[12] <= prev + 1e-9);
    CHECK(s.pressure[12] >= well.bhp - 1e-6);
    prev = s.pressure[12];
  }
}

TEST_CASE("step_parabolic input validation") {
  const Grid2D g = build_grid(2, 1, 1, 1, 1);
  SimState s;
  s.pressure = Vector::Constant(2, 1e7);
  const Vector t = uniform_faces(g, 1e-12);
  CHECK_THROWS_AS(step_parabolic(s, g, t, Vector::Zero(2), {}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(step_parabolic(s, g, t, Vector::Constant(2, 1e-7), {}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      step_parabolic(s, g, t, Vector::Constant(2, 1e-7), {{5, 1e-11, 0}}, 1.0),
      std::invalid_argument);
}

TEST_CASE("relperm endpoints and midpoint") {
  FluidRockProps props;
  props.s_iw = 0.2;
  CHECK(relperm(0.2, props) == std::pair<Real, Real>{0.0, 1.0});
  CHECK(relperm(1.0, props) == std::pair<Real, Real>{1.0, 0.0});
  const auto [krw, krn] = relperm(0.6, props);
  CHECK(krw == doctest::Approx(0.25));
  CHECK(krn == doctest::Approx(0.25));

  long clamps = 0;
  relperm(0.1, props, &clamps);
  relperm(1.2, props, &clamps);
  relperm(0.5, props, &clamps);
  CHECK(clamps == 2);
}

TEST_CASE("well_rate") {
  const WellSpec w{0, 1e-9, 2e7};
  CHECK(well_rate(2e7, w) == 0.0);
  CHECK(well_rate(3e7, w) == doctest::Approx(0.01));
  const WellSpec w2{0, 2e-9, 2e7};
  CHECK(well_rate(3e7, w2) == doctest::Approx(2 * well_rate(3e7, w)));
}

TEST_CASE("impes_step keeps a uniform zero-flux state") {
  const Grid2D g = build_grid(3, 3, 10, 10, 1);
  FluidRockProps props;
  props.porosity = 0.2;
  props.mu_w = 1e-3;
  props.mu_n = 1.8e-3;
  props.s_iw = 0.2;
  props.c_w = 1e-9;  // compressible so the no-bc system stays regular
  SimState s;
  s.pressure = Vector::Constant(g.n_cells(), 2.6e7);
  s.saturation_w = Vector::Constant(g.n_cells(), 0.5);
  const SimState next =
      impes_step(s, g, uniform_faces(g, 1e-14), props, {}, 3600.0);
  for (int c = 0; c < g.n_cells(); ++c) {
    CHECK(next.pressure[c] == doctest::Approx(2.6e7).epsilon(1e-12));
    CHECK(next.saturation_w[c] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("impes_step two-cell upwind transport") {
  const Grid2D g = build_grid(2, 1, 10, 10, 1);
  FluidRockProps props;
  props.porosity = 0.2;
  props.mu_w = 1e-3;
  props.mu_n = 1.8e-3;
  props.s_iw = 0.2;
  const BoundarySpec bc{{0, 2e6, {}}, {1, 1e6, {}}};
  SimState s;
  s.pressure = Vector(2);
  s.pressure << 2e6, 1e6;
  s.saturation_w = Vector(2);
  s.saturation_w << 1.0, 0.2;  // water only on the high-pressure side

  ImpesReport report;
  const SimState next =
      impes_step(s, g, uniform_faces(g, 5e-14), props, bc, 36000.0, &report);
  CHECK(next.saturation_w[1] > 0.2);
  // boundary feed at f_w(S=1)=1 balances the water leaving the left cell
  CHECK(next.saturation_w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.boundary_rates.size() == 2);
  CHECK(report.boundary_rates[0] > 0);   // inflow through the left cell
  CHECK(report.boundary_rates[1] < 0);   // outflow through the right cell
  CHECK(report.boundary_rates[0] + report.boundary_rates[1] ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("impes_step pinned inflow cell saturates immediately") {
  const Grid2D g = build_grid(3, 1, 10, 10, 1);
  FluidRockProps props;
  props.porosity = 0.2;
  props.mu_w = 1e-3;
  props.mu_n = 1.8e-3;
  props.s_iw = 0.2;
  const BoundarySpec bc{{0, 3e7, 1.0}, {2, 2.6e7, {}}};
  SimState s;
  s.pressure = Vector(3);
  s.pressure << 3e7, 2.6e7, 2.6e7;
  s.saturation_w = Vector::Constant(3, 0.2);
  const SimState next =
      impes_step(s, g, uniform_faces(g, 5e-14), props, bc, 36000.0);
  CHECK(next.saturation_w[0] == 1.0);
}

TEST_CASE("impes_step incompressible boundary fluxes balance") {
  const Grid2D g = build_grid(5, 5, 10, 10, 1);
  FluidRockProps props;
  props.porosity = 0.2;
  props.mu_w = 1e-3;
  props.mu_n = 1.8e-3;
  props.s_iw = 0.2;
  const BoundarySpec bc{{g.n_cells() - 1, 3e7, 1.0}, {0, 2.6e7, {}}};

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(2e-15, 6e-14);
  Vector t(static_cast<Eigen::Index>(g.faces.size()));
  for (Eigen::Index f = 0; f < t.size(); ++f) t[f] = u(rng);

  SimState s;
  s.pressure = Vector::Constant(g.n_cells(), 2.6e7);
  s.pressure[g.n_cells() - 1] = 3e7;
  s.saturation_w = Vector::Constant(g.n_cells(), 0.2);

  ImpesReport report;
  for (int step = 0; step < 50; ++step) {
    s = impes_step(s, g, t, props, bc, 20000.0, &report);
    Real in = 0, out = 0;
    for (Real r : report.boundary_rates) (r > 0 ? in : out) += r;
    CHECK(in + out == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(std::abs(in + out) <= 1e-8 * std::max(in, -out));
    CHECK_FALSE(report.cfl_violated);
  }
}

TEST_CASE("impes_step flags a CFL violation for an oversized step") {
  const Grid2D g = build_grid(2, 1, 10, 10, 1);
  FluidRockProps props;
  props.porosity = 0.2;
  props.mu_w = 1e-3;
  props.mu_n = 1.8e-3;
  props.s_iw = 0.2;
  const BoundarySpec bc{{0, 3e7, 1.0}, {1, 2.6e7, {}}};
  SimState s;
  s.pressure = Vector(2);
  s.pressure << 3e7, 2.6e7;
  s.saturation_w = Vector(2);
  s.saturation_w << 1.0, 0.2;
  ImpesReport report;
  impes_step(s, g, uniform_faces(g, 5e-14), props, bc, 5e6, &report);
  CHECK(report.cfl_violated);
}

TEST_CASE("impes_step without constraints or compressibility is singular") {
  const Grid2D g = build_grid(2, 1, 10, 10, 1);
  FluidRockProps props;
  props.porosity = 0.2;
  props.mu_w = 1e-3;
  props.mu_n = 1.8e-3;
  props.s_iw = 0.2;
  SimState s;
  s.pressure = Vector::Constant(2, 1e7);
  s.saturation_w = Vector::Constant(2, 0.5);
  CHECK_THROWS_AS(impes_step(s, g, uniform_faces(g, 1e-14), props, {}, 100.0),
                  SingularSystemError);
}
