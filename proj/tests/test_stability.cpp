#include <doctest.h>

#include <cmath>

#include "fjnet/integrate.hpp"
#include "fjnet/stability.hpp"
#include "support.hpp"

using namespace fjnet;

TEST_CASE("diffusion condition on a uniform cable is the FTCS limit") {
  const NetworkMesh m = testing::uniform_cable(11, 0.1);
  CHECK(check_diffusion(m, 1.0, 0.005).pass());
  CHECK_FALSE(check_diffusion(m, 1.0, 0.00501).pass());
  const StabilityReport r = check_diffusion(m, 2.0, 0.001);
  CHECK(r.dt_max == doctest::Approx(0.01 / 4.0).epsilon(1e-12));
  CHECK(r.alpha_beta == doctest::Approx(2.0 * 2.0 * 0.001 / 0.01).epsilon(1e-12));
}

TEST_CASE("diffusion condition at a degree-3 node with equal spacing") {
  const NetworkMesh m = testing::fork(0.2);
  const double h2 = 0.04;
  // alpha beta = 2 D dt / h^2 at every node
  CHECK(check_diffusion(m, 1.0, 0.5 * h2).pass());
  CHECK_FALSE(check_diffusion(m, 1.0, 0.5 * h2 * 1.001).pass());
  CHECK(check_diffusion(m, 1.0, 1e-4).dt_max == doctest::Approx(0.5 * h2).epsilon(1e-12));
  CHECK_FALSE(check_diffusion(m, 1.0, 1e-4).extrapolated);
}

TEST_CASE("degree > 3 results are labelled extrapolated") {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  nodes.push_back({0, {0, 0, 0}, 1.0});
  nodes.push_back({1, {1, 0, 0}, 1.0});
  edges.push_back({0, 1, std::nullopt});
  for (int k = 2; k < 6; ++k) {
    nodes.push_back({k, {2, static_cast<double>(k), 0}, 1.0});
    edges.push_back({1, k, 1.0});
  }
  const StabilityReport r = check_diffusion(NetworkMesh(nodes, edges, 0), 1.0, 0.1);
  CHECK(r.extrapolated);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("advection condition on a uniform cable") {
  // single path, w = 2 D R'/R: 1 + A0 - A1 + A2 = 1 - 4 w dt / h
  const double lambda = 0.1;
  const NetworkMesh m = make_cable(0.0, 2.0, 21, [&](double x) { return 1.0 + lambda * x; });
  const ModelSpec fj{ModelKind::FickJacobs, 1.0, 1.0};
  // the smallest radius (largest w) binds: dt_max = h / (2 w)
  const double w0 = 2.0 * lambda / 1.01;
  const StabilityReport r = check_advection(m, RadiusProfile(Cone{lambda}), fj, 1e-3);
  CHECK(r.pass());
  CHECK(r.dt_max == doctest::Approx(0.1 / (2.0 * w0)).epsilon(1e-10));
  CHECK(r.binding_node == 1);
  CHECK_FALSE(check_advection(m, RadiusProfile(Cone{lambda}), fj, r.dt_max * 1.01).pass());
  CHECK(check_advection(m, RadiusProfile(Cone{lambda}), fj, r.dt_max).pass());
}

TEST_CASE("flat radius is trivially advection-stable") {
  const StabilityReport r =
      check_advection(testing::uniform_cable(5, 0.1), RadiusProfile{}, {ModelKind::FickJacobs, 1.0, 1.0}, 10.0);
  CHECK(r.pass());
  CHECK(std::isinf(r.dt_max));
}

TEST_CASE("two symmetric wind-side paths halve the advection limit") {
  // node 1 sees the same geometry down each arm as a cable would down its one path
  const std::vector<double> radii = {1.0, 1.0, 1.5, 1.5, 2.0, 2.0};
  const NetworkMesh f = testing::fork(1.0, radii);
  const std::vector<double> arm = {1.0, 1.0, 1.5, 2.0};
  const NetworkMesh c = make_cable(0.0, 3.0, 4, [&](double x) { return arm[static_cast<std::size_t>(std::lround(x))]; });
  const ModelSpec fj{ModelKind::FickJacobs, 1.0, 1.0};
  const LinearRows af = assemble_advection(f, RadiusProfile{}, fj);
  const LinearRows ac = assemble_advection(c, RadiusProfile{}, fj);
  CHECK(testing::entry(af.matrix, 1, 1) == doctest::Approx(2.0 * testing::entry(ac.matrix, 1, 1)));
}

TEST_CASE("stability is monotone in dt") {
  const NetworkMesh m = make_cable(0.0, 10.0, 81, [](double x) { return 1.0 + 0.5 * x; });
  const RadiusProfile p(Cone{0.5});
  for (ModelKind k : {ModelKind::FickJacobs, ModelKind::ExpandedFlux, ModelKind::Zwanzig}) {
    const ModelSpec s{k, 1.0, 1.0};
    const double dt_max = check_model(m, p, s, 1e-6).dt_max;
    bool failed = false;
    for (double dt = dt_max * 0.25; dt < dt_max * 4.0; dt *= 1.1) {
      const bool ok = check_model(m, p, s, dt).pass();
      if (failed) CHECK_FALSE(ok);
      failed = failed || !ok;
    }
    CHECK(failed);
  }
}

TEST_CASE("empirical FTCS behaviour around dt_max") {
  const NetworkMesh m = testing::uniform_cable(41, 0.05);
  const double dt_max = check_diffusion(m, 1.0, 1e-6).dt_max;
  CHECK(dt_max == doctest::Approx(0.05 * 0.05 / 2.0).epsilon(1e-12));
  const SpatialOperator op = assemble_model(m, RadiusProfile{}, {ModelKind::SimpleDiffusion, 1.0, 1.0});
  auto growth = [&](double dt) {
    SimState s;
    s.c = Vector::Zero(41);
    s.c[20] = 1.0;
    double worst = 1.0;
    for (int n = 0; n < 10000; ++n) {
      s = step(s, op, Vector(), dt);
      worst = std::max(worst, s.c.cwiseAbs().maxCoeff());
      if (worst > 1e6) break;
    }
    return worst;
  };
  CHECK(growth(0.999 * dt_max) <= 1.0);
  CHECK(growth(1.05 * dt_max) > 1e3);
}
