#include <doctest.h>

#include <cmath>
#include <limits>

#include "fjnet/integrate.hpp"
#include "support.hpp"

using namespace fjnet;

namespace {

SpatialOperator diffusion_op(const NetworkMesh& m, double D = 1.0) {
  return assemble_model(m, RadiusProfile{}, {ModelKind::SimpleDiffusion, D, 1.0});
}

RunSetup sealed_setup(const NetworkMesh& m, ModelKind k, Vector c0, double dt, double t_end) {
  RunSetup s;
  s.mesh = &m;
  s.spec = {k, 1.0, 1.0};
  s.boundary.fallback = BoundaryValue::constant(0.0);
  s.initial = std::move(c0);
  s.dt = dt;
  s.t_end = t_end;
  s.record_every = 1;
  return s;
}

}  // namespace

TEST_CASE("single forward-Euler steps") {
  const NetworkMesh m = testing::uniform_cable(5, 0.5);
  SUBCASE("zero operator is the identity") {
    SpatialOperator z = diffusion_op(m);
    z.matrix.setZero();
    z.boundary_affine.setZero();
    SimState s{0.0, Vector::LinSpaced(5, 1.0, 5.0), 0};
    const SimState n = step(s, z, Vector(), 0.1);
    CHECK(n.c == s.c);
    CHECK(n.step_index == 1);
    CHECK(n.t == 0.1);
  }
  SUBCASE("an interior spike spreads by the FTCS weights") {
    const double D = 0.5, dt = 0.1, h = 0.5;
    SpatialOperator op = diffusion_op(m, D);
    op.set_neumann(Vector::Zero(2));
    SimState s{0.0, Vector::Zero(5), 0};
    s.c[2] = 1.0;
    const SimState n = step(s, op, Vector(), dt);
    const double r = D * dt / (h * h);
    CHECK(n.c[2] == doctest::Approx(1.0 - 2.0 * r).epsilon(1e-15));
    CHECK(n.c[1] == doctest::Approx(r).epsilon(1e-15));
    CHECK(n.c[3] == doctest::Approx(r).epsilon(1e-15));
  }
  SUBCASE("doubling the mass halves the update") {
    SpatialOperator op = diffusion_op(m);
    op.set_neumann(Vector::Zero(2));
    SimState s{0.0, Vector::LinSpaced(5, 0.0, 1.0).array().square(), 0};
    const Vector d1 = step(s, op, Vector(), 0.01).c - s.c;
    op.mass_diag.setConstant(2.0);
    const Vector d2 = step(s, op, Vector(), 0.01).c - s.c;
    CHECK((d1 - 2.0 * d2).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("non-finite values abort with the step index") {
    SpatialOperator op = diffusion_op(m);
    op.set_neumann(Vector::Zero(2));
    SimState s{0.0, Vector::Zero(5), 41};
    s.c[3] = std::numeric_limits<double>::infinity();
    try {
      step(s, op, Vector(), 0.01);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(e.step == 42);
    }
  }
  SUBCASE("nonpositive dt") { CHECK_THROWS_AS(step(SimState{0.0, Vector::Zero(5), 0}, diffusion_op(m), Vector(), 0.0), std::invalid_argument); }
}

TEST_CASE("run records the requested snapshots") {
  const NetworkMesh m = testing::uniform_cable(11, 0.1);
  SUBCASE("t_end = 0 gives the initial state only") {
    const Trajectory t = run(sealed_setup(m, ModelKind::SimpleDiffusion, Vector::Ones(11), 1e-3, 0.0));
    REQUIRE(t.snapshots.size() == 1);
    CHECK(t.snapshots[0].t == 0.0);
  }
  SUBCASE("cadence includes the final step") {
    RunSetup s = sealed_setup(m, ModelKind::SimpleDiffusion, Vector::Ones(11), 1e-3, 0.0105);
    s.record_every = 4;
    const Trajectory t = run(s);
    std::vector<long> steps;
    for (const Snapshot& snap : t.snapshots) steps.push_back(snap.step);
    CHECK(steps == std::vector<long>{0, 4, 8, 11});
    CHECK(t.snapshots.back().t == doctest::Approx(0.011));
  }
}

TEST_CASE("constant states are fixed points of every model") {
  const NetworkMesh m = make_cable(0.0, 3.0, 31, [](double x) { return 1.0 + 0.4 * x; });
  for (ModelKind k : {ModelKind::SimpleDiffusion, ModelKind::FickJacobs, ModelKind::Zwanzig, ModelKind::RegueraRubi,
                      ModelKind::KalinayPercus, ModelKind::KalinayTemporal, ModelKind::ExpandedFlux}) {
    CAPTURE(model_name(k));
    const Trajectory t = run(sealed_setup(m, k, Vector::Constant(31, 2.5), 1e-4, 0.05));
    CHECK((t.snapshots.back().c.array() - 2.5).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("steps are linear and deterministic") {
  const NetworkMesh m = make_cable(0.0, 2.0, 21, [](double x) { return 1.0 + 0.2 * x; });
  const SpatialOperator op = assemble_model(m, RadiusProfile{}, {ModelKind::ExpandedFlux, 1.0, 1.0});
  const Vector a = Vector::LinSpaced(21, 0.0, 3.0).array().sin();
  const Vector b = Vector::LinSpaced(21, 1.0, -2.0).array().square();
  auto once = [&](const Vector& c) { return step(SimState{0.0, c, 0}, op, Vector(), 1e-4).c; };
  CHECK((once(2.0 * a - 0.5 * b) - (2.0 * once(a) - 0.5 * once(b))).cwiseAbs().maxCoeff() < 1e-12);

  RunSetup s = sealed_setup(m, ModelKind::ExpandedFlux, a, 1e-4, 0.1);
  const Trajectory t1 = run(s);
  const Trajectory t2 = run(s);
  REQUIRE(t1.snapshots.size() == t2.snapshots.size());
  for (std::size_t k = 0; k < t1.snapshots.size(); ++k) CHECK(t1.snapshots[k].c == t2.snapshots[k].c);
}

TEST_CASE("pure diffusion with sealed ends conserves the trapezoid-weighted total") {
  const double h = 0.1;
  const NetworkMesh m = testing::uniform_cable(21, h);
  Vector c0 = Vector::Zero(21);
  c0[5] = 1.0;
  c0[20] = 2.0;
  const Trajectory t = run(sealed_setup(m, ModelKind::SimpleDiffusion, c0, 1e-3, 1.0));
  auto total = [&](const Vector& c) {
    double s = 0.0;
    for (int i = 0; i < 21; ++i) s += c[i] * mean_incident_length(m, i) * (m.is_leaf(i) ? 0.5 : 1.0);
    return s;
  };
  CHECK(total(t.snapshots.back().c) == doctest::Approx(total(c0)).epsilon(1e-13));
}

TEST_CASE("threshold constraints") {
  const ConstraintPolicy p{6.0, 4.0, 1.5};
  LateralFluxField sched;
  sched.windows.push_back({{0, 1, 2}, 3.0, 0.0, 3.0});
  SimState s{1.0, Vector::Constant(3, 5.0), 0};
  CHECK(apply_constraints(s, p, sched, 1.0) == Vector::Constant(3, 3.0));
  s.c[1] = 7.0;
  s.c[2] = 3.0;
  const Vector J = apply_constraints(s, p, sched, 1.0);
  CHECK(J[0] == 3.0);
  CHECK(J[1] == -1.5);
  CHECK(J[2] == 0.0);
  CHECK_THROWS_AS((ConstraintPolicy{4.0, 4.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("boundary values") {
  const BoundaryValue t = BoundaryValue::table({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
  CHECK(t.at(0.5) == 1.0);
  CHECK(t.at(2.0) == 1.0);
  CHECK(t.at(3.0) == 0.0);
  CHECK_THROWS_AS(t.at(3.5), std::out_of_range);
  CHECK_THROWS_AS(BoundaryValue::table({1.0, 0.0}, {0.0, 0.0}), std::invalid_argument);

  SUBCASE("a run past the end of a table fails") {
    const NetworkMesh m = testing::uniform_cable(5, 0.25);
    RunSetup s = sealed_setup(m, ModelKind::SimpleDiffusion, Vector::Ones(5), 1e-3, 0.01);
    s.boundary.by_id.emplace(0, BoundaryValue::table({0.0, 0.005}, {1.0, 1.0}));
    CHECK_THROWS_AS(run(s), std::out_of_range);
  }
  SUBCASE("missing leaf data") {
    const NetworkMesh m = testing::uniform_cable(5, 0.25);
    BoundaryData b;
    b.by_id.emplace(0, BoundaryValue::constant(1.0));
    CHECK_THROWS_AS(b.values(m, 0.0), std::invalid_argument);
  }
}

TEST_CASE("stability pre-flight") {
  const NetworkMesh m = testing::uniform_cable(11, 0.1);
  RunSetup s = sealed_setup(m, ModelKind::SimpleDiffusion, Vector::Ones(11), 0.006, 0.012);
  try {
    run(s);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.step == 0);
    CHECK(e.node_id >= 0);
  }
  s.force = true;
  const Trajectory t = run(s);
  CHECK_FALSE(t.stability.pass());
  CHECK(t.warnings.back().find("--force") != std::string::npos);
}

TEST_CASE("inflow only while the window is open") {
  const NetworkMesh m = testing::uniform_cable(11, 0.1);
  RunSetup s = sealed_setup(m, ModelKind::FickJacobs, Vector::Zero(11), 1e-3, 0.2);
  LateralFluxField f;
  f.windows.push_back({{5}, 1.0, 0.0, 0.1});
  s.lateral = f;
  s.record_every = 10;
  const Trajectory t = run(s);
  for (const Snapshot& snap : t.snapshots) CHECK(snap.J[5] == (snap.t <= 0.1 + 1e-12 ? 1.0 : 0.0));
  CHECK(t.snapshots.back().c.sum() > 0.0);
}
