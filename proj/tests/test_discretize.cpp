#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fjnet/discretize.hpp"
#include "support.hpp"

using namespace fjnet;
using testing::entry;

namespace {

Vector sample(const NetworkMesh& m, double (*f)(double)) {
  Vector c(static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) c[static_cast<Eigen::Index>(i)] = f(m.x(static_cast<int>(i)));
  return c;
}

NetworkMesh random_tree(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> len(0.05, 0.2);
  std::uniform_real_distribution<double> rad(0.3, 2.0);
  std::vector<Node> nodes = {{0, {0, 0, 0}, rad(rng)}, {1, {1, 0, 0}, rad(rng)}};
  std::vector<Edge> edges = {{0, 1, len(rng)}};
  for (int i = 2; i < n; ++i) {
    // attach to any non-root node so the root stays a leaf
    std::uniform_int_distribution<int> pick(1, i - 1);
    nodes.push_back({i, {static_cast<double>(i), 0, 0}, rad(rng)});
    edges.push_back({pick(rng), i, len(rng)});
  }
  return NetworkMesh(nodes, edges, 0);
}

}  // namespace

TEST_CASE("branched Laplacian") {
  SUBCASE("uniform cable reduces to [1, -2, 1] / h^2 exactly") {
    const NetworkMesh m = testing::uniform_cable(6, 0.5);
    const LinearRows L = assemble_laplacian(m);
    for (int i = 1; i < 5; ++i) {
      CHECK(entry(L.matrix, i, i - 1) == 4.0);
      CHECK(entry(L.matrix, i, i) == -8.0);
      CHECK(entry(L.matrix, i, i + 1) == 4.0);
      CHECK(L.matrix.row(i).nonZeros() == 3);
    }
  }
  SUBCASE("degree-3 node with unit spacing") {
    const NetworkMesh m = testing::fork();
    const LinearRows L = assemble_laplacian(m);
    Vector c = Vector::Zero(6);
    c[0] = c[2] = c[3] = 1.0;
    CHECK((L.matrix * c)[1] == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("leaf rows use a mirrored ghost node") {
    const NetworkMesh m = testing::uniform_cable(4, 0.5);
    const LinearRows L = assemble_laplacian(m);
    CHECK(entry(L.matrix, 0, 0) == -8.0);
    CHECK(entry(L.matrix, 0, 1) == 8.0);
    // outward derivative g enters as 2 g / h
    CHECK(entry(L.boundary, 0, 0) == 4.0);
    CHECK(entry(L.boundary, 3, 1) == 4.0);
  }
}

TEST_CASE("every model annihilates constants") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const NetworkMesh m = random_tree(rng, 25);
    const Vector one = Vector::Ones(static_cast<Eigen::Index>(m.size()));
    for (ModelKind k : {ModelKind::SimpleDiffusion, ModelKind::FickJacobs, ModelKind::Zwanzig, ModelKind::RegueraRubi,
                        ModelKind::KalinayPercus, ModelKind::ExpandedFlux}) {
      CAPTURE(model_name(k));
      const SpatialOperator op = assemble_model(m, RadiusProfile{}, ModelSpec{k, 1.3, 1.0});
      const Vector r = op.matrix * one;
      double scale = 0.0;
      for (Eigen::Index i = 0; i < op.matrix.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(op.matrix, i); it; ++it) scale = std::max(scale, std::abs(it.value()));
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * scale);
      CHECK(op.mass_diag.minCoeff() >= 1.0);
    }
  }
  const NetworkMesh cable = make_cable(0.0, 2.0, 21, [](double x) { return 1.0 + 0.3 * x * x; });
  const SpatialOperator kal = assemble_model(cable, RadiusProfile{}, ModelSpec{ModelKind::KalinayTemporal, 1.0, 1.0});
  CHECK((kal.matrix * Vector::Ones(21)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("second-order upwind advection") {
  const double lambda = 0.25;
  const double h = 0.5;
  const NetworkMesh m = make_cable(0.0, 4.0, 9, [&](double x) { return 1.0 + lambda * x; });
  const ModelSpec fj{ModelKind::FickJacobs, 1.0, 1.0};
  const LinearRows adv = assemble_advection(m, RadiusProfile(Cone{lambda}), fj);

  SUBCASE("stencil on a uniform cable is w (-3, 4, -1) / (2h)") {
    for (int i = 1; i < 7; ++i) {
      const double w = 2.0 * lambda / m.radius(i);
      CHECK(entry(adv.matrix, i, i) == doctest::Approx(-3.0 * w / (2 * h)).epsilon(1e-14));
      CHECK(entry(adv.matrix, i, i + 1) == doctest::Approx(4.0 * w / (2 * h)).epsilon(1e-14));
      CHECK(entry(adv.matrix, i, i + 2) == doctest::Approx(-1.0 * w / (2 * h)).epsilon(1e-14));
    }
  }
  SUBCASE("exact for quadratics along the path") {
    const Vector c = sample(m, [](double x) { return 3.0 - x + 2.0 * x * x; });
    const Vector r = adv.matrix * c;
    for (int i = 1; i < 7; ++i) {
      const double w = 2.0 * lambda / m.radius(i);
      CHECK(r[i] == doctest::Approx(w * (-1.0 + 4.0 * m.x(i))).epsilon(1e-12));
    }
    const Vector sq = sample(m, [](double x) { return x * x; });
    CHECK((adv.matrix * sq)[0] == 0.0);  // c'(0) = 0; the root row reads only Neumann data
  }
  SUBCASE("the last interior node falls back to first order and says so") {
    CHECK(adv.notes.size() == 1);
    CHECK(adv.notes[0].find("node 7") != std::string::npos);
  }
  SUBCASE("flat radius gives zero rows") {
    const LinearRows flat = assemble_advection(testing::uniform_cable(7, 0.3), RadiusProfile{}, fj);
    CHECK(flat.matrix.nonZeros() == 0);
  }
  SUBCASE("two wind-side paths are summed") {
    // radius grows away from the root, so the wind side at node 0's neighbour is the fork
    const NetworkMesh f = testing::fork(1.0, {1.0, 1.0, 1.5, 1.5, 2.0, 2.0});
    const LinearRows a = assemble_advection(f, RadiusProfile{}, fj);
    CHECK((a.matrix * Vector::Ones(6)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(a.matrix.row(1).nonZeros() == 5);  // self + two children + two grandchildren
  }
}

TEST_CASE("Zwanzig on a cone with unit slope scales the FJ operator by 2/3") {
  const NetworkMesh m = make_cable(0.0, 5.0, 11, [](double x) { return 1.0 + x; });
  const SpatialOperator fj = assemble_model(m, RadiusProfile(Cone{1.0}), {ModelKind::FickJacobs, 1.0, 1.0});
  const SpatialOperator zw = assemble_model(m, RadiusProfile(Cone{1.0}), {ModelKind::Zwanzig, 1.0, 1.0});
  const SparseMatrix diff = zw.matrix - (2.0 / 3.0) * fj.matrix;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < diff.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(diff, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
  CHECK(worst < 1e-12);
  CHECK(node_diffusion(m, {ModelKind::KalinayTemporal, 1.0, 1.0}) == node_diffusion(m, {ModelKind::Zwanzig, 1.0, 1.0}));
}

TEST_CASE("third derivative") {
  const NetworkMesh m = testing::uniform_cable(8, 1.0);
  const LinearRows T = assemble_third_order(m);
  const Vector cube = sample(m, [](double x) { return x * x * x; });
  const Vector zero = Vector::Zero(2);
  SUBCASE("interior rows are exact for cubics") {
    const Vector r = T.matrix * cube;
    for (int i = 2; i < 6; ++i) CHECK(r[i] == doctest::Approx(6.0).epsilon(1e-13));
  }
  SUBCASE("root closure, taken verbatim, returns c'''/3 on a cubic") {
    // c'(0) = 0, so the outward Neumann value is 0 as well
    CHECK((T.matrix * cube + T.boundary * zero)[0] == 2.0);
  }
  SUBCASE("constants vanish") {
    CHECK((T.matrix * Vector::Ones(8)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("short branches are rejected") {
    CHECK_THROWS(assemble_third_order(testing::uniform_cable(2, 1.0)));
  }
}

TEST_CASE("expanded-flux correction vanishes as O(dx^2) on smooth data") {
  // Entrywise the gap grows like 1/dx: dx^2 times a third-difference stencil of size 1/dx^3.
  const RadiusProfile p(Cone{1.0});
  std::vector<double> applied, entry;
  for (int n : {41, 81, 161, 321}) {
    const NetworkMesh m = make_cable(0.0, 10.0, n, [&](double x) { return p.radius(x); });
    const SparseMatrix d = assemble_model(m, p, {ModelKind::ExpandedFlux, 1.0, 1.0}).matrix -
                           assemble_model(m, p, {ModelKind::FickJacobs, 1.0, 1.0}).matrix;
    const Vector bump = sample(m, [](double x) { return std::exp(-(x - 5.0) * (x - 5.0) / 0.98); });
    applied.push_back((d * bump).cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(d, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
    entry.push_back(worst);
  }
  CHECK(std::log2(applied[1] / applied[2]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(applied[2] / applied[3]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(entry[3] / entry[2]) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("lateral source") {
  const NetworkMesh m = testing::uniform_cable(9, 0.25, 2.0);
  for (ModelKind k : {ModelKind::FickJacobs, ModelKind::ExpandedFlux}) {
    CAPTURE(model_name(k));
    const ModelSpec s{k, 1.0, 1.0};
    CHECK(assemble_lateral(m, RadiusProfile{}, s, Vector::Zero(9)).cwiseAbs().maxCoeff() == 0.0);
    const Vector src = assemble_lateral(m, RadiusProfile{}, s, Vector::Constant(9, 3.0));
    for (int i = 0; i < 9; ++i) CHECK(src[i] == doctest::Approx(3.0).epsilon(1e-13));  // (2 / R) J with R = 2
  }
  SUBCASE("linear J on a unit-radius cable") {
    const NetworkMesh u = testing::uniform_cable(9, 0.25, 1.0);
    const Vector J = sample(u, [](double x) { return x; });
    const Vector src = assemble_lateral(u, RadiusProfile{}, {ModelKind::ExpandedFlux, 1.0, 1.0}, J);
    for (int i = 0; i < 9; ++i) CHECK(src[i] == doctest::Approx(2.0 * u.x(i)).epsilon(1e-12).scale(1));
  }
  SUBCASE("scheduled windows are inclusive") {
    LateralFluxField f;
    f.windows.push_back({{2, 3}, 5.0, 1.0, 2.0});
    CHECK(f.at(0.5, 9).sum() == 0.0);
    CHECK(f.at(1.0, 9)[2] == 5.0);
    CHECK(f.at(2.0, 9)[3] == 5.0);
    CHECK(f.at(2.0001, 9).sum() == 0.0);
  }
}

TEST_CASE("coordinate dump is sorted and complete") {
  const LinearRows L = assemble_laplacian(testing::uniform_cable(3, 1.0));
  std::ostringstream os;
  write_coordinate(os, L.matrix);
  CHECK(os.str() == "0 0 -2\n0 1 2\n1 0 1\n1 1 -2\n1 2 1\n2 1 2\n2 2 -2\n");
}
