#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fjnet/discretize.hpp"
#include "fjnet/network.hpp"

namespace testing {

inline fjnet::NetworkMesh uniform_cable(int n, double h, double radius = 1.0) {
  return fjnet::make_cable(0.0, h * (n - 1), n, [radius](double) { return radius; });
}

// Root 0 -- 1 (branch) with children 2 and 3, plus one more node past each
// so every leaf has an inward 2-path:
//   0 - 1 - 2 - 4
//        \- 3 - 5
inline fjnet::NetworkMesh fork(double h = 1.0, std::vector<double> radii = {1, 1, 1, 1, 1, 1}) {
  using namespace fjnet;
  std::vector<Node> nodes = {
      {0, {0, 0, 0}, radii[0]},  {1, {h, 0, 0}, radii[1]},      {2, {2 * h, h, 0}, radii[2]},
      {3, {2 * h, -h, 0}, radii[3]}, {4, {3 * h, h, 0}, radii[4]}, {5, {3 * h, -h, 0}, radii[5]},
  };
  std::vector<Edge> edges = {{0, 1, h}, {1, 2, h}, {1, 3, h}, {2, 4, h}, {3, 5, h}};
  return NetworkMesh(nodes, edges, 0);
}

inline double entry(const fjnet::SparseMatrix& m, int r, int c) { return m.coeff(r, c); }

inline std::vector<double> row(const fjnet::SparseMatrix& m, int r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()), 0.0);
  for (fjnet::SparseMatrix::InnerIterator it(m, r); it; ++it) out[static_cast<std::size_t>(it.col())] = it.value();
  return out;
}

}  // namespace testing
