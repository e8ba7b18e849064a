#include "kdvh/grid.hpp"

#include <stdexcept>
#include <string>

namespace kdvh {

PeriodicGrid make_grid(double x_left, double x_right, int n) {
  if (!(x_right > x_left)) {
    throw std::invalid_argument("make_grid: domain width must be positive, got [" +
                                std::to_string(x_left) + ", " + std::to_string(x_right) + ")");
  }
  if (n < 4) {
    throw std::invalid_argument("make_grid: need at least four nodes, got n = " + std::to_string(n));
  }
  PeriodicGrid g;
  g.x_left = x_left;
  g.x_right = x_right;
  g.n = n;
  g.dx = (x_right - x_left) / n;
  g.nodes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g.nodes[static_cast<std::size_t>(i)] = x_left + i * g.dx;
  }
  return g;
}

} // namespace kdvh
