#pragma once

#include <vector>

namespace kdvh {

/// Uniform periodic grid on [x_left, x_right). The right endpoint is
/// identified with the left one and carries no node of its own.
struct PeriodicGrid {
  double x_left = 0.0;
  double x_right = 1.0;
  int n = 0;
  double dx = 0.0;
  std::vector<double> nodes;

  double length() const { return x_right - x_left; }
};

/// Build a periodic grid with n equispaced nodes x_i = x_left + i*dx,
/// dx = (x_right - x_left)/n. Throws std::invalid_argument for a
/// non-positive domain width or n < 4.
PeriodicGrid make_grid(double x_left, double x_right, int n);

} // namespace kdvh
