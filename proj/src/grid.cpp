#include "parabolic/grid.hpp"

#include <cmath>

namespace parabolic {

Grid::Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells)
    : dim_(dim), extent_(extent), cells_(cells) {
  for (int axis = 0; axis < dim_; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a])) {
      throw InvalidInput("grid extents must be positive and finite");
    }
    if (cells_[a] < 2) {
      throw InvalidInput("grid needs at least 2 cells per axis");
    }
  }
}

Grid Grid::interval(double length, int cells) { return Grid(1, {length, 1.0}, {cells, 1}); }

Grid Grid::rectangle(double length_x, double length_y, int cells_x, int cells_y) {
  return Grid(2, {length_x, length_y}, {cells_x, cells_y});
}

Eigen::Index Grid::cell_count() const {
  return static_cast<Eigen::Index>(cells_[0]) * (dim_ == 2 ? cells_[1] : 1);
}

double Grid::cell_volume() const {
  return dim_ == 2 ? spacing(0) * spacing(1) : spacing(0);
}

std::array<double, 2> Grid::center(Eigen::Index cell) const {
  const auto nx = static_cast<Eigen::Index>(cells_[0]);
  const double i = static_cast<double>(cell % nx);
  const double x = (i + 0.5) * spacing(0);
  if (dim_ == 1) return {x, 0.0};
  const double j = static_cast<double>(cell / nx);
  return {x, (j + 0.5) * spacing(1)};
}

}  // namespace parabolic
