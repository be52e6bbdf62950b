#pragma once

#include <array>

#include "parabolic/types.hpp"

namespace parabolic {

/// Uniform cell-centered grid on an interval [0, Lx] or a rectangle
/// [0, Lx] x [0, Ly]. Cells are numbered i + nx * j.
class Grid {
 public:
  static Grid interval(double length, int cells);
  static Grid rectangle(double length_x, double length_y, int cells_x, int cells_y);

  int dimension() const { return dim_; }
  double extent(int axis) const { return extent_.at(static_cast<std::size_t>(axis)); }
  int cells(int axis) const { return cells_.at(static_cast<std::size_t>(axis)); }
  double spacing(int axis) const { return extent(axis) / cells(axis); }

  Eigen::Index cell_count() const;
  double cell_volume() const;
  double measure() const { return cell_volume() * static_cast<double>(cell_count()); }

  /// Cell-center coordinates; y is 0 on a 1D grid.
  std::array<double, 2> center(Eigen::Index cell) const;
  Eigen::Index index(int i, int j = 0) const { return i + static_cast<Eigen::Index>(cells_[0]) * j; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells);

  int dim_ = 1;
  std::array<double, 2> extent_{1.0, 1.0};
  std::array<int, 2> cells_{2, 1};
};

}  // namespace parabolic
