#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "parabolic/grid.hpp"
#include "parabolic/potential_field.hpp"

namespace parabolic {

class CoercivityError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

/// Diagonal diffusion tensor of one equation sampled at cell centers. `yy` is
/// empty on 1D grids.
struct Coefficients {
  std::vector<double> xx;
  std::vector<double> yy;

  static Coefficients sample(const Grid& grid, const std::function<double(double, double)>& axx,
                             const std::function<double(double, double)>& ayy = {});
  static Coefficients constant(const Grid& grid, double a);

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

class DiffusionField {
 public:
  DiffusionField(Grid grid, std::vector<Coefficients> equations);
  static DiffusionField identical(const Grid& grid, const Coefficients& coefficients, Eigen::Index n);

  const Grid& grid() const { return grid_; }
  Eigen::Index equations() const { return static_cast<Eigen::Index>(equations_.size()); }
  const Coefficients& equation(Eigen::Index k) const { return equations_[static_cast<std::size_t>(k)]; }
  /// A_1 = ... = A_N cellwise.
  bool identical() const;
  /// Smallest sampled coefficient over all cells, axes and equations.
  double min_coefficient() const;
  double max_coefficient() const;

  friend bool operator==(const DiffusionField&, const DiffusionField&) = default;

 private:
  Grid grid_;
  std::vector<Coefficients> equations_;
};

struct CoercivityEstimate {
  double nu = 0.0;
  std::optional<std::string> warning;
};

/// nu = min coefficient; throws CoercivityError if nu <= 0. Warns when nu is
/// below 1% of the largest coefficient (nu likely degenerates under refinement).
CoercivityEstimate coercivity_check(const DiffusionField& field);

/// Cell-centered finite-volume realization of u -> div(a grad u) with zero-flux
/// boundary faces and harmonic-mean face coefficients.
struct DiscreteOperator {
  Eigen::SparseMatrix<double> matrix;
  bool symmetric = true;
};

DiscreteOperator assemble_diffusion(const Grid& grid, const Coefficients& coefficients);

/// Discretized u in L^p(Omega; C^N): values(cell, k).
class StateField {
 public:
  StateField(Grid grid, CMatrix values);
  static StateField zeros(const Grid& grid, Eigen::Index components);
  /// z (x) 1: the same vector in every cell.
  static StateField constant(const Grid& grid, const CVector& z);

  const Grid& grid() const { return grid_; }
  Eigen::Index components() const { return values_.cols(); }
  const CMatrix& values() const { return values_; }
  CMatrix& values() { return values_; }

  friend bool operator==(const StateField& a, const StateField& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  CMatrix values_;
};

/// Volume-weighted l^p sum over cells and components (p < inf), or the max
/// modulus (p = inf).
double discrete_norm(const StateField& u, double p);

inline constexpr Eigen::Index kMaxMaterializedSize = 4096;

/// diag(B_1, ..., B_N) + V acting on StateFields.
class BlockOperator {
 public:
  BlockOperator(std::vector<DiscreteOperator> diffusion, PotentialField potential);

  const PotentialField& potential() const { return potential_; }
  const DiscreteOperator& diffusion(Eigen::Index k) const { return diffusion_[static_cast<std::size_t>(k)]; }
  const Grid& grid() const { return potential_.grid(); }
  Eigen::Index components() const { return potential_.components(); }
  /// cells * N.
  Eigen::Index size() const { return potential_.cell_count() * potential_.components(); }

  StateField apply(const StateField& u) const;

  /// Dense matrix in the ordering index = k * cells + cell. Throws
  /// ScenarioError above kMaxMaterializedSize.
  CMatrix materialize() const;

 private:
  std::vector<DiscreteOperator> diffusion_;
  PotentialField potential_;
};

BlockOperator assemble_block(std::vector<DiscreteOperator> operators, PotentialField potential);
BlockOperator assemble_block(const DiffusionField& diffusion, PotentialField potential);

/// Flattened k * cells + cell vector and back.
CVector flatten(const StateField& u);
StateField unflatten(const Grid& grid, Eigen::Index components, const CVector& v);

}  // namespace parabolic
