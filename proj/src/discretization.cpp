#include "parabolic/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace parabolic {

namespace {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

void check_coefficients(const Grid& grid, const Coefficients& c) {
  const auto cells = static_cast<std::size_t>(grid.cell_count());
  if (c.xx.size() != cells || (grid.dimension() == 2 ? c.yy.size() != cells : !c.yy.empty())) {
    throw InvalidInput("diffusion coefficients do not match the grid");
  }
  auto finite = [](double a) { return std::isfinite(a); };
  if (!std::all_of(c.xx.begin(), c.xx.end(), finite) || !std::all_of(c.yy.begin(), c.yy.end(), finite)) {
    throw InvalidInput("diffusion coefficients must be finite");
  }
}

}  // namespace

Coefficients Coefficients::sample(const Grid& grid, const std::function<double(double, double)>& axx,
                                  const std::function<double(double, double)>& ayy) {
  Coefficients c;
  for (Eigen::Index cell = 0; cell < grid.cell_count(); ++cell) {
    const auto [x, y] = grid.center(cell);
    c.xx.push_back(axx(x, y));
    if (grid.dimension() == 2) c.yy.push_back(ayy ? ayy(x, y) : axx(x, y));
  }
  return c;
}

Coefficients Coefficients::constant(const Grid& grid, double a) {
  return sample(grid, [a](double, double) { return a; });
}

// ---------------------------------------------------------------------------

DiffusionField::DiffusionField(Grid grid, std::vector<Coefficients> equations)
    : grid_(std::move(grid)), equations_(std::move(equations)) {
  if (equations_.empty()) {
    throw InvalidInput("diffusion field needs at least one equation");
  }
  for (const auto& c : equations_) check_coefficients(grid_, c);
}

DiffusionField DiffusionField::identical(const Grid& grid, const Coefficients& coefficients, Eigen::Index n) {
  return DiffusionField(grid, std::vector<Coefficients>(static_cast<std::size_t>(n), coefficients));
}

bool DiffusionField::identical() const {
  return std::all_of(equations_.begin(), equations_.end(),
                     [&](const Coefficients& c) { return c == equations_.front(); });
}

double DiffusionField::min_coefficient() const {
  double nu = kInf;
  for (const auto& c : equations_) {
    for (double a : c.xx) nu = std::min(nu, a);
    for (double a : c.yy) nu = std::min(nu, a);
  }
  return nu;
}

double DiffusionField::max_coefficient() const {
  double top = -kInf;
  for (const auto& c : equations_) {
    for (double a : c.xx) top = std::max(top, a);
    for (double a : c.yy) top = std::max(top, a);
  }
  return top;
}

CoercivityEstimate coercivity_check(const DiffusionField& field) {
  CoercivityEstimate est;
  est.nu = field.min_coefficient();
  if (!(est.nu > 0.0)) {
    std::ostringstream msg;
    msg << "diffusion is not uniformly coercive: smallest coefficient " << est.nu;
    throw CoercivityError(msg.str());
  }
  if (est.nu < 1e-2 * field.max_coefficient()) {
    std::ostringstream msg;
    msg << "weak coercivity: nu = " << est.nu << " is below 1% of the largest coefficient";
    est.warning = msg.str();
  }
  return est;
}

DiscreteOperator assemble_diffusion(const Grid& grid, const Coefficients& coefficients) {
  check_coefficients(grid, coefficients);
  auto positive = [](double a) { return a > 0.0; };
  if (!std::all_of(coefficients.xx.begin(), coefficients.xx.end(), positive) ||
      !std::all_of(coefficients.yy.begin(), coefficients.yy.end(), positive)) {
    throw CoercivityError("diffusion coefficients must be strictly positive");
  }

  const Eigen::Index cells = grid.cell_count();
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> diagonal(static_cast<std::size_t>(cells), 0.0);

  auto add_face = [&](Eigen::Index a, Eigen::Index b, double weight) {
    triplets.emplace_back(a, b, weight);
    triplets.emplace_back(b, a, weight);
    diagonal[static_cast<std::size_t>(a)] -= weight;
    diagonal[static_cast<std::size_t>(b)] -= weight;
  };

  const int nx = grid.cells(0);
  const int ny = grid.dimension() == 2 ? grid.cells(1) : 1;
  const double hx2 = grid.spacing(0) * grid.spacing(0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const Eigen::Index a = grid.index(i, j);
      const Eigen::Index b = grid.index(i + 1, j);
      const double k = harmonic_mean(coefficients.xx[static_cast<std::size_t>(a)],
                                     coefficients.xx[static_cast<std::size_t>(b)]);
      add_face(a, b, k / hx2);
    }
  }
  if (grid.dimension() == 2) {
    const double hy2 = grid.spacing(1) * grid.spacing(1);
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Eigen::Index a = grid.index(i, j);
        const Eigen::Index b = grid.index(i, j + 1);
        const double k = harmonic_mean(coefficients.yy[static_cast<std::size_t>(a)],
                                       coefficients.yy[static_cast<std::size_t>(b)]);
        add_face(a, b, k / hy2);
      }
    }
  }
  for (Eigen::Index c = 0; c < cells; ++c) {
    triplets.emplace_back(c, c, diagonal[static_cast<std::size_t>(c)]);
  }

  DiscreteOperator op;
  op.matrix.resize(cells, cells);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  op.symmetric = true;
  return op;
}

// ---------------------------------------------------------------------------

StateField::StateField(Grid grid, CMatrix values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() != grid_.cell_count() || values_.cols() < 1) {
    throw InvalidInput("state field shape does not match the grid");
  }
  if (!values_.allFinite()) {
    throw InvalidInput("state field entries must be finite");
  }
}

StateField StateField::zeros(const Grid& grid, Eigen::Index components) {
  return StateField(grid, CMatrix::Zero(grid.cell_count(), components));
}

StateField StateField::constant(const Grid& grid, const CVector& z) {
  CMatrix values(grid.cell_count(), z.size());
  values.rowwise() = z.transpose();
  return StateField(grid, std::move(values));
}

double discrete_norm(const StateField& u, double p) {
  if (p == kInf) return u.values().cwiseAbs().maxCoeff();
  if (p != 1.0 && p != 2.0) {
    throw InvalidInput("discrete_norm supports p in {1, 2, inf}");
  }
  const double vol = u.grid().cell_volume();
  if (p == 1.0) return vol * u.values().cwiseAbs().sum();
  return std::sqrt(vol * u.values().cwiseAbs2().sum());
}

// ---------------------------------------------------------------------------

BlockOperator::BlockOperator(std::vector<DiscreteOperator> diffusion, PotentialField potential)
    : diffusion_(std::move(diffusion)), potential_(std::move(potential)) {
  if (static_cast<Eigen::Index>(diffusion_.size()) != potential_.components()) {
    throw InvalidInput("block operator needs one diffusion operator per component");
  }
  for (const auto& op : diffusion_) {
    if (op.matrix.rows() != potential_.cell_count() || op.matrix.cols() != potential_.cell_count()) {
      throw InvalidInput("diffusion operator and potential live on different grids");
    }
  }
}

StateField BlockOperator::apply(const StateField& u) const {
  if (u.grid() != grid() || u.components() != components()) {
    throw InvalidInput("state field does not match the block operator");
  }
  CMatrix out(u.values().rows(), u.values().cols());
  for (Eigen::Index k = 0; k < components(); ++k) {
    const auto& b = diffusion_[static_cast<std::size_t>(k)].matrix;
    const RVector re = b * u.values().col(k).real();
    const RVector im = b * u.values().col(k).imag();
    out.col(k).real() = re;
    out.col(k).imag() = im;
  }
  for (Eigen::Index c = 0; c < potential_.cell_count(); ++c) {
    out.row(c) += (potential_.at(c).entries() * u.values().row(c).transpose()).transpose();
  }
  return StateField(u.grid(), std::move(out));
}

CMatrix BlockOperator::materialize() const {
  if (size() > kMaxMaterializedSize) {
    std::ostringstream msg;
    msg << "operator of size " << size() << " exceeds the dense cap " << kMaxMaterializedSize
        << "; coarsen the grid";
    throw ScenarioError(msg.str());
  }
  const Eigen::Index cells = potential_.cell_count();
  const Eigen::Index n = components();
  CMatrix dense = CMatrix::Zero(size(), size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& b = diffusion_[static_cast<std::size_t>(k)].matrix;
    for (int outer = 0; outer < b.outerSize(); ++outer) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(b, outer); it; ++it) {
        dense(k * cells + it.row(), k * cells + it.col()) += it.value();
      }
    }
  }
  for (Eigen::Index c = 0; c < cells; ++c) {
    const CMatrix& v = potential_.at(c).entries();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        dense(i * cells + c, j * cells + c) += v(i, j);
      }
    }
  }
  return dense;
}

BlockOperator assemble_block(std::vector<DiscreteOperator> operators, PotentialField potential) {
  return BlockOperator(std::move(operators), std::move(potential));
}

BlockOperator assemble_block(const DiffusionField& diffusion, PotentialField potential) {
  if (diffusion.grid() != potential.grid()) {
    throw InvalidInput("diffusion and potential live on different grids");
  }
  std::vector<DiscreteOperator> ops;
  for (Eigen::Index k = 0; k < diffusion.equations(); ++k) {
    ops.push_back(assemble_diffusion(diffusion.grid(), diffusion.equation(k)));
  }
  return BlockOperator(std::move(ops), std::move(potential));
}

CVector flatten(const StateField& u) {
  return Eigen::Map<const CVector>(u.values().data(), u.values().size());
}

StateField unflatten(const Grid& grid, Eigen::Index components, const CVector& v) {
  if (v.size() != grid.cell_count() * components) {
    throw InvalidInput("flattened state has the wrong length");
  }
  return StateField(grid, Eigen::Map<const CMatrix>(v.data(), grid.cell_count(), components));
}

}  // namespace parabolic
