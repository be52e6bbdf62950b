#include "parabolic/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace parabolic {

namespace {

// Orthonormal basis of ker(m), singular values <= rel * sigma_max.
CMatrix kernel_basis(const CMatrix& m, double rel) {
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double cutoff = rel * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

SpectrumReport spectrum_block(const BlockOperator& l, bool with_vectors) {
  const CMatrix dense = l.materialize();
  Eigen::ComplexEigenSolver<CMatrix> solver(dense, with_vectors);
  if (solver.info() != Eigen::Success) {
    throw ScenarioError("eigensolver did not converge");
  }
  const CVector& values = solver.eigenvalues();

  SpectrumReport report;
  const double scale = std::max(1.0, operator_norm(dense, 1.0));
  report.tolerance = 1e-8 * scale;

  std::vector<Complex> eigs(values.data(), values.data() + values.size());
  const auto order = canonical_order(eigs, scale, EigenOrder::RealDescending);
  report.eigenvalues.reserve(eigs.size());
  for (auto i : order) report.eigenvalues.push_back(eigs[static_cast<std::size_t>(i)]);
  if (with_vectors) {
    report.eigenvectors.resize(dense.rows(), dense.cols());
    for (std::size_t j = 0; j < order.size(); ++j) {
      report.eigenvectors.col(static_cast<Eigen::Index>(j)) = solver.eigenvectors().col(order[j]);
    }
  }

  report.spectral_bound = -kInf;
  for (const auto& e : report.eigenvalues) report.spectral_bound = std::max(report.spectral_bound, e.real());
  double below = -kInf;
  for (const auto& e : report.eigenvalues) {
    if (e.real() >= report.spectral_bound - report.tolerance) {
      report.boundary_spectrum.push_back(e);
    } else {
      below = std::max(below, e.real());
    }
  }
  report.gap = report.spectral_bound - below;
  return report;
}

std::vector<Complex> imaginary_axis_eigenvalues(const SpectrumReport& report, double re_tol, double im_tol) {
  std::vector<Complex> out;
  for (const auto& e : report.eigenvalues) {
    if (std::abs(e.real()) <= re_tol && std::abs(e.imag()) >= im_tol) out.push_back(e);
  }
  return out;
}

StateField LimitProjection::apply(const StateField& u) const {
  const CVector v = matrix * flatten(u);
  return unflatten(u.grid(), u.components(), v);
}

LimitProjection limit_projection(const BlockOperator& l, const SpectrumReport& report) {
  const double tol = report.tolerance;
  LimitProjection proj;
  if (report.spectral_bound < -tol) {
    proj.matrix = CMatrix::Zero(l.size(), l.size());
    return proj;
  }
  for (const auto& e : report.boundary_spectrum) {
    if (std::abs(e) > tol) {
      std::ostringstream msg;
      msg << "boundary spectrum contains " << e.real() << (e.imag() < 0 ? " - " : " + ")
          << std::abs(e.imag()) << "i; e^{tL} has no limit";
      throw NoLimitError(msg.str(), e);
    }
  }

  const auto algebraic = static_cast<Eigen::Index>(
      std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(),
                    [&](const Complex& e) { return std::abs(e) <= tol; }));
  const CMatrix dense = l.materialize();
  const CMatrix right = kernel_basis(dense, 1e-8);
  const CMatrix left = kernel_basis(dense.adjoint(), 1e-8);
  if (right.cols() != algebraic || left.cols() != algebraic) {
    throw NoLimitError("eigenvalue 0 is not semisimple; e^{tL} grows polynomially", Complex(0.0, 0.0));
  }

  const CMatrix pairing = left.adjoint() * right;
  proj.matrix = right * pairing.partialPivLu().solve(left.adjoint());
  proj.rank = std::lround(proj.matrix.trace().real());
  return proj;
}

double eigenvector_constancy(const BlockOperator& l, Complex eigenvalue, const StateField& v) {
  const double tol = 1e-8 * std::max(1.0, l.potential().max_norm());
  if (std::abs(eigenvalue.real()) > tol) {
    throw InvalidInput("eigenvector_constancy needs an eigenvalue on the imaginary axis");
  }
  if (v.grid() != l.grid() || v.components() != l.components()) {
    throw InvalidInput("eigenvector does not match the operator");
  }
  const double total = v.values().squaredNorm();
  if (total == 0.0) {
    throw InvalidInput("eigenvector must be nonzero");
  }
  double worst = 0.0;
  for (Eigen::Index k = 0; k < v.components(); ++k) {
    const auto col = v.values().col(k);
    const Complex mean = col.mean();
    worst = std::max(worst, (col.array() - mean).abs2().sum() / total);
  }
  return worst;
}

}  // namespace parabolic
