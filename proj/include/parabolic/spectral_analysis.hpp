#pragma once

#include <vector>

#include "parabolic/discretization.hpp"

namespace parabolic {

struct SpectrumReport {
  std::vector<Complex> eigenvalues;  // real part descending
  CMatrix eigenvectors;              // column j belongs to eigenvalues[j]; empty unless requested
  double spectral_bound = 0.0;
  double tolerance = 1e-8;           // 1e-8 * max(1, ||L||_1)
  std::vector<Complex> boundary_spectrum;
  double gap = kInf;                 // s minus the largest real part off the boundary
};

/// Dense eigendecomposition of the materialized block operator.
SpectrumReport spectrum_block(const BlockOperator& l, bool with_vectors = false);

/// Eigenvalues with |Re| <= re_tol and |Im| >= im_tol.
std::vector<Complex> imaginary_axis_eigenvalues(const SpectrumReport& report, double re_tol = 1e-8,
                                                double im_tol = 1e-8);

class NoLimitError : public ScenarioError {
 public:
  NoLimitError(const std::string& what, Complex eigenvalue)
      : ScenarioError(what), eigenvalue_(eigenvalue) {}
  Complex eigenvalue() const { return eigenvalue_; }
  double beta() const { return eigenvalue_.imag(); }

 private:
  Complex eigenvalue_;
};

struct LimitProjection {
  CMatrix matrix;  // acts on flattened states, index k * cells + cell
  Eigen::Index rank = 0;

  StateField apply(const StateField& u) const;
};

/// lim e^{tL}. Throws NoLimitError when the boundary spectrum leaves {0}, the
/// spectral bound is positive, or 0 is not semisimple.
LimitProjection limit_projection(const BlockOperator& l, const SpectrumReport& report);

/// max_k sum_cells |v_k - mean(v_k)|^2 / ||v||^2 for an eigenvector at an
/// imaginary-axis eigenvalue.
double eigenvector_constancy(const BlockOperator& l, Complex eigenvalue, const StateField& v);

}  // namespace parabolic
