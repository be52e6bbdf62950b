#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "parabolic/grid.hpp"
#include "parabolic/matrix_analysis.hpp"

namespace parabolic {

/// Grid sample of a matrix-valued potential x -> V(x), one N x N matrix per
/// cell.
class PotentialField {
 public:
  PotentialField(Grid grid, std::vector<SquareMatrix> cells);

  /// Evaluates f at every cell center.
  static PotentialField sample(const Grid& grid,
                               const std::function<CMatrix(double x, double y)>& f);
  static PotentialField constant(const Grid& grid, const SquareMatrix& m);

  const Grid& grid() const { return grid_; }
  Eigen::Index components() const { return cells_.front().size(); }
  Eigen::Index cell_count() const { return static_cast<Eigen::Index>(cells_.size()); }
  const SquareMatrix& at(Eigen::Index cell) const { return cells_[static_cast<std::size_t>(cell)]; }
  const std::vector<SquareMatrix>& cells() const { return cells_; }

  bool is_real() const { return real_; }
  /// All cells equal within 1e-14.
  bool is_constant() const { return constant_; }

  /// max over cells of ||V(x)||_2.
  double max_norm() const;

  PotentialField scaled(double c) const;

  friend bool operator==(const PotentialField& a, const PotentialField& b) {
    return a.grid_ == b.grid_ && a.cells_ == b.cells_;
  }

 private:
  Grid grid_;
  std::vector<SquareMatrix> cells_;
  bool real_ = true;
  bool constant_ = true;
};

struct KernelProbe {
  double beta = 0.0;
  std::vector<CVector> basis;  // orthonormal basis of the common kernel of i*beta - V(x)
};

struct Diagonalization {
  CMatrix transform;                  // U with U V(x) U^{-1} diagonal
  std::vector<CVector> curves;        // curves[k](cell) = lambda_k(x)
  Eigen::Index reference_cell = 0;
};

struct NumericLpSummary {
  double p = 2.0;
  bool dissipative = true;  // on every cell, as far as sampling can tell
  std::optional<Eigen::Index> witness_cell;
  std::optional<RVector> witness;
};

struct ClassifyOptions {
  Eigen::Index reference_cell = 0;
  std::vector<double> numeric_p;
  SampleSpec sampler{2000, 0};
};

/// Pointwise criteria aggregated over every grid cell ("a.e." means "at every
/// cell"), plus the structural searches the prediction cascade needs.
struct ClassificationReport {
  Eigen::Index components = 0;
  Eigen::Index cells = 0;
  bool real = false;
  bool constant = false;
  std::optional<bool> quasi_positive;
  std::optional<bool> l1;
  bool l2 = false;
  std::optional<bool> linf;
  std::optional<double> margin_l1;
  double margin_l2 = 0.0;
  std::optional<double> margin_linf;
  std::vector<NumericLpSummary> numeric_lp;

  double axis_tolerance = 1e-8;
  std::vector<KernelProbe> imaginary_probes;
  std::optional<RVector> positive_kernel_vector;
  std::optional<Diagonalization> diagonalizer;
  bool irreducible = false;

  // Only for constant fields.
  std::optional<ExpConvergenceVerdict> constant_exp;
  std::vector<Complex> constant_eigenvalues;  // modulus-ascending order
};

ClassificationReport classify(const PotentialField& v, const ClassifyOptions& options = {});

/// Orthonormal basis of the intersection over cells of ker(i*beta - V(x)).
std::vector<CVector> common_kernel(const PotentialField& v, double beta);

/// Nonzero beta with i*beta an eigenvalue of V at the reference cell. For real
/// potentials only beta > 0 is listed (conjugate pairs are redundant).
std::vector<double> imaginary_eigen_candidates(const PotentialField& v,
                                               Eigen::Index reference_cell = 0);

/// Common real kernel vector with all components strictly positive, scaled to
/// max component 1.
std::optional<RVector> positive_kernel_vector(const PotentialField& v);

std::optional<Diagonalization> simultaneous_diagonalizer(const PotentialField& v);

bool coupling_graph_irreducible(const PotentialField& v);

enum class Verdict { Converges, DoesNotConverge, Unknown };
enum class Rule { LpCase, L2Case, QuasiPositiveKernel, ConstantPotential, DecoupledSystem, None };
enum class RankHint { ZeroOrRankOne, Unknown };

std::string_view to_string(Verdict v);
std::string_view rule_tag(Rule r);
std::string_view to_string(RankHint h);

struct KernelWitness {
  double beta = 0.0;
  CVector vector;
};

struct EigenCurveWitness {
  std::size_t k = 1;  // 1-based, modulus-ascending order at the reference cell
  Complex lambda;
};

using Witness = std::variant<std::monostate, KernelWitness, EigenCurveWitness>;

struct Prediction {
  Verdict verdict = Verdict::Unknown;
  Rule rule = Rule::None;
  Witness witness;
  RankHint limit_rank_hint = RankHint::Unknown;
};

/// First matching rule of the convergence cascade.
Prediction predict(const ClassificationReport& report, bool diffusion_identical);

/// Rotates v so that its first maximal-modulus component is real and positive.
CVector normalize_phase(CVector v);

}  // namespace parabolic
