#include "parabolic/potential_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parabolic/simplex.hpp"

namespace parabolic {

namespace {

constexpr double kConstantTol = 1e-14;
constexpr double kCouplingTol = 1e-14;

// Right singular vectors of `stacked` whose singular values are <= tol.
template <typename Mat>
Mat nullspace(const Mat& stacked, double tol) {
  const Eigen::Index n = stacked.cols();
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

RMatrix real_common_kernel(const PotentialField& v) {
  const Eigen::Index n = v.components();
  RMatrix stacked(2 * n * v.cell_count(), n);
  for (Eigen::Index c = 0; c < v.cell_count(); ++c) {
    stacked.block(2 * n * c, 0, n, n) = v.at(c).entries().real();
    stacked.block(2 * n * c + n, 0, n, n) = v.at(c).entries().imag();
  }
  return nullspace(stacked, 1e-8 * v.max_norm());
}

double min_separation(const CVector& eigs) {
  double sep = kInf;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    for (Eigen::Index j = i + 1; j < eigs.size(); ++j) {
      sep = std::min(sep, std::abs(eigs(i) - eigs(j)));
    }
  }
  return sep;
}

}  // namespace

// ---------------------------------------------------------------------------
// PotentialField

PotentialField::PotentialField(Grid grid, std::vector<SquareMatrix> cells)
    : grid_(std::move(grid)), cells_(std::move(cells)) {
  if (static_cast<Eigen::Index>(cells_.size()) != grid_.cell_count()) {
    throw InvalidInput("potential field needs one matrix per grid cell");
  }
  const Eigen::Index n = cells_.front().size();
  for (const auto& m : cells_) {
    if (m.size() != n) {
      throw InvalidInput("potential field cells must share one dimension N");
    }
    real_ = real_ && m.is_real();
    if (constant_) {
      constant_ = (m.entries() - cells_.front().entries()).cwiseAbs().maxCoeff() <= kConstantTol;
    }
  }
}

PotentialField PotentialField::sample(const Grid& grid,
                                      const std::function<CMatrix(double, double)>& f) {
  std::vector<SquareMatrix> cells;
  cells.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (Eigen::Index c = 0; c < grid.cell_count(); ++c) {
    const auto [x, y] = grid.center(c);
    cells.emplace_back(f(x, y));
  }
  return PotentialField(grid, std::move(cells));
}

PotentialField PotentialField::constant(const Grid& grid, const SquareMatrix& m) {
  return PotentialField(grid, std::vector<SquareMatrix>(static_cast<std::size_t>(grid.cell_count()), m));
}

double PotentialField::max_norm() const {
  double norm = 0.0;
  for (const auto& m : cells_) norm = std::max(norm, operator_norm(m, 2.0));
  return norm;
}

PotentialField PotentialField::scaled(double c) const {
  std::vector<SquareMatrix> cells;
  cells.reserve(cells_.size());
  for (const auto& m : cells_) cells.push_back(m.scaled(c));
  return PotentialField(grid_, std::move(cells));
}

// ---------------------------------------------------------------------------
// Structural searches

CVector normalize_phase(CVector v) {
  if (v.size() == 0) return v;
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-6)) {
      const Complex phase = std::conj(v(i)) / std::abs(v(i));
      v *= phase;
      v(i) = Complex(v(i).real(), 0.0);
      break;
    }
  }
  return v;
}

std::vector<CVector> common_kernel(const PotentialField& v, double beta) {
  const Eigen::Index n = v.components();
  CMatrix stacked(n * v.cell_count(), n);
  const CMatrix shift = Complex(0.0, beta) * CMatrix::Identity(n, n);
  for (Eigen::Index c = 0; c < v.cell_count(); ++c) {
    stacked.block(n * c, 0, n, n) = shift - v.at(c).entries();
  }
  const double tol = 1e-8 * (std::abs(beta) + v.max_norm());
  const CMatrix basis = nullspace(stacked, tol);
  std::vector<CVector> out;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    out.push_back(normalize_phase(basis.col(k)));
  }
  return out;
}

std::vector<double> imaginary_eigen_candidates(const PotentialField& v, Eigen::Index reference_cell) {
  if (reference_cell < 0 || reference_cell >= v.cell_count()) {
    throw InvalidInput("reference cell out of range");
  }
  const SquareMatrix& m = v.at(reference_cell);
  const double tol = axis_tolerance(m.entries());
  std::vector<double> betas;
  for (const Complex& z : spectrum(m)) {
    if (std::abs(z.real()) > tol) continue;
    const bool wanted = v.is_real() ? z.imag() > tol : std::abs(z.imag()) > tol;
    if (!wanted) continue;
    const bool seen = std::any_of(betas.begin(), betas.end(),
                                  [&](double b) { return std::abs(b - z.imag()) <= tol; });
    if (!seen) betas.push_back(z.imag());
  }
  std::sort(betas.begin(), betas.end(), std::greater<>());
  return betas;
}

std::optional<RVector> positive_kernel_vector(const PotentialField& v) {
  if (!v.is_real()) return std::nullopt;
  const RMatrix basis = real_common_kernel(v);
  const Eigen::Index n = basis.rows();
  const Eigen::Index k = basis.cols();
  if (k == 0) return std::nullopt;

  auto accept = [](RVector z) -> std::optional<RVector> {
    const double peak = z.cwiseAbs().maxCoeff();
    if (peak == 0.0 || z.minCoeff() <= 1e-9 * peak) return std::nullopt;
    return RVector(z / peak);
  };

  if (k == 1) {
    RVector z = basis.col(0);
    const Eigen::Index lead = [&] {
      Eigen::Index i = 0;
      z.cwiseAbs().maxCoeff(&i);
      return i;
    }();
    if (z(lead) < 0.0) z = -z;
    return accept(z);
  }

  // maximize t  s.t.  B c >= t 1,  |B c| <= 1,  t >= 0;  c = c+ - c-.
  // Variables: [c+ (k), c- (k), t].
  RMatrix a = RMatrix::Zero(3 * n, 2 * k + 1);
  RVector b = RVector::Zero(3 * n);
  a.block(0, 0, n, k) = -basis;
  a.block(0, k, n, k) = basis;
  a.col(2 * k).head(n).setOnes();
  a.block(n, 0, n, k) = basis;
  a.block(n, k, n, k) = -basis;
  b.segment(n, n).setOnes();
  a.block(2 * n, 0, n, k) = -basis;
  a.block(2 * n, k, n, k) = basis;
  b.segment(2 * n, n).setOnes();
  RVector objective = RVector::Zero(2 * k + 1);
  objective(2 * k) = 1.0;

  const LpSolution sol = maximize_lp(objective, a, b);
  if (!sol.bounded || sol.value <= 1e-9) return std::nullopt;
  const RVector c = sol.x.head(k) - sol.x.segment(k, k);
  return accept(basis * c);
}

std::optional<Diagonalization> simultaneous_diagonalizer(const PotentialField& v) {
  const Eigen::Index n = v.components();
  const double scale = v.max_norm();

  Eigen::Index ref = 0;
  double best_sep = -1.0;
  for (Eigen::Index c = 0; c < v.cell_count(); ++c) {
    Eigen::ComplexEigenSolver<CMatrix> solver(v.at(c).entries(), false);
    const double sep = min_separation(solver.eigenvalues());
    if (sep > best_sep) {
      best_sep = sep;
      ref = c;
    }
  }

  Eigen::ComplexEigenSolver<CMatrix> solver(v.at(ref).entries(), true);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const CVector& raw_vals = solver.eigenvalues();
  const std::vector<Complex> vals(raw_vals.data(), raw_vals.data() + raw_vals.size());
  const auto order = canonical_order(vals, scale, EigenOrder::ModulusAscending);

  CMatrix x(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]).normalized();
  }
  Eigen::JacobiSVD<CMatrix> svd(x);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) < 1e-8 * sv(0)) return std::nullopt;  // defective reference matrix

  const CMatrix u = x.inverse();
  Diagonalization diag;
  diag.transform = u;
  diag.reference_cell = ref;
  diag.curves.assign(static_cast<std::size_t>(n), CVector(v.cell_count()));
  double off_max = 0.0;
  for (Eigen::Index c = 0; c < v.cell_count(); ++c) {
    const CMatrix d = u * v.at(c).entries() * x;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) off_max = std::max(off_max, std::abs(d(i, j)));
      }
      diag.curves[static_cast<std::size_t>(i)](c) = d(i, i);
    }
  }
  if (off_max > 1e-8 * scale) return std::nullopt;
  return diag;
}

bool coupling_graph_irreducible(const PotentialField& v) {
  const Eigen::Index n = v.components();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> w =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  for (const auto& m : v.cells()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && std::abs(m(i, j)) > kCouplingTol) w(i, j) = true;
      }
    }
  }
  // Strongly connected iff node 0 reaches everything along W and along W^T.
  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool edge = transpose ? w(j, i) : w(i, j);
        if (edge && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return reaches_all(false) && reaches_all(true);
}

// ---------------------------------------------------------------------------
// Classification

ClassificationReport classify(const PotentialField& v, const ClassifyOptions& options) {
  ClassificationReport report;
  report.components = v.components();
  report.cells = v.cell_count();
  report.real = v.is_real();
  report.constant = v.is_constant();
  report.axis_tolerance = 1e-8 * std::max(1.0, v.max_norm());

  report.l2 = true;
  report.margin_l2 = kInf;
  if (report.real) {
    report.quasi_positive = true;
    report.l1 = true;
    report.linf = true;
    report.margin_l1 = kInf;
    report.margin_linf = kInf;
    for (double p : options.numeric_p) report.numeric_lp.push_back({p, true, std::nullopt, std::nullopt});
  }

  for (Eigen::Index c = 0; c < v.cell_count(); ++c) {
    const auto cell = dissipativity_report(v.at(c), options.numeric_p, options.sampler);
    report.l2 = report.l2 && cell.l2;
    report.margin_l2 = std::min(report.margin_l2, cell.margin_l2);
    if (!report.real) continue;
    report.quasi_positive = *report.quasi_positive && *cell.quasi_positive;
    report.l1 = *report.l1 && *cell.l1;
    report.linf = *report.linf && *cell.linf;
    report.margin_l1 = std::min(*report.margin_l1, *cell.margin_l1);
    report.margin_linf = std::min(*report.margin_linf, *cell.margin_linf);
    for (std::size_t i = 0; i < cell.numeric.size(); ++i) {
      auto& summary = report.numeric_lp[i];
      if (summary.dissipative && !cell.numeric[i].dissipative) {
        summary.dissipative = false;
        summary.witness_cell = c;
        summary.witness = cell.numeric[i].witness;
      }
    }
  }

  for (double beta : imaginary_eigen_candidates(v, options.reference_cell)) {
    report.imaginary_probes.push_back({beta, common_kernel(v, beta)});
  }
  report.positive_kernel_vector = positive_kernel_vector(v);
  report.diagonalizer = simultaneous_diagonalizer(v);
  report.irreducible = coupling_graph_irreducible(v);

  if (report.constant) {
    const SquareMatrix& m = v.at(0);
    report.constant_exp = exp_converges(m);
    Eigen::ComplexEigenSolver<CMatrix> solver(m.entries(), false);
    const CVector& raw = solver.eigenvalues();
    const std::vector<Complex> vals(raw.data(), raw.data() + raw.size());
    for (auto i : canonical_order(vals, v.max_norm(), EigenOrder::ModulusAscending)) {
      report.constant_eigenvalues.push_back(vals[static_cast<std::size_t>(i)]);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Prediction cascade

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Converges: return "Converges";
    case Verdict::DoesNotConverge: return "DoesNotConverge";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view rule_tag(Rule r) {
  switch (r) {
    case Rule::LpCase: return "Thm lp-case";
    case Rule::L2Case: return "Thm l2-case";
    case Rule::QuasiPositiveKernel: return "Prop boundedness-quasipositive-potential";
    case Rule::ConstantPotential: return "Prop constant-potential";
    case Rule::DecoupledSystem: return "Prop decoupled-system";
    case Rule::None: return "none";
  }
  return "none";
}

std::string_view to_string(RankHint h) {
  return h == RankHint::ZeroOrRankOne ? "zero-or-rank-1" : "unknown";
}

Prediction predict(const ClassificationReport& report, bool diffusion_identical) {
  const double tol = report.axis_tolerance;

  // 1. Real and l^1- or l^inf-dissipative everywhere.
  if (report.real && (report.l1.value_or(false) || report.linf.value_or(false))) {
    return {Verdict::Converges, Rule::LpCase, {}, RankHint::Unknown};
  }

  // 2. l^2-dissipative: convergence iff no nonzero imaginary common eigenvector.
  if (report.l2) {
    for (const auto& probe : report.imaginary_probes) {
      if (!probe.basis.empty()) {
        return {Verdict::DoesNotConverge, Rule::L2Case, KernelWitness{probe.beta, probe.basis.front()},
                RankHint::Unknown};
      }
    }
    return {Verdict::Converges, Rule::L2Case, {}, RankHint::Unknown};
  }

  // 3. Quasi-positive with a strictly positive common kernel vector.
  if (report.real && report.quasi_positive.value_or(false) && report.positive_kernel_vector) {
    return {Verdict::Converges, Rule::QuasiPositiveKernel, {},
            report.irreducible ? RankHint::ZeroOrRankOne : RankHint::Unknown};
  }

  // 4. Constant potential, identical diffusion: decided by e^{tV} on C^N.
  if (report.constant && diffusion_identical && report.constant_exp) {
    if (report.constant_exp->converges) {
      return {Verdict::Converges, Rule::ConstantPotential, {}, RankHint::Unknown};
    }
    const auto& eigs = report.constant_eigenvalues;
    std::size_t offending = 0;
    auto find = [&](auto pred) {
      for (std::size_t i = 0; i < eigs.size(); ++i) {
        if (pred(eigs[i])) return i;
      }
      return eigs.size();
    };
    offending = find([&](Complex z) { return z.real() > tol; });
    if (offending == eigs.size()) {
      offending = find([&](Complex z) { return std::abs(z.real()) <= tol && std::abs(z.imag()) > tol; });
    }
    if (offending == eigs.size()) {
      offending = find([&](Complex z) { return std::abs(z) <= tol; });
    }
    if (offending == eigs.size()) offending = 0;
    return {Verdict::DoesNotConverge, Rule::ConstantPotential,
            EigenCurveWitness{offending + 1, eigs[offending]}, RankHint::Unknown};
  }

  // 5. Simultaneously diagonalizable with Re lambda_k <= 0.
  if (report.diagonalizer && diffusion_identical) {
    const auto& curves = report.diagonalizer->curves;
    const bool stable = std::all_of(curves.begin(), curves.end(), [&](const CVector& lam) {
      return lam.real().maxCoeff() <= tol;
    });
    if (stable) {
      const Eigen::Index ref = report.diagonalizer->reference_cell;
      const double const_tol = 1e-10 * std::max(1.0, tol / 1e-8);
      for (std::size_t k = 0; k < curves.size(); ++k) {
        const Complex lam = curves[k](ref);
        const bool is_constant = (curves[k].array() - lam).abs().maxCoeff() <= const_tol;
        if (is_constant && std::abs(lam.real()) <= tol && std::abs(lam.imag()) > tol) {
          return {Verdict::DoesNotConverge, Rule::DecoupledSystem, EigenCurveWitness{k + 1, lam},
                  RankHint::Unknown};
        }
      }
      return {Verdict::Converges, Rule::DecoupledSystem, {}, RankHint::Unknown};
    }
  }

  return {Verdict::Unknown, Rule::None, {}, RankHint::Unknown};
}

}  // namespace parabolic
