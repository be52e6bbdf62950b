#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "parabolic/types.hpp"

namespace parabolic {

/// Threshold for "<= 0" decisions on eigenvalues and on the diagonal-dominance
/// inequalities.
inline constexpr double kTolEig = 1e-10;

/// Dense N x N complex matrix with finite entries. Remembers whether every
/// imaginary part is exactly zero.
class SquareMatrix {
 public:
  explicit SquareMatrix(CMatrix entries);
  explicit SquareMatrix(const RMatrix& entries);

  static SquareMatrix identity(Eigen::Index n);
  static SquareMatrix zero(Eigen::Index n);

  Eigen::Index size() const { return entries_.rows(); }
  bool is_real() const { return real_; }
  const CMatrix& entries() const { return entries_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// Real part; throws InvalidInput when the matrix is not real.
  RMatrix real_entries() const;

  SquareMatrix scaled(Complex c) const;

  friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
    return a.entries_ == b.entries_;
  }

 private:
  CMatrix entries_;
  bool real_ = true;
};

// Appendix-style pointwise criteria. The real-only ones throw InvalidInput on
// complex matrices.
bool is_quasi_positive(const SquareMatrix& m);
bool is_l1_dissipative(const SquareMatrix& m);
bool is_linf_dissipative(const SquareMatrix& m);
bool is_l2_dissipative(const SquareMatrix& m);

// Margins: the negated logarithmic norm. Nonnegative (up to kTolEig) iff the
// matching criterion holds.
double l1_margin(const SquareMatrix& m);
double linf_margin(const SquareMatrix& m);
double l2_margin(const SquareMatrix& m);

struct SampleSpec {
  std::size_t count = 10000;
  std::uint64_t seed = 0;
};

struct LpNumericVerdict {
  double p = 2.0;
  bool dissipative = true;
  std::optional<RVector> witness;  // l^p-normalized; set iff !dissipative
  double max_phi = 0.0;            // largest sampled value of the dual pairing
};

/// Sampling falsifier for l^p dissipativity of a real matrix, 1 <= p < inf.
/// A "true" verdict only means no violating direction was found.
LpNumericVerdict is_lp_dissipative_numeric(const SquareMatrix& m, double p,
                                           const SampleSpec& sampler = {});

/// The dual pairing (sgn xi |xi|^{p-1})^T M xi.
double lp_pairing(const RMatrix& m, const RVector& xi, double p);

struct DissipativityReport {
  // Real-only verdicts are empty for complex matrices.
  std::optional<bool> l1;
  bool l2 = false;
  std::optional<bool> linf;
  std::optional<bool> quasi_positive;
  std::vector<LpNumericVerdict> numeric;
  std::optional<double> margin_l1;
  double margin_l2 = 0.0;
  std::optional<double> margin_linf;
};

DissipativityReport dissipativity_report(const SquareMatrix& m,
                                         std::span<const double> numeric_p = {},
                                         const SampleSpec& sampler = {});

/// Induced operator norm for p in {1, 2, inf}.
double operator_norm(const SquareMatrix& m, double p);
double operator_norm(const CMatrix& m, double p);

/// e^{tM}, t >= 0, by Pade scaling and squaring.
SquareMatrix matrix_exp(const SquareMatrix& m, double t);
CMatrix expm(const CMatrix& a);
RMatrix expm(const RMatrix& a);

struct ContractivityResult {
  bool contractive = true;
  std::optional<double> violating_t;
};

/// Brute-force check of ||e^{tM}||_{p->p} <= 1 + 1e-9 over the given times.
ContractivityResult contractivity_oracle(const SquareMatrix& m, double p,
                                         std::span<const double> t_grid);

/// {2^lo, ..., 2^hi}.
std::vector<double> dyadic_grid(int lo = -10, int hi = 4);

/// Eigenvalues with multiplicity, ordered by real part then imaginary part
/// (both descending).
std::vector<Complex> spectrum(const SquareMatrix& m);
double spectral_bound(const SquareMatrix& m);

struct ExpConvergenceVerdict {
  bool converges = false;
  double spectral_bound = 0.0;
  std::vector<double> imaginary_axis_eigs;
  bool zero_semisimple = true;
};

/// Whether e^{tM} converges as t -> infinity.
ExpConvergenceVerdict exp_converges(const SquareMatrix& m);

/// Eigen-tolerance used for axis tests on m: 1e-8 * max(1, ||m||_2).
double axis_tolerance(const CMatrix& m);

/// Sorts eigenvalues into a deterministic order that is insensitive to
/// rounding noise below 1e-9 * scale. Returns the permutation.
enum class EigenOrder { RealDescending, ModulusAscending };
std::vector<Eigen::Index> canonical_order(std::span<const Complex> eigs, double scale,
                                          EigenOrder order);

}  // namespace parabolic
