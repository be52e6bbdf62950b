#include "parabolic/matrix_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace parabolic {

namespace {

void require_real(const SquareMatrix& m, const char* what) {
  if (!m.is_real()) {
    throw InvalidInput(std::string(what) + " is only defined for real matrices");
  }
}

bool is_valid_p(double p) { return p == 1.0 || p == 2.0 || p == kInf; }

// Pade approximants of degree 3..13 (Higham 2005 coefficients and thetas).
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kB3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kB5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kB7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                       25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kB9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                        302702400.0,   30270240.0,   2162160.0,
                                        110880.0,      3960.0,       90.0,
                                        1.0};
constexpr std::array<double, 14> kB13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

template <typename Mat>
Mat pade_solve(const Mat& u, const Mat& v) {
  const Mat den = v - u;
  const Mat num = v + u;
  return den.partialPivLu().solve(num);
}

template <typename Mat, std::size_t K>
Mat pade_low(const Mat& a, const std::array<double, K>& b) {
  const Eigen::Index n = a.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat a2 = a * a;
  Mat odd = b[1] * id;
  Mat even = b[0] * id;
  Mat power = id;
  for (std::size_t j = 2; j + 1 < K; j += 2) {
    power = (power * a2).eval();
    even += b[j] * power;
    odd += b[j + 1] * power;
  }
  const Mat u = a * odd;
  return pade_solve(u, even);
}

template <typename Mat>
Mat pade13(const Mat& a) {
  const Eigen::Index n = a.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const auto& b = kB13;
  const Mat inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  const Mat u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Mat inner_v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  const Mat v = inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

template <typename Mat>
Mat expm_impl(const Mat& a) {
  const Eigen::Index n = a.rows();
  const double norm1 = n == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) {
    return Mat::Identity(n, n);
  }
  if (norm1 <= kTheta[0]) return pade_low(a, kB3);
  if (norm1 <= kTheta[1]) return pade_low(a, kB5);
  if (norm1 <= kTheta[2]) return pade_low(a, kB7);
  if (norm1 <= kTheta[3]) return pade_low(a, kB9);
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  const Mat scaled = a * std::ldexp(1.0, -s);
  Mat r = pade13(scaled);
  for (int i = 0; i < s; ++i) {
    r = (r * r).eval();
  }
  return r;
}

double lp_norm(const RVector& x, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc += std::pow(std::abs(x(i)), p);
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace

// ---------------------------------------------------------------------------
// SquareMatrix

SquareMatrix::SquareMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw InvalidInput("SquareMatrix needs a nonempty square array");
  }
  double max_imag = 0.0;
  for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      const Complex z = entries_(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InvalidInput("SquareMatrix entries must be finite");
      }
      max_imag = std::max(max_imag, std::abs(z.imag()));
    }
  }
  real_ = max_imag == 0.0;
}

SquareMatrix::SquareMatrix(const RMatrix& entries) : SquareMatrix(CMatrix(entries.cast<Complex>())) {}

SquareMatrix SquareMatrix::identity(Eigen::Index n) { return SquareMatrix(RMatrix(RMatrix::Identity(n, n))); }

SquareMatrix SquareMatrix::zero(Eigen::Index n) { return SquareMatrix(RMatrix(RMatrix::Zero(n, n))); }

RMatrix SquareMatrix::real_entries() const {
  if (!real_) {
    throw InvalidInput("matrix has nonzero imaginary parts");
  }
  return entries_.real();
}

SquareMatrix SquareMatrix::scaled(Complex c) const { return SquareMatrix(CMatrix(entries_ * c)); }

// ---------------------------------------------------------------------------
// Pointwise criteria

bool is_quasi_positive(const SquareMatrix& m) {
  require_real(m, "quasi-positivity");
  const RMatrix a = m.real_entries();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j && a(i, j) < 0.0) return false;
    }
  }
  return true;
}

double l1_margin(const SquareMatrix& m) {
  require_real(m, "l1 dissipativity");
  const RMatrix a = m.real_entries();
  double margin = kInf;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      if (j != k) off += std::abs(a(j, k));
    }
    margin = std::min(margin, -(a(k, k) + off));
  }
  return margin;
}

double linf_margin(const SquareMatrix& m) {
  require_real(m, "l-infinity dissipativity");
  const RMatrix a = m.real_entries();
  double margin = kInf;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j != k) off += std::abs(a(k, j));
    }
    margin = std::min(margin, -(a(k, k) + off));
  }
  return margin;
}

double l2_margin(const SquareMatrix& m) {
  const CMatrix herm = 0.5 * (m.entries() + m.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return -solver.eigenvalues().maxCoeff();
}

bool is_l1_dissipative(const SquareMatrix& m) { return l1_margin(m) >= -kTolEig; }
bool is_linf_dissipative(const SquareMatrix& m) { return linf_margin(m) >= -kTolEig; }
bool is_l2_dissipative(const SquareMatrix& m) { return l2_margin(m) >= -kTolEig; }

double lp_pairing(const RMatrix& m, const RVector& xi, double p) {
  const RVector image = m * xi;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    if (xi(j) == 0.0) continue;
    const double dual = std::copysign(std::pow(std::abs(xi(j)), p - 1.0), xi(j));
    acc += dual * image(j);
  }
  return acc;
}

LpNumericVerdict is_lp_dissipative_numeric(const SquareMatrix& m, double p,
                                           const SampleSpec& sampler) {
  require_real(m, "numeric l^p dissipativity");
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidInput("numeric l^p test needs 1 <= p < inf");
  }
  const RMatrix a = m.real_entries();
  const Eigen::Index n = a.rows();

  struct Candidate {
    double phi;
    RVector xi;
  };
  std::vector<Candidate> pool;
  auto consider = [&](RVector xi) {
    const double norm = lp_norm(xi, p);
    if (norm == 0.0) return;
    xi /= norm;
    pool.push_back({lp_pairing(a, xi, p), std::move(xi)});
  };

  // Sign-pattern corners {-1, 0, 1}^N (canonical vectors included).
  if (n <= 8) {
    std::size_t patterns = 1;
    for (Eigen::Index i = 0; i < n; ++i) patterns *= 3;
    for (std::size_t code = 1; code < patterns; ++code) {
      RVector xi(n);
      std::size_t rest = code;
      for (Eigen::Index i = 0; i < n; ++i) {
        xi(i) = static_cast<double>(static_cast<int>(rest % 3) - 1);
        rest /= 3;
      }
      consider(std::move(xi));
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      consider(RVector::Unit(n, i));
      consider(-RVector::Unit(n, i));
    }
  }

  std::mt19937_64 rng(sampler.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t s = 0; s < sampler.count; ++s) {
    RVector xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = gauss(rng);
    consider(std::move(xi));
  }

  // Local (1+1)-ES refinement from the best few samples.
  constexpr std::size_t kStarts = 5;
  constexpr int kIterations = 600;
  std::partial_sort(pool.begin(), pool.begin() + std::min(kStarts, pool.size()), pool.end(),
                    [](const Candidate& x, const Candidate& y) { return x.phi > y.phi; });
  Candidate best = pool.front();
  for (std::size_t start = 0; start < std::min(kStarts, pool.size()); ++start) {
    if (best.phi > kTolEig) break;
    Candidate current = pool[start];
    double sigma = 0.3;
    for (int it = 0; it < kIterations && sigma > 1e-13; ++it) {
      RVector trial = current.xi;
      for (Eigen::Index i = 0; i < n; ++i) trial(i) += sigma * gauss(rng);
      const double norm = lp_norm(trial, p);
      if (norm == 0.0) continue;
      trial /= norm;
      const double phi = lp_pairing(a, trial, p);
      if (phi > current.phi) {
        current = {phi, std::move(trial)};
        sigma *= 1.5;
        if (current.phi > kTolEig) break;
      } else {
        sigma *= 0.9;
      }
    }
    if (current.phi > best.phi) best = current;
  }

  LpNumericVerdict verdict;
  verdict.p = p;
  verdict.max_phi = best.phi;
  verdict.dissipative = best.phi <= kTolEig;
  if (!verdict.dissipative) verdict.witness = best.xi;
  return verdict;
}

DissipativityReport dissipativity_report(const SquareMatrix& m, std::span<const double> numeric_p,
                                         const SampleSpec& sampler) {
  DissipativityReport report;
  report.margin_l2 = l2_margin(m);
  report.l2 = report.margin_l2 >= -kTolEig;
  if (m.is_real()) {
    report.margin_l1 = l1_margin(m);
    report.margin_linf = linf_margin(m);
    report.l1 = *report.margin_l1 >= -kTolEig;
    report.linf = *report.margin_linf >= -kTolEig;
    report.quasi_positive = is_quasi_positive(m);
    for (double p : numeric_p) {
      report.numeric.push_back(is_lp_dissipative_numeric(m, p, sampler));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Norms and exponentials

double operator_norm(const CMatrix& m, double p) {
  if (!is_valid_p(p)) {
    throw InvalidInput("operator_norm supports p in {1, 2, inf}");
  }
  if (p == 1.0) return m.cwiseAbs().colwise().sum().maxCoeff();
  if (p == kInf) return m.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double operator_norm(const SquareMatrix& m, double p) { return operator_norm(m.entries(), p); }

CMatrix expm(const CMatrix& a) { return expm_impl(a); }
RMatrix expm(const RMatrix& a) { return expm_impl(a); }

SquareMatrix matrix_exp(const SquareMatrix& m, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidInput("matrix_exp needs a finite t >= 0");
  }
  if (m.is_real()) {
    return SquareMatrix(expm(RMatrix(t * m.real_entries())));
  }
  return SquareMatrix(expm(CMatrix(t * m.entries())));
}

ContractivityResult contractivity_oracle(const SquareMatrix& m, double p,
                                         std::span<const double> t_grid) {
  if (!is_valid_p(p)) {
    throw InvalidInput("contractivity_oracle supports p in {1, 2, inf}");
  }
  if (t_grid.empty()) {
    throw InvalidInput("contractivity_oracle needs a nonempty time grid");
  }
  bool has_small = false;
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw InvalidInput("contractivity_oracle times must be finite and >= 0");
    }
    has_small = has_small || t <= 1e-3;
  }
  if (!has_small) {
    throw InvalidInput("contractivity_oracle time grid must contain some t <= 1e-3");
  }
  for (double t : t_grid) {
    if (operator_norm(matrix_exp(m, t), p) > 1.0 + 1e-9) {
      return {false, t};
    }
  }
  return {true, std::nullopt};
}

std::vector<double> dyadic_grid(int lo, int hi) {
  std::vector<double> grid;
  for (int e = lo; e <= hi; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

// ---------------------------------------------------------------------------
// Spectra

std::vector<Eigen::Index> canonical_order(std::span<const Complex> eigs, double scale,
                                          EigenOrder order) {
  const double quantum = 1e-9 * std::max(1.0, scale);
  auto q = [quantum](double v) { return std::llround(v / quantum); };
  std::vector<Eigen::Index> idx(eigs.size());
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const Complex x = eigs[static_cast<std::size_t>(a)];
    const Complex y = eigs[static_cast<std::size_t>(b)];
    if (order == EigenOrder::ModulusAscending) {
      const auto mx = q(std::abs(x));
      const auto my = q(std::abs(y));
      if (mx != my) return mx < my;
    }
    const auto rx = q(x.real());
    const auto ry = q(y.real());
    if (rx != ry) return rx > ry;
    return q(x.imag()) > q(y.imag());
  });
  return idx;
}

double axis_tolerance(const CMatrix& m) { return 1e-8 * std::max(1.0, operator_norm(m, 2.0)); }

std::vector<Complex> spectrum(const SquareMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> solver(m.entries(), false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue solver did not converge");
  }
  std::vector<Complex> raw(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  const auto order = canonical_order(raw, operator_norm(m.entries(), 2.0), EigenOrder::RealDescending);
  std::vector<Complex> sorted;
  sorted.reserve(raw.size());
  for (auto i : order) sorted.push_back(raw[static_cast<std::size_t>(i)]);
  return sorted;
}

double spectral_bound(const SquareMatrix& m) {
  double s = -kInf;
  for (const Complex& z : spectrum(m)) s = std::max(s, z.real());
  return s;
}

ExpConvergenceVerdict exp_converges(const SquareMatrix& m) {
  const double tol = axis_tolerance(m.entries());
  const auto eigs = spectrum(m);

  ExpConvergenceVerdict verdict;
  verdict.spectral_bound = -kInf;
  std::size_t zero_multiplicity = 0;
  bool only_zero_on_axis = true;
  for (const Complex& z : eigs) {
    verdict.spectral_bound = std::max(verdict.spectral_bound, z.real());
    if (std::abs(z.real()) <= tol) {
      verdict.imaginary_axis_eigs.push_back(z.imag());
      if (std::abs(z.imag()) > tol) only_zero_on_axis = false;
    }
    if (std::abs(z) <= tol) ++zero_multiplicity;
  }

  if (zero_multiplicity > 0) {
    Eigen::JacobiSVD<CMatrix> svd(m.entries());
    const double norm = svd.singularValues()(0);
    std::size_t nullity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) <= 1e-8 * norm) ++nullity;
    }
    verdict.zero_semisimple = nullity == zero_multiplicity;
  }

  if (verdict.spectral_bound < -tol) {
    verdict.converges = true;
  } else {
    verdict.converges = std::abs(verdict.spectral_bound) <= tol && only_zero_on_axis &&
                        verdict.zero_semisimple;
  }
  return verdict;
}

}  // namespace parabolic
