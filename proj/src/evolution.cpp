#include "parabolic/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace parabolic {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::StrangCrankNicolson: return "strang+crank-nicolson";
    case Scheme::StrangBackwardEuler: return "strang+backward-euler";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "strang+crank-nicolson" || name == "crank-nicolson" || name == "cn") {
    return Scheme::StrangCrankNicolson;
  }
  if (name == "strang+backward-euler" || name == "backward-euler" || name == "be") {
    return Scheme::StrangBackwardEuler;
  }
  return std::nullopt;
}

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::Converged: return "Converged";
    case Behavior::Oscillating: return "Oscillating";
    case Behavior::Diverging: return "Diverging";
    case Behavior::Undecided: return "Undecided";
  }
  return "?";
}

std::string_view to_string(Agreement a) {
  switch (a) {
    case Agreement::Agree: return "agree";
    case Agreement::Inconclusive: return "inconclusive";
    case Agreement::Contradiction: return "contradiction";
  }
  return "?";
}

std::string_view to_string(SpectralVerdict v) {
  switch (v) {
    case SpectralVerdict::Converges: return "Converges";
    case SpectralVerdict::DoesNotConverge: return "DoesNotConverge";
    case SpectralVerdict::Skipped: return "Skipped";
  }
  return "?";
}

CoercivityEstimate validate(const Scenario& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    throw ScenarioError("dt must be positive and finite");
  }
  if (!(s.window > 0.0) || !std::isfinite(s.horizon) || s.horizon < 10.0 * s.window * (1.0 - 1e-12)) {
    throw ScenarioError("horizon must cover at least 10 detection windows");
  }
  if (s.dt > s.horizon) {
    throw ScenarioError("dt exceeds the horizon");
  }
  if (s.diffusion.grid() != s.potential.grid() || s.initial.grid() != s.potential.grid()) {
    throw ScenarioError("diffusion, potential and initial data live on different grids");
  }
  if (s.diffusion.equations() != s.potential.components() ||
      s.initial.components() != s.potential.components()) {
    throw ScenarioError("component counts of diffusion, potential and initial data differ");
  }
  return coercivity_check(s.diffusion);
}

// ---------------------------------------------------------------------------

struct Stepper::Diffusion {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  Eigen::SparseMatrix<double> explicit_part;  // I + dt/2 B for Crank-Nicolson, empty otherwise
};

Stepper::Stepper(const DiffusionField& diffusion, const PotentialField& potential, double dt, Scheme scheme)
    : dt_(dt), scheme_(scheme) {
  if (!(dt > 0.0)) throw ScenarioError("dt must be positive");
  if (diffusion.grid() != potential.grid() || diffusion.equations() != potential.components()) {
    throw ScenarioError("diffusion and potential do not match");
  }

  if (potential.is_constant()) {
    half_exp_.push_back(expm(CMatrix(potential.at(0).entries() * (0.5 * dt))));
  } else {
    half_exp_.reserve(static_cast<std::size_t>(potential.cell_count()));
    for (const auto& v : potential.cells()) half_exp_.push_back(expm(CMatrix(v.entries() * (0.5 * dt))));
  }

  const Eigen::Index cells = diffusion.grid().cell_count();
  Eigen::SparseMatrix<double> eye(cells, cells);
  eye.setIdentity();
  const double implicit_weight = scheme == Scheme::StrangCrankNicolson ? 0.5 * dt : dt;
  for (Eigen::Index k = 0; k < diffusion.equations(); ++k) {
    const auto& coeff = diffusion.equation(k);
    bool reused = false;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (diffusion.equation(j) == coeff) {
        diffusion_.push_back(diffusion_[static_cast<std::size_t>(j)]);
        reused = true;
        break;
      }
    }
    if (reused) continue;

    const auto b = assemble_diffusion(diffusion.grid(), coeff).matrix;
    auto d = std::make_shared<Diffusion>();
    d->solver.compute(eye - implicit_weight * b);
    if (d->solver.info() != Eigen::Success) {
      throw ScenarioError("diffusion step matrix could not be factorized");
    }
    if (scheme == Scheme::StrangCrankNicolson) d->explicit_part = eye + (0.5 * dt) * b;
    diffusion_.push_back(std::move(d));
  }
}

Stepper::Stepper(const Scenario& s) : Stepper(s.diffusion, s.potential, s.dt, s.scheme) {}

void Stepper::apply_potential(CMatrix& values) const {
  if (half_exp_.size() == 1) {
    values = values * half_exp_.front().transpose();
    return;
  }
  for (Eigen::Index c = 0; c < values.rows(); ++c) {
    values.row(c) = values.row(c) * half_exp_[static_cast<std::size_t>(c)].transpose();
  }
}

void Stepper::advance(StateField& u) const {
  CMatrix& values = u.values();
  apply_potential(values);
  RMatrix parts(values.rows(), 2);
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    const auto& d = *diffusion_[static_cast<std::size_t>(k)];
    parts.col(0) = values.col(k).real();
    parts.col(1) = values.col(k).imag();
    if (scheme_ == Scheme::StrangCrankNicolson) parts = d.explicit_part * parts;
    parts = d.solver.solve(parts);
    values.col(k).real() = parts.col(0);
    values.col(k).imag() = parts.col(1);
  }
  apply_potential(values);
}

StateField Stepper::step(const StateField& u) const {
  StateField out = u;
  advance(out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double max_modulus(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

SimulationTrace simulate(const Scenario& s) {
  validate(s);
  const Stepper stepper(s);

  const auto total_steps = static_cast<std::size_t>(std::llround(s.horizon / s.dt));
  const auto sample_every =
      static_cast<std::size_t>(std::max<long long>(1, std::llround(s.window / (8.0 * s.dt))));
  constexpr std::size_t kLag = 8;

  SimulationTrace trace{.initial = s.initial, .final_state = s.initial, .window = s.window};
  const double u0_inf = max_modulus(s.initial.values());
  const double overflow_at = 1e12 * (u0_inf > 0.0 ? u0_inf : 1.0);

  std::deque<CMatrix> recent;
  auto record = [&](double t, const StateField& u) {
    trace.times.push_back(t);
    trace.norm1.push_back(discrete_norm(u, 1.0));
    trace.norm2.push_back(discrete_norm(u, 2.0));
    trace.norminf.push_back(discrete_norm(u, kInf));
    const CMatrix& back = recent.size() >= kLag ? recent.front() : s.initial.values();
    trace.residual.push_back(max_modulus(u.values() - back));
    trace.probe.push_back(u.values()(0, 0));
    recent.push_back(u.values());
    if (recent.size() > kLag) recent.pop_front();
  };

  StateField u = s.initial;
  record(0.0, u);
  for (std::size_t n = 1; n <= total_steps; ++n) {
    stepper.advance(u);
    trace.steps = n;
    if (n % sample_every == 0 || n == total_steps) {
      if (!u.values().allFinite() || max_modulus(u.values()) > overflow_at) {
        trace.overflow = true;
        break;
      }
      record(static_cast<double>(n) * s.dt, u);
    }
  }
  if (!trace.overflow) trace.final_state = u;
  return trace;
}

// ---------------------------------------------------------------------------

namespace {

// Least-squares fit y ~ c + a cos(w t) + b sin(w t); returns ||y - fit||.
double sinusoid_residual(const RVector& y, double spacing, double omega) {
  const Eigen::Index n = y.size();
  RMatrix design(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * spacing;
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(omega * t);
    design(i, 2) = std::sin(omega * t);
  }
  const RVector coef = design.colPivHouseholderQr().solve(y);
  return (y - design * coef).norm();
}

}  // namespace

std::optional<PeriodFit> estimate_period(const std::vector<double>& samples, double spacing) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 8 || !(spacing > 0.0)) return std::nullopt;
  RVector y = Eigen::Map<const RVector>(samples.data(), n);
  y.array() -= y.mean();
  const double energy = y.squaredNorm();
  if (!(energy > 0.0)) return std::nullopt;

  const Eigen::Index max_lag = (3 * n) / 4;
  RVector acf(max_lag + 1);
  for (Eigen::Index k = 0; k <= max_lag; ++k) {
    acf(k) = y.head(n - k).dot(y.tail(n - k)) / energy;
  }
  Eigen::Index crossing = 1;
  while (crossing <= max_lag && acf(crossing) > 0.0) ++crossing;
  if (crossing > max_lag) return std::nullopt;
  const double top = acf.segment(crossing, max_lag - crossing + 1).maxCoeff();
  if (!(top > 0.0)) return std::nullopt;
  // First local maximum close to the highest one; later peaks sit at multiples
  // of the period.
  Eigen::Index lag = max_lag;
  for (Eigen::Index k = crossing; k < max_lag; ++k) {
    if (acf(k) >= 0.8 * top && acf(k) >= acf(k - 1) && acf(k) >= acf(k + 1)) {
      lag = k;
      break;
    }
  }
  if (lag >= max_lag) return std::nullopt;

  // Golden-section search for the best-fitting angular frequency near the peak.
  const double two_pi = 2.0 * std::numbers::pi;
  double lo = two_pi / ((static_cast<double>(lag) + 1.0) * spacing);
  double hi = two_pi / (std::max(static_cast<double>(lag) - 1.0, 0.5) * spacing);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  double fa = sinusoid_residual(y, spacing, a);
  double fb = sinusoid_residual(y, spacing, b);
  for (int iter = 0; iter < 80; ++iter) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = sinusoid_residual(y, spacing, a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = sinusoid_residual(y, spacing, b);
    }
  }
  const double omega = 0.5 * (lo + hi);
  PeriodFit fit;
  fit.period = two_pi / omega;
  fit.fit_residual = sinusoid_residual(y, spacing, omega) / std::sqrt(energy);
  return fit;
}

DetectionReport detect(const SimulationTrace& trace, const DetectionThresholds& thresholds) {
  DetectionReport report;
  const double u0_inf = max_modulus(trace.initial.values());
  report.residual_threshold = thresholds.residual * (1.0 + u0_inf);
  report.final_residual = trace.residual.empty() ? 0.0 : trace.residual.back();

  const double peak = trace.norminf.empty() ? 0.0 : *std::max_element(trace.norminf.begin(), trace.norminf.end());
  report.growth = u0_inf > 0.0 ? peak / u0_inf : (peak > 0.0 ? kInf : 1.0);
  if (trace.overflow || report.growth >= thresholds.growth) {
    report.verdict = Behavior::Diverging;
    return report;
  }
  if (trace.times.empty() || trace.times.back() < 10.0 * trace.window * (1.0 - 1e-9)) {
    return report;
  }

  const std::size_t n = trace.residual.size();
  const double noise_floor = 1e-12 * (1.0 + u0_inf);
  if (n >= 3) {
    const double r0 = trace.residual[n - 3], r1 = trace.residual[n - 2], r2 = trace.residual[n - 1];
    report.residual_decreasing = (r0 >= r1 && r1 >= r2) || std::max({r0, r1, r2}) <= noise_floor;
  }
  if (report.final_residual <= report.residual_threshold && report.residual_decreasing) {
    report.verdict = Behavior::Converged;
    report.limit = trace.final_state;
    return report;
  }

  const std::size_t half = n / 2;
  const auto [rmin, rmax] = std::minmax_element(trace.residual.begin() + static_cast<std::ptrdiff_t>(half),
                                                trace.residual.end());
  if (*rmin < report.residual_threshold || *rmin < 0.1 * *rmax) {
    return report;
  }

  std::vector<double> re, im;
  for (std::size_t i = trace.probe.size() / 4; i < trace.probe.size(); ++i) {
    re.push_back(trace.probe[i].real());
    im.push_back(trace.probe[i].imag());
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  const auto& signal = spread(re) >= spread(im) ? re : im;
  const double spacing = trace.times.size() > 1 ? trace.times[1] - trace.times[0] : 0.0;
  const auto fit = estimate_period(signal, spacing);
  if (!fit) return report;
  report.fit_residual = fit->fit_residual;
  if (fit->fit_residual <= thresholds.period_fit) {
    report.verdict = Behavior::Oscillating;
    report.period = fit->period;
  }
  return report;
}

// ---------------------------------------------------------------------------

bool VerifyReport::contradiction() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const AgreementRow& r) { return r.outcome == Agreement::Contradiction; });
}

namespace {

Agreement against_detection(bool expect_converge, Behavior b, bool imaginary_spectrum) {
  if (expect_converge) {
    if (b == Behavior::Converged) return Agreement::Agree;
    if (b == Behavior::Undecided) return Agreement::Inconclusive;
    return Agreement::Contradiction;
  }
  switch (b) {
    case Behavior::Oscillating:
    case Behavior::Diverging: return Agreement::Agree;
    case Behavior::Converged: return Agreement::Contradiction;
    case Behavior::Undecided: return imaginary_spectrum ? Agreement::Agree : Agreement::Inconclusive;
  }
  return Agreement::Inconclusive;
}

}  // namespace

VerifyReport verify(const Scenario& s, const ClassifyOptions& options) {
  ClassificationReport classification = classify(s.potential, options);
  Prediction prediction = predict(classification, s.diffusion.identical());
  SimulationTrace trace = simulate(s);
  DetectionReport detection = detect(trace, s.thresholds);

  VerifyReport report{.classification = std::move(classification),
                      .prediction = std::move(prediction),
                      .trace = std::move(trace),
                      .detection = std::move(detection)};

  const BlockOperator op = assemble_block(s.diffusion, s.potential);
  bool imaginary_spectrum = false;
  if (op.size() <= kMaxMaterializedSize) {
    report.spectrum = spectrum_block(op);
    imaginary_spectrum = !imaginary_axis_eigenvalues(*report.spectrum, report.spectrum->tolerance,
                                                     report.spectrum->tolerance)
                              .empty();
    try {
      report.projection = limit_projection(op, *report.spectrum);
      report.spectral = SpectralVerdict::Converges;
    } catch (const NoLimitError& e) {
      report.spectral = SpectralVerdict::DoesNotConverge;
      report.spectral_note = e.what();
    }
  } else {
    std::ostringstream note;
    note << "operator size " << op.size() << " exceeds the dense cap " << kMaxMaterializedSize;
    report.spectral_note = note.str();
  }
  if (report.projection && report.detection.limit) {
    const StateField expected = report.projection->apply(s.initial);
    report.limit_error = max_modulus(report.detection.limit->values() - expected.values());
  }

  const Verdict predicted = report.prediction.verdict;
  const Behavior observed = report.detection.verdict;

  AgreementRow pd{"prediction", "detection", std::string(to_string(predicted)),
                  std::string(to_string(observed)), Agreement::Inconclusive};
  if (predicted != Verdict::Unknown) {
    pd.outcome = against_detection(predicted == Verdict::Converges, observed, imaginary_spectrum);
  }
  report.rows.push_back(pd);

  AgreementRow ps{"prediction", "spectrum", std::string(to_string(predicted)),
                  std::string(to_string(report.spectral)), Agreement::Inconclusive};
  if (predicted != Verdict::Unknown && report.spectral != SpectralVerdict::Skipped) {
    const bool same = (predicted == Verdict::Converges) == (report.spectral == SpectralVerdict::Converges);
    ps.outcome = same ? Agreement::Agree : Agreement::Contradiction;
  }
  report.rows.push_back(ps);

  AgreementRow ds{"detection", "spectrum", std::string(to_string(observed)),
                  std::string(to_string(report.spectral)), Agreement::Inconclusive};
  if (report.spectral != SpectralVerdict::Skipped) {
    ds.outcome = against_detection(report.spectral == SpectralVerdict::Converges, observed, imaginary_spectrum);
  }
  report.rows.push_back(ds);
  return report;
}

}  // namespace parabolic
