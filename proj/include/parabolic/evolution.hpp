#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parabolic/discretization.hpp"
#include "parabolic/potential_field.hpp"
#include "parabolic/spectral_analysis.hpp"

namespace parabolic {

enum class Scheme { StrangCrankNicolson, StrangBackwardEuler };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

struct DetectionThresholds {
  double residual = 1e-8;    // relative to 1 + ||u0||_inf
  double growth = 1e3;
  double period_fit = 0.05;

  friend bool operator==(const DetectionThresholds&, const DetectionThresholds&) = default;
};

struct Scenario {
  std::string name;
  DiffusionField diffusion;
  PotentialField potential;
  StateField initial;
  double dt = 1e-2;
  double horizon = 20.0;
  double window = 1.0;
  Scheme scheme = Scheme::StrangCrankNicolson;
  DetectionThresholds thresholds;

  const Grid& grid() const { return potential.grid(); }
  bool operator==(const Scenario&) const = default;
};

/// Checks the scenario invariants; throws ScenarioError (or CoercivityError).
CoercivityEstimate validate(const Scenario& s);

/// One Strang step E_V(dt/2) D(dt) E_V(dt/2). Holds the per-cell half-step
/// exponentials and the factorized diffusion solves, so it is cheap to call
/// repeatedly.
class Stepper {
 public:
  Stepper(const DiffusionField& diffusion, const PotentialField& potential, double dt, Scheme scheme);
  explicit Stepper(const Scenario& s);

  double dt() const { return dt_; }
  void advance(StateField& u) const;
  StateField step(const StateField& u) const;

 private:
  struct Diffusion;

  void apply_potential(CMatrix& values) const;

  double dt_;
  Scheme scheme_;
  std::vector<CMatrix> half_exp_;  // one per cell, or a single entry for constant V
  std::vector<std::shared_ptr<const Diffusion>> diffusion_;
};

struct SimulationTrace {
  std::vector<double> times{};
  std::vector<double> norm1{};
  std::vector<double> norm2{};
  std::vector<double> norminf{};
  std::vector<double> residual{};  // ||u(t) - u(t - window)||_inf
  std::vector<Complex> probe{};  // component 1 at cell 0
  StateField initial;
  StateField final_state;
  double window = 1.0;
  std::size_t steps = 0;
  bool overflow = false;
};

/// Steps to the horizon, sampling every window / 8.
SimulationTrace simulate(const Scenario& s);

enum class Behavior { Converged, Oscillating, Diverging, Undecided };
std::string_view to_string(Behavior b);

struct DetectionReport {
  Behavior verdict = Behavior::Undecided;
  std::optional<StateField> limit;
  std::optional<double> period;
  std::optional<double> fit_residual;
  double final_residual = 0.0;
  double residual_threshold = 0.0;
  double growth = 1.0;  // max_t ||u||_inf / ||u0||_inf
  bool residual_decreasing = false;
};

DetectionReport detect(const SimulationTrace& trace, const DetectionThresholds& thresholds = {});

struct PeriodFit {
  double period = 0.0;
  double fit_residual = kInf;  // ||y - fit|| / ||y - mean(y)||
};

/// Dominant period of a uniformly sampled signal: autocorrelation peak,
/// refined by a least-squares sinusoid fit.
std::optional<PeriodFit> estimate_period(const std::vector<double>& samples, double spacing);

enum class Agreement { Agree, Inconclusive, Contradiction };
std::string_view to_string(Agreement a);

struct AgreementRow {
  std::string left;
  std::string right;
  std::string left_value;
  std::string right_value;
  Agreement outcome = Agreement::Inconclusive;
};

enum class SpectralVerdict { Converges, DoesNotConverge, Skipped };
std::string_view to_string(SpectralVerdict v);

struct VerifyReport {
  ClassificationReport classification;
  Prediction prediction;
  SimulationTrace trace;
  DetectionReport detection;
  std::optional<SpectrumReport> spectrum{};
  std::optional<LimitProjection> projection{};
  SpectralVerdict spectral = SpectralVerdict::Skipped;
  std::string spectral_note{};
  std::optional<double> limit_error{};  // ||u(T) - P u0||_inf when both exist
  std::vector<AgreementRow> rows{};

  bool contradiction() const;
};

VerifyReport verify(const Scenario& s, const ClassifyOptions& options = {});

}  // namespace parabolic
