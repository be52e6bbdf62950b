#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "parabolic/evolution.hpp"

namespace parabolic {

/// sum_ij c[i][j] x^i y^j.
struct Polynomial {
  std::vector<std::vector<double>> coefficients;

  static Polynomial constant(double c) { return {{{c}}}; }
  /// c0 + c1 x + c2 x^2 + ...
  static Polynomial in_x(std::vector<double> c);

  double operator()(double x, double y) const;
  bool is_constant() const;
  bool operator==(const Polynomial&) const = default;
};

struct CoefSpec {
  Polynomial xx;
  std::optional<Polynomial> yy;  // defaults to xx on 2D grids
  bool operator==(const CoefSpec&) const = default;
};

struct DiffusionSpec {
  bool identical = true;
  std::vector<CoefSpec> equations;  // exactly one entry when identical
  bool operator==(const DiffusionSpec&) const = default;
};

enum class FactorKind { One, X, Y, OnePlusX, Poly };

struct AffineTerm {
  FactorKind factor = FactorKind::One;
  Polynomial poly;  // used when factor == Poly
  CMatrix matrix;
  bool operator==(const AffineTerm&) const = default;
};

struct BuiltinPotential {
  std::string name;
  bool operator==(const BuiltinPotential&) const = default;
};
struct ConstantPotential {
  CMatrix matrix;
  bool operator==(const ConstantPotential&) const = default;
};
struct AffinePotential {
  std::optional<CMatrix> c0;
  std::vector<AffineTerm> terms;
  bool operator==(const AffinePotential&) const = default;
};
using PotentialSpec = std::variant<BuiltinPotential, ConstantPotential, AffinePotential>;

struct ConstantInitial {
  CVector value;
  bool operator==(const ConstantInitial&) const = default;
};
struct PolynomialInitial {
  std::vector<Polynomial> components;
  bool operator==(const PolynomialInitial&) const = default;
};
struct RandomInitial {
  std::uint64_t seed = 0;
  Eigen::Index components = 0;  // 0: one per potential component
  double amplitude = 1.0;
  bool operator==(const RandomInitial&) const = default;
};
/// u_k = cos(mode_k * pi * x / Lx).
struct CosineInitial {
  std::vector<int> modes;
  bool operator==(const CosineInitial&) const = default;
};
using InitialSpec = std::variant<ConstantInitial, PolynomialInitial, RandomInitial, CosineInitial>;

struct DomainSpec {
  int dim = 1;
  std::vector<double> extent{1.0};
  std::vector<int> cells{64};
  bool operator==(const DomainSpec&) const = default;
};

struct ScenarioConfig {
  int version = 1;
  std::string name = "scenario";
  std::string description;
  DomainSpec domain;
  DiffusionSpec diffusion;
  PotentialSpec potential;
  InitialSpec initial;
  double dt = 1e-2;
  double horizon = 20.0;
  double window = 1.0;
  Scheme scheme = Scheme::StrangCrankNicolson;
  DetectionThresholds thresholds;
  std::optional<std::string> output_dir;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Field-level diagnostics are reported through ConfigError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig parse_config_file(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& c);

Grid build_grid(const DomainSpec& d);
PotentialField build_potential(const PotentialSpec& spec, const Grid& grid);
Scenario build_scenario(const ScenarioConfig& c);

// Built-in example registry.
struct BuiltinInfo {
  std::string name;
  std::string description;
};
std::vector<BuiltinInfo> builtin_list();
std::optional<ScenarioConfig> builtin_config(const std::string& name);

}  // namespace parabolic
