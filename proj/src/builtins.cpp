#include <functional>

#include "parabolic/scenario_config.hpp"

namespace parabolic {

namespace {

CMatrix real2(double a, double b, double c, double d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix kRotation = real2(0, -1, 1, 0);
const CMatrix kRankOne = real2(1, 2, 1, 2);

ScenarioConfig base(std::string name, std::string description) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.domain = {1, {1.0}, {64}};
  c.diffusion = {true, {CoefSpec{Polynomial::constant(1.0), std::nullopt}}};
  c.initial = PolynomialInitial{{Polynomial::in_x({1.0, 1.0}), Polynomial::in_x({0.5, -1.0, 1.0})}};
  c.dt = 1e-2;
  c.horizon = 40.0;
  c.window = 1.0;
  c.scheme = Scheme::StrangCrankNicolson;
  return c;
}

DiffusionSpec unequal_diffusion() {
  return {false, {CoefSpec{Polynomial::constant(1.0), std::nullopt}, CoefSpec{Polynomial::in_x({1.0, 0.5}), std::nullopt}}};
}

using Factory = std::function<ScenarioConfig()>;

const std::vector<std::pair<std::string, Factory>>& registry() {
  static const std::vector<std::pair<std::string, Factory>> r = {
      {"intro_rotation",
       [] {
         auto c = base("intro_rotation", "V = [[0,-1],[1,0]], u0 = (1,0) constant: the periodic solution (cos t, sin t)");
         c.potential = ConstantPotential{kRotation};
         c.initial = ConstantInitial{(CVector(2) << 1.0, 0.0).finished()};
         c.dt = 1e-3;
         c.horizon = 20.0;
         return c;
       }},
      {"ex_quasi_positive",
       [] {
         auto c = base("ex_quasi_positive", "V = a [[-1,2],[2,-4]] + b [[-1,2],[1,-2]], a = 1+x, b = x; kernel z = (2,1)");
         c.potential = AffinePotential{std::nullopt,
                                       {{FactorKind::OnePlusX, {}, real2(-1, 2, 2, -4)},
                                        {FactorKind::X, {}, real2(-1, 2, 1, -2)}}};
         c.dt = 6.25e-3;
         c.horizon = 100.0;
         return c;
       }},
      {"ex_rotation_variable",
       [] {
         auto c = base("ex_rotation_variable", "V = a [[0,-1],[1,0]], a = 1+x, unequal diffusion: converges");
         c.diffusion = unequal_diffusion();
         c.potential = AffinePotential{std::nullopt, {{FactorKind::OnePlusX, {}, kRotation}}};
         c.dt = 2.5e-2;
         c.horizon = 3000.0;
         return c;
       }},
      {"ex_rotation_constant",
       [] {
         auto c = base("ex_rotation_constant", "V = [[0,-1],[1,0]], unequal diffusion: spatially constant rotation persists");
         c.diffusion = unequal_diffusion();
         c.potential = ConstantPotential{kRotation};
         return c;
       }},
      {"ex_linf",
       [] {
         auto c = base("ex_linf", "V = a [[-1,-1],[-2,-2]] + b [[-1,-1],[-1,-1]], a = 1+x, b = 1; l-inf dissipative");
         c.potential = AffinePotential{std::nullopt,
                                       {{FactorKind::OnePlusX, {}, real2(-1, -1, -2, -2)},
                                        {FactorKind::One, {}, real2(-1, -1, -1, -1)}}};
         c.dt = 6.25e-3;
         c.horizon = 100.0;
         return c;
       }},
      {"ex_constant_rotation",
       [] {
         auto c = base("ex_constant_rotation", "constant V = [[0,-1],[1,0]] with identical diffusion: no limit");
         c.potential = ConstantPotential{kRotation};
         return c;
       }},
      {"ex_constant_zero",
       [] {
         auto c = base("ex_constant_zero", "constant V = 0 with identical diffusion: limit is the spatial mean");
         c.potential = ConstantPotential{CMatrix::Zero(2, 2)};
         return c;
       }},
      {"ex_diagonalizable",
       [] {
         auto c = base("ex_diagonalizable", "V = -a [[1,2],[1,2]], a = 1 + i x: decoupled, converges");
         c.potential = AffinePotential{std::nullopt,
                                       {{FactorKind::One, {}, -kRankOne},
                                        {FactorKind::X, {}, Complex(0.0, -1.0) * kRankOne}}};
         return c;
       }},
      {"ex_diagonalizable_imaginary",
       [] {
         auto c = base("ex_diagonalizable_imaginary", "V = -i [[1,2],[1,2]]: eigenvalue curve -3i, no limit");
         c.potential = ConstantPotential{Complex(0.0, -1.0) * kRankOne};
         return c;
       }},
      {"ex_unknown_growth",
       [] {
         auto c = base("ex_unknown_growth", "V = [[0.5, 1+x],[0,-1]]: outside every criterion, grows like e^{t/2}");
         c.potential = AffinePotential{real2(0.5, 1, 0, -1), {{FactorKind::X, {}, real2(0, 1, 0, 0)}}};
         c.horizon = 20.0;
         return c;
       }},
  };
  return r;
}

}  // namespace

std::vector<BuiltinInfo> builtin_list() {
  std::vector<BuiltinInfo> out;
  for (const auto& [name, make] : registry()) out.push_back({name, make().description});
  return out;
}

std::optional<ScenarioConfig> builtin_config(const std::string& name) {
  for (const auto& [n, make] : registry()) {
    if (n == name) return make();
  }
  return std::nullopt;
}

}  // namespace parabolic
