#include "parabolic/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace parabolic {

using nlohmann::json;

Polynomial Polynomial::in_x(std::vector<double> c) {
  Polynomial p;
  for (double v : c) p.coefficients.push_back({v});
  return p;
}

double Polynomial::operator()(double x, double y) const {
  double sum = 0.0;
  double xi = 1.0;
  for (const auto& row : coefficients) {
    double yj = 1.0;
    for (double c : row) {
      sum += c * xi * yj;
      yj *= y;
    }
    xi *= x;
  }
  return sum;
}

bool Polynomial::is_constant() const {
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    for (std::size_t j = 0; j < coefficients[i].size(); ++j) {
      if ((i > 0 || j > 0) && coefficients[i][j] != 0.0) return false;
    }
  }
  return true;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path, "missing field '" + key + "'");
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Complex as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {as_number(j, path), 0.0};
  if (j.is_array() && j.size() == 2) return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
  fail(path, "expected a number or [re, im]");
}

json complex_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

CMatrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail(rp, "matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = as_complex(row[static_cast<std::size_t>(c)], rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CVector as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_complex(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Polynomial as_polynomial(const json& j, const std::string& path) {
  if (j.is_number()) return Polynomial::constant(as_number(j, path));
  if (!j.is_array() || j.empty()) fail(path, "expected a coefficient array");
  Polynomial p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ip = path + "[" + std::to_string(i) + "]";
    if (j[i].is_number()) {
      p.coefficients.push_back({as_number(j[i], ip)});
    } else if (j[i].is_array()) {
      std::vector<double> row;
      for (std::size_t k = 0; k < j[i].size(); ++k) row.push_back(as_number(j[i][k], ip + "[" + std::to_string(k) + "]"));
      p.coefficients.push_back(std::move(row));
    } else {
      fail(ip, "expected a number or an array of y-coefficients");
    }
  }
  return p;
}

json polynomial_json(const Polynomial& p) {
  const bool flat = std::all_of(p.coefficients.begin(), p.coefficients.end(),
                                [](const auto& row) { return row.size() == 1; });
  json out = json::array();
  for (const auto& row : p.coefficients) {
    if (flat) {
      out.push_back(row.front());
    } else {
      out.push_back(row);
    }
  }
  return out;
}

Polynomial as_scalar_coef(const json& j, const std::string& path) {
  if (j.is_number()) return Polynomial::constant(as_number(j, path));
  if (j.is_object() && j.contains("constant")) return Polynomial::constant(as_number(j.at("constant"), path + ".constant"));
  if (j.is_object() && j.contains("poly")) return as_polynomial(j.at("poly"), path + ".poly");
  fail(path, "expected a number, {constant: c} or {poly: [...]}");
}

json scalar_coef_json(const Polynomial& p) {
  if (p.is_constant()) return json{{"constant", p(0.0, 0.0)}};
  return json{{"poly", polynomial_json(p)}};
}

CoefSpec as_coef(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("xx")) {
    CoefSpec c{as_scalar_coef(j.at("xx"), path + ".xx"), std::nullopt};
    if (j.contains("yy")) c.yy = as_scalar_coef(j.at("yy"), path + ".yy");
    return c;
  }
  return {as_scalar_coef(j, path), std::nullopt};
}

json coef_json(const CoefSpec& c) {
  if (!c.yy) return scalar_coef_json(c.xx);
  return json{{"xx", scalar_coef_json(c.xx)}, {"yy", scalar_coef_json(*c.yy)}};
}

AffineTerm as_term(const json& j, const std::string& path) {
  AffineTerm t;
  const json& f = require(j, "f", path);
  if (f.is_string()) {
    const auto s = f.get<std::string>();
    if (s == "1") {
      t.factor = FactorKind::One;
    } else if (s == "x") {
      t.factor = FactorKind::X;
    } else if (s == "y") {
      t.factor = FactorKind::Y;
    } else if (s == "1+x") {
      t.factor = FactorKind::OnePlusX;
    } else {
      fail(path + ".f", "unknown factor '" + s + "' (use 1, x, y, 1+x or {poly: [...]})");
    }
  } else if (f.is_object() && f.contains("poly")) {
    t.factor = FactorKind::Poly;
    t.poly = as_polynomial(f.at("poly"), path + ".f.poly");
  } else {
    fail(path + ".f", "expected a factor name or {poly: [...]}");
  }
  t.matrix = as_matrix(require(j, "matrix", path), path + ".matrix");
  return t;
}

json term_json(const AffineTerm& t) {
  json f;
  switch (t.factor) {
    case FactorKind::One: f = "1"; break;
    case FactorKind::X: f = "x"; break;
    case FactorKind::Y: f = "y"; break;
    case FactorKind::OnePlusX: f = "1+x"; break;
    case FactorKind::Poly: f = json{{"poly", polynomial_json(t.poly)}}; break;
  }
  return json{{"f", f}, {"matrix", matrix_json(t.matrix)}};
}

PotentialSpec as_potential(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("builtin")) return BuiltinPotential{as_string(j.at("builtin"), path + ".builtin")};
  if (j.contains("constant")) return ConstantPotential{as_matrix(j.at("constant"), path + ".constant")};
  if (j.contains("affine")) {
    const json& a = j.at("affine");
    const std::string ap = path + ".affine";
    AffinePotential spec;
    if (a.contains("c0")) spec.c0 = as_matrix(a.at("c0"), ap + ".c0");
    if (a.contains("terms")) {
      const json& terms = a.at("terms");
      if (!terms.is_array()) fail(ap + ".terms", "expected an array");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        spec.terms.push_back(as_term(terms[i], ap + ".terms[" + std::to_string(i) + "]"));
      }
    }
    if (!spec.c0 && spec.terms.empty()) fail(ap, "needs c0 or at least one term");
    return spec;
  }
  fail(path, "expected one of builtin, constant, affine");
}

json potential_json(const PotentialSpec& spec) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BuiltinPotential>) {
          return json{{"builtin", p.name}};
        } else if constexpr (std::is_same_v<T, ConstantPotential>) {
          return json{{"constant", matrix_json(p.matrix)}};
        } else {
          json a = json::object();
          if (p.c0) a["c0"] = matrix_json(*p.c0);
          json terms = json::array();
          for (const auto& t : p.terms) terms.push_back(term_json(t));
          a["terms"] = terms;
          return json{{"affine", a}};
        }
      },
      spec);
}

InitialSpec as_initial(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("constant")) return ConstantInitial{as_vector(j.at("constant"), path + ".constant")};
  if (j.contains("polynomial")) {
    const json& p = j.at("polynomial");
    if (!p.is_array() || p.empty()) fail(path + ".polynomial", "expected one polynomial per component");
    PolynomialInitial spec;
    for (std::size_t i = 0; i < p.size(); ++i) {
      spec.components.push_back(as_polynomial(p[i], path + ".polynomial[" + std::to_string(i) + "]"));
    }
    return spec;
  }
  if (j.contains("random")) {
    const json& r = j.at("random");
    const std::string rp = path + ".random";
    RandomInitial spec;
    if (r.contains("seed")) {
      const json& seed = r.at("seed");
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<long long>() < 0)) {
        fail(rp + ".seed", "expected a nonnegative integer");
      }
      spec.seed = r.at("seed").get<std::uint64_t>();
    }
    if (r.contains("components")) {
      spec.components = as_int(r.at("components"), rp + ".components");
      if (spec.components < 1) fail(rp + ".components", "must be >= 1");
    }
    if (r.contains("amplitude")) spec.amplitude = as_number(r.at("amplitude"), rp + ".amplitude");
    return spec;
  }
  if (j.contains("cosine")) {
    const json& c = j.at("cosine");
    if (!c.is_array() || c.empty()) fail(path + ".cosine", "expected a list of modes, one per component");
    CosineInitial spec;
    for (std::size_t i = 0; i < c.size(); ++i) spec.modes.push_back(as_int(c[i], path + ".cosine[" + std::to_string(i) + "]"));
    return spec;
  }
  fail(path, "expected one of constant, polynomial, random, cosine");
}

json initial_json(const InitialSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantInitial>) {
          json v = json::array();
          for (Eigen::Index i = 0; i < s.value.size(); ++i) v.push_back(complex_json(s.value(i)));
          return json{{"constant", v}};
        } else if constexpr (std::is_same_v<T, PolynomialInitial>) {
          json v = json::array();
          for (const auto& p : s.components) v.push_back(polynomial_json(p));
          return json{{"polynomial", v}};
        } else if constexpr (std::is_same_v<T, RandomInitial>) {
          json r{{"seed", s.seed}, {"amplitude", s.amplitude}};
          if (s.components > 0) r["components"] = s.components;
          return json{{"random", r}};
        } else {
          return json{{"cosine", s.modes}};
        }
      },
      spec);
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  ScenarioConfig c;
  c.version = as_int(require(j, "version", "<root>"), "version");
  if (c.version != 1) fail("version", "unsupported schema version " + std::to_string(c.version));
  if (j.contains("name")) c.name = as_string(j.at("name"), "name");
  if (j.contains("description")) c.description = as_string(j.at("description"), "description");

  const json& d = require(j, "domain", "<root>");
  c.domain.dim = as_int(require(d, "dim", "domain"), "domain.dim");
  if (c.domain.dim != 1 && c.domain.dim != 2) fail("domain.dim", "must be 1 or 2");
  const json& ext = require(d, "extent", "domain");
  const json& cells = require(d, "cells", "domain");
  if (!ext.is_array() || ext.size() != static_cast<std::size_t>(c.domain.dim)) {
    fail("domain.extent", "expected one length per axis");
  }
  if (!cells.is_array() || cells.size() != static_cast<std::size_t>(c.domain.dim)) {
    fail("domain.cells", "expected one cell count per axis");
  }
  c.domain.extent.clear();
  c.domain.cells.clear();
  for (std::size_t i = 0; i < ext.size(); ++i) {
    c.domain.extent.push_back(as_number(ext[i], "domain.extent[" + std::to_string(i) + "]"));
    c.domain.cells.push_back(as_int(cells[i], "domain.cells[" + std::to_string(i) + "]"));
  }

  const json& diff = require(j, "diffusion", "<root>");
  if (diff.is_object() && diff.contains("identical")) {
    c.diffusion.identical = true;
    c.diffusion.equations = {as_coef(diff.at("identical"), "diffusion.identical")};
  } else if (diff.is_object() && diff.contains("per_equation")) {
    const json& eqs = diff.at("per_equation");
    if (!eqs.is_array() || eqs.empty()) fail("diffusion.per_equation", "expected a nonempty array");
    c.diffusion.identical = false;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      c.diffusion.equations.push_back(as_coef(eqs[i], "diffusion.per_equation[" + std::to_string(i) + "]"));
    }
  } else {
    fail("diffusion", "expected {identical: coef} or {per_equation: [...]}");
  }

  c.potential = as_potential(require(j, "potential", "<root>"), "potential");
  c.initial = as_initial(require(j, "initial", "<root>"), "initial");

  if (j.contains("time")) {
    const json& t = j.at("time");
    if (t.contains("dt")) c.dt = as_number(t.at("dt"), "time.dt");
    if (t.contains("horizon")) c.horizon = as_number(t.at("horizon"), "time.horizon");
    if (t.contains("window")) c.window = as_number(t.at("window"), "time.window");
  }
  if (j.contains("scheme")) {
    const auto name = as_string(j.at("scheme"), "scheme");
    const auto s = parse_scheme(name);
    if (!s) fail("scheme", "unknown scheme '" + name + "'");
    c.scheme = *s;
  }
  if (j.contains("detection")) {
    const json& t = j.at("detection");
    if (t.contains("residual")) c.thresholds.residual = as_number(t.at("residual"), "detection.residual");
    if (t.contains("growth")) c.thresholds.growth = as_number(t.at("growth"), "detection.growth");
    if (t.contains("period_fit")) c.thresholds.period_fit = as_number(t.at("period_fit"), "detection.period_fit");
  }
  if (j.contains("output")) c.output_dir = as_string(j.at("output"), "output");
  return c;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["version"] = c.version;
  j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  j["domain"] = {{"dim", c.domain.dim}, {"extent", c.domain.extent}, {"cells", c.domain.cells}};
  if (c.diffusion.identical) {
    j["diffusion"] = {{"identical", coef_json(c.diffusion.equations.front())}};
  } else {
    json eqs = json::array();
    for (const auto& e : c.diffusion.equations) eqs.push_back(coef_json(e));
    j["diffusion"] = {{"per_equation", eqs}};
  }
  j["potential"] = potential_json(c.potential);
  j["initial"] = initial_json(c.initial);
  j["time"] = {{"dt", c.dt}, {"horizon", c.horizon}, {"window", c.window}};
  j["scheme"] = std::string(to_string(c.scheme));
  j["detection"] = {{"residual", c.thresholds.residual},
                    {"growth", c.thresholds.growth},
                    {"period_fit", c.thresholds.period_fit}};
  if (c.output_dir) j["output"] = *c.output_dir;
  return j;
}

// ---------------------------------------------------------------------------

Grid build_grid(const DomainSpec& d) {
  try {
    if (d.dim == 1) return Grid::interval(d.extent.at(0), d.cells.at(0));
    return Grid::rectangle(d.extent.at(0), d.extent.at(1), d.cells.at(0), d.cells.at(1));
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  } catch (const std::out_of_range&) {
    throw ConfigError("domain: extent/cells do not match dim");
  }
}

namespace {

double factor_value(const AffineTerm& t, double x, double y) {
  switch (t.factor) {
    case FactorKind::One: return 1.0;
    case FactorKind::X: return x;
    case FactorKind::Y: return y;
    case FactorKind::OnePlusX: return 1.0 + x;
    case FactorKind::Poly: return t.poly(x, y);
  }
  return 0.0;
}

}  // namespace

PotentialField build_potential(const PotentialSpec& spec, const Grid& grid) {
  if (const auto* b = std::get_if<BuiltinPotential>(&spec)) {
    const auto cfg = builtin_config(b->name);
    if (!cfg) throw ConfigError("potential.builtin: unknown example '" + b->name + "'");
    if (std::holds_alternative<BuiltinPotential>(cfg->potential)) {
      throw ConfigError("potential.builtin: '" + b->name + "' does not define a potential");
    }
    return build_potential(cfg->potential, grid);
  }
  if (const auto* c = std::get_if<ConstantPotential>(&spec)) {
    return PotentialField::constant(grid, SquareMatrix(c->matrix));
  }
  const auto& a = std::get<AffinePotential>(spec);
  const Eigen::Index n = a.c0 ? a.c0->rows() : a.terms.front().matrix.rows();
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (a.terms[i].matrix.rows() != n) {
      throw ConfigError("potential.affine.terms[" + std::to_string(i) + "].matrix: size differs from the other matrices");
    }
  }
  return PotentialField::sample(grid, [&](double x, double y) {
    CMatrix m = a.c0 ? *a.c0 : CMatrix::Zero(n, n);
    for (const auto& t : a.terms) m += factor_value(t, x, y) * t.matrix;
    return m;
  });
}

namespace {

Coefficients build_coefficients(const Grid& grid, const CoefSpec& spec) {
  const Polynomial yy = spec.yy ? *spec.yy : spec.xx;
  return Coefficients::sample(
      grid, [&](double x, double y) { return spec.xx(x, y); }, [&](double x, double y) { return yy(x, y); });
}

StateField build_initial(const InitialSpec& spec, const Grid& grid, Eigen::Index components) {
  const Eigen::Index cells = grid.cell_count();
  return std::visit(
      [&](const auto& s) -> StateField {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantInitial>) {
          return StateField::constant(grid, s.value);
        } else if constexpr (std::is_same_v<T, PolynomialInitial>) {
          CMatrix v(cells, static_cast<Eigen::Index>(s.components.size()));
          for (Eigen::Index c = 0; c < cells; ++c) {
            const auto [x, y] = grid.center(c);
            for (std::size_t k = 0; k < s.components.size(); ++k) v(c, static_cast<Eigen::Index>(k)) = s.components[k](x, y);
          }
          return StateField(grid, std::move(v));
        } else if constexpr (std::is_same_v<T, RandomInitial>) {
          std::mt19937_64 rng(s.seed);
          std::uniform_real_distribution<double> dist(-s.amplitude, s.amplitude);
          const Eigen::Index count = s.components > 0 ? s.components : components;
          CMatrix v(cells, count);
          for (Eigen::Index k = 0; k < count; ++k) {
            for (Eigen::Index c = 0; c < cells; ++c) v(c, k) = dist(rng);
          }
          return StateField(grid, std::move(v));
        } else {
          CMatrix v(cells, static_cast<Eigen::Index>(s.modes.size()));
          for (Eigen::Index c = 0; c < cells; ++c) {
            const double x = grid.center(c)[0];
            for (std::size_t k = 0; k < s.modes.size(); ++k) {
              v(c, static_cast<Eigen::Index>(k)) = std::cos(s.modes[k] * std::numbers::pi * x / grid.extent(0));
            }
          }
          return StateField(grid, std::move(v));
        }
      },
      spec);
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& c) {
  const Grid grid = build_grid(c.domain);
  PotentialField potential = build_potential(c.potential, grid);
  const Eigen::Index n = potential.components();

  std::vector<Coefficients> equations;
  if (c.diffusion.identical) {
    equations.assign(static_cast<std::size_t>(n), build_coefficients(grid, c.diffusion.equations.front()));
  } else {
    if (static_cast<Eigen::Index>(c.diffusion.equations.size()) != n) {
      throw ConfigError("diffusion.per_equation: expected " + std::to_string(n) + " entries, one per component");
    }
    for (const auto& e : c.diffusion.equations) equations.push_back(build_coefficients(grid, e));
  }

  Scenario s{.name = c.name,
             .diffusion = DiffusionField(grid, std::move(equations)),
             .potential = std::move(potential),
             .initial = build_initial(c.initial, grid, n),
             .dt = c.dt,
             .horizon = c.horizon,
             .window = c.window,
             .scheme = c.scheme,
             .thresholds = c.thresholds};
  validate(s);
  return s;
}

}  // namespace parabolic
