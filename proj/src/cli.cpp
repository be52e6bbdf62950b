#include "parabolic/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "parabolic/report_json.hpp"
#include "parabolic/scenario_config.hpp"

namespace parabolic::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string example;
  std::string config;
  std::string out;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<int> cells;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  std::vector<double> lp;
};

void add_scenario_options(CLI::App* sub, Options& o) {
  auto* ex = sub->add_option("--example", o.example, "built-in scenario name");
  auto* cfg = sub->add_option("--config", o.config, "scenario JSON file");
  ex->excludes(cfg);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--dt", o.dt, "time step");
  sub->add_option("--horizon", o.horizon, "final time");
  sub->add_option("--cells", o.cells, "cells per axis");
  sub->add_option("--scheme", o.scheme, "strang+crank-nicolson | strang+backward-euler");
  sub->add_option("--seed", o.seed, "seed for random initial data and sampling");
}

ScenarioConfig load(const Options& o) {
  ScenarioConfig c;
  if (!o.example.empty()) {
    auto b = builtin_config(o.example);
    if (!b) throw ConfigError("--example: unknown scenario '" + o.example + "' (see `examples`)");
    c = *b;
  } else if (!o.config.empty()) {
    c = parse_config_file(o.config);
  } else {
    throw ConfigError("one of --example or --config is required");
  }
  if (o.dt) c.dt = *o.dt;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.cells) {
    for (auto& n : c.domain.cells) n = *o.cells;
  }
  if (!o.scheme.empty()) {
    const auto s = parse_scheme(o.scheme);
    if (!s) throw ConfigError("--scheme: unknown scheme '" + o.scheme + "'");
    c.scheme = *s;
  }
  if (o.seed) {
    if (auto* r = std::get_if<RandomInitial>(&c.initial)) r->seed = *o.seed;
  }
  return c;
}

std::filesystem::path output_dir(const Options& o, const ScenarioConfig& c) {
  std::filesystem::path dir = !o.out.empty() ? o.out : c.output_dir.value_or(".");
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ScenarioError("cannot write " + path.string());
  f << text;
}

ClassifyOptions classify_options(const Options& o) {
  ClassifyOptions opts;
  opts.numeric_p = o.lp;
  if (o.seed) opts.sampler.seed = *o.seed;
  return opts;
}

std::string trace_csv(const SimulationTrace& t) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "t,norm1,norm2,norminf,residual\n";
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    s << t.times[i] << ',' << t.norm1[i] << ',' << t.norm2[i] << ',' << t.norminf[i] << ',' << t.residual[i]
      << '\n';
  }
  return s.str();
}

std::string eigen_csv(const SpectrumReport& r) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "re,im\n";
  for (const auto& z : r.eigenvalues) s << z.real() << ',' << z.imag() << '\n';
  return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convergence analysis for coupled parabolic systems with matrix potentials"};
  app.require_subcommand(1);
  Options o;

  auto* classify_cmd = app.add_subcommand("classify", "pointwise criteria of the potential (JSON)");
  auto* predict_cmd = app.add_subcommand("predict", "convergence prediction from the criteria cascade (JSON)");
  auto* simulate_cmd = app.add_subcommand("simulate", "time integration: trace.csv and detection.json");
  auto* spectrum_cmd = app.add_subcommand("spectrum", "dense spectrum: eigenvalues.csv and spectrum.json");
  auto* verify_cmd = app.add_subcommand("verify", "prediction vs simulation vs spectrum");
  auto* examples_cmd = app.add_subcommand("examples", "list built-in scenarios");
  for (auto* sub : {classify_cmd, predict_cmd, simulate_cmd, spectrum_cmd, verify_cmd}) add_scenario_options(sub, o);
  classify_cmd->add_option("--lp", o.lp, "extra p values for the sampled l^p test");
  std::string show;
  examples_cmd->add_option("--show", show, "print the config of one scenario");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (examples_cmd->parsed()) {
      if (!show.empty()) {
        const auto c = builtin_config(show);
        if (!c) throw ConfigError("--show: unknown scenario '" + show + "'");
        out << to_json(*c).dump(2) << '\n';
        return kExitOk;
      }
      for (const auto& b : builtin_list()) out << b.name << "  " << b.description << '\n';
      return kExitOk;
    }

    const ScenarioConfig config = load(o);
    const Scenario scenario = build_scenario(config);

    if (classify_cmd->parsed()) {
      json j = to_json(classify(scenario.potential, classify_options(o)));
      j["scenario"] = scenario.name;
      out << j.dump(2) << '\n';
      return kExitOk;
    }
    if (predict_cmd->parsed()) {
      const auto report = classify(scenario.potential, classify_options(o));
      json j = to_json(predict(report, scenario.diffusion.identical()));
      j["scenario"] = scenario.name;
      j["diffusion_identical"] = scenario.diffusion.identical();
      out << j.dump(2) << '\n';
      return kExitOk;
    }
    if (simulate_cmd->parsed()) {
      const auto trace = simulate(scenario);
      json j = to_json(detect(trace, scenario.thresholds));
      j["scenario"] = scenario.name;
      j["steps"] = trace.steps;
      const auto dir = output_dir(o, config);
      write_file(dir / "trace.csv", trace_csv(trace));
      write_file(dir / "detection.json", j.dump(2) + "\n");
      out << j.dump(2) << '\n';
      return kExitOk;
    }
    if (spectrum_cmd->parsed()) {
      const auto report = spectrum_block(assemble_block(scenario.diffusion, scenario.potential));
      json j = to_json(report);
      j["scenario"] = scenario.name;
      const auto dir = output_dir(o, config);
      write_file(dir / "eigenvalues.csv", eigen_csv(report));
      write_file(dir / "spectrum.json", j.dump(2) + "\n");
      out << j.dump(2) << '\n';
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      const auto report = verify(scenario, classify_options(o));
      json j = to_json(report);
      j["scenario"] = scenario.name;
      if (!o.out.empty() || config.output_dir) write_file(output_dir(o, config) / "verify.json", j.dump(2) + "\n");
      out << j.dump(2) << '\n';
      return report.contradiction() ? kExitContradiction : kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ScenarioError& e) {
    err << "scenario error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace parabolic::cli
