// Command-line front end: run figure presets or custom configs, sweep a
// parameter, list presets. Results go to CSV or JSON.
//
// Exit codes: 0 ok, 1 internal, 2 config, 3 integration, 4 io, 5 domain.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nvscramble/dormand_prince.hpp"
#include "nvscramble/output.hpp"
#include "nvscramble/scenario.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string scenario;
  std::vector<std::string> overrides;
  std::string out;
  std::string format;
  double tol = 0.0;
  double t_end = -1.0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Config file (key = value with [sections])")
      ->check(CLI::ExistingFile);
  cmd->add_option("--scenario", o.scenario, "Preset name (see `presets list`)");
  cmd->add_option("--set", o.overrides, "Override, e.g. --set K=10 --set spin.g=0.5");
  cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--tol", o.tol, "Integrator tolerance");
  cmd->add_option("--t-end", o.t_end, "End time");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nvs::OutputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nvs::ScenarioConfig build_config(const CommonOptions& o) {
  nvs::ScenarioConfig cfg;
  if (!o.config_path.empty()) {
    std::string text = read_file(o.config_path);
    if (!o.scenario.empty()) text = "scenario = " + o.scenario + "\n" + text;
    cfg = nvs::parse_config(text);
  } else if (!o.scenario.empty()) {
    cfg = nvs::preset(o.scenario);
  } else {
    throw nvs::ConfigError("give --scenario or --config");
  }
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw nvs::ConfigError("--set expects key=value, got '" + kv + "'");
    nvs::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.tol > 0.0) nvs::apply_override(cfg, "run.tol", nvs::format_double(o.tol));
  if (o.t_end >= 0.0) nvs::apply_override(cfg, "run.t_end", nvs::format_double(o.t_end));
  if (!o.format.empty()) nvs::apply_override(cfg, "output.format", o.format);
  if (!o.out.empty()) nvs::apply_override(cfg, "output.path", o.out);
  nvs::finalize(cfg);
  return cfg;
}

void emit(const nvs::RunResult& r, const std::string& path) {
  if (path.empty()) {
    std::cout << (r.config.format == nvs::OutputFormat::Csv ? nvs::to_csv(r)
                                                            : nvs::to_json(r) + "\n");
  } else {
    nvs::write_output(r, r.config.format, path);
  }
}

std::string sweep_path(const std::string& base, const std::string& param, double value) {
  if (base.empty()) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", value);
  const auto dot = base.find_last_of('.');
  const auto slash = base.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? base.substr(0, dot) : base;
  const std::string ext = has_ext ? base.substr(dot) : "";
  return stem + "_" + param + "_" + buf + ext;
}

int fail(const char* category, const std::string& msg, int code) {
  std::cerr << "error[" << category << "]: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum feedback and scrambling between two NV spins"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_opts);

  CommonOptions sweep_opts;
  std::string sweep_param;
  std::vector<double> sweep_values;
  auto* sw = app.add_subcommand("sweep", "Run one scenario per parameter value");
  add_common(sw, sweep_opts);
  sw->add_option("--param", sweep_param, "Numeric key to sweep")->required();
  sw->add_option("--values", sweep_values, "Comma-separated values")->delimiter(',')->required();

  auto* presets = app.add_subcommand("presets", "Preset scenarios");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "List preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const nvs::ScenarioConfig cfg = build_config(run_opts);
      const nvs::RunResult r = nvs::run_scenario(cfg);
      emit(r, cfg.output_path);
    } else if (*sw) {
      const nvs::ScenarioConfig cfg = build_config(sweep_opts);
      const auto results = nvs::sweep(cfg, sweep_param, sweep_values);
      for (std::size_t i = 0; i < results.size(); ++i) {
        const std::string path = sweep_path(cfg.output_path, sweep_param, sweep_values[i]);
        if (path.empty()) {
          std::cout << "# " << sweep_param << " = " << nvs::format_double(sweep_values[i]) << "\n";
        }
        emit(results[i], path);
      }
    } else if (*list) {
      for (const std::string& name : nvs::preset_names()) {
        std::cout << name << "\t" << nvs::preset_description(name) << "\n";
      }
    }
  } catch (const nvs::ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const nvs::IntegrationError& e) {
    return fail("integration", e.what(), 3);
  } catch (const nvs::OutputError& e) {
    return fail("io", e.what(), 4);
  } catch (const std::domain_error& e) {
    return fail("domain", e.what(), 5);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
