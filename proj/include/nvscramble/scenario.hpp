#pragma once

// Scenario configuration, figure presets, runs and parameter sweeps.
//
// Config text is flat key = value with optional [section] headers:
//
//   scenario = fig2
//   [oscillator]
//   K = 10
//   [run]
//   t_end = 50
//
// Keys are addressed as "section.key"; top-level keys (scenario, model, note)
// have no section.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvscramble/hybrid_dynamics.hpp"
#include "nvscramble/quantum_channel.hpp"

namespace nvs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Model { Hybrid, Channel };
enum class InitialSpin { Ket01, BellPhiMinus, Custom };
enum class OutputFormat { Csv, Json };

struct ScenarioConfig {
  std::string scenario = "custom";
  std::string note;
  Model model = Model::Hybrid;

  SpinParams spin{1.5, 1.0, M_PI / 3.0, std::nullopt, std::nullopt};
  OscParams osc;
  std::optional<double> K;  // when set, finalize() derives osc.D from it
  std::optional<Regime> regime;

  QuantumChannelParams channel;
  std::vector<double> n_values;  // channel runs: one series per entry (empty: channel.n)

  InitialSpin initial = InitialSpin::Ket01;
  SpinState custom_amplitudes = states::ket01();
  double x1 = 1.0, v1 = 0.0, x2 = 0.0, v2 = 0.0;

  double t_end = 100.0;
  std::optional<double> dt_out;  // resolved by finalize()
  double tol = 1e-9;
  PauliAxis w_axis = PauliAxis::Z;  // W acts on site 1
  PauliAxis v_axis = PauliAxis::Z;  // V acts on site 2

  std::string output_path;
  OutputFormat format = OutputFormat::Csv;

  /// Keys explicitly assigned by the user (qualified names).
  std::set<std::string> assigned;

  SpinState initial_state() const;
  Operator4 W() const;
  Operator4 V() const;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

std::vector<std::string> preset_names();

/// Named presets; figure presets carry the figure parameters. Throws ConfigError.
ScenarioConfig preset(std::string_view name);

/// One-line description of a preset.
std::string preset_description(std::string_view name);

/// Assigns one key. `key` may be qualified ("oscillator.K") or, when unambiguous,
/// bare ("K"). Throws ConfigError on unknown keys or malformed values.
void apply_override(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Resolves derived fields (D from K, regime, dt_out) and validates the result.
void finalize(ScenarioConfig& cfg);

/// Parses config text; a `scenario` key loads that preset before the remaining
/// keys are applied. The result is finalized. Errors carry "line N:" prefixes.
ScenarioConfig parse_config(std::string_view text);

/// Fully resolved key/value pairs; feeding them back through parse_config
/// reproduces the same configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg);
std::string to_config_text(const ScenarioConfig& cfg);

struct ChannelRecord {
  double t = 0.0;
  double n = 0.0;
  double otoc = 0.0;            // numeric, initial state of the config
  double otoc_published = 0.0;  // 2 sin^2(4 Omega_n t)
  double thermal_otoc = 0.0;    // closed form
  double thermal_otoc_trace = 0.0;
  double thermal_concurrence = 0.0;  // closed form
  double concurrence = 0.0;          // evolved initial pure state
  double gme = 0.0;
};

struct RunResult {
  ScenarioConfig config;
  TimeSeries series;                    // hybrid runs
  IntegrationDiagnostics diagnostics;   // hybrid runs
  std::vector<ChannelRecord> channel;   // channel runs
  double wall_time_s = 0.0;
};

/// Runs a finalized configuration. Integrator failures propagate as
/// IntegrationError with the scenario name prepended.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Runs `cfg` once per value of the numeric parameter `parameter`, concurrently,
/// preserving the order of `values`.
std::vector<RunResult> sweep(const ScenarioConfig& cfg, std::string_view parameter,
                             const std::vector<double>& values);

std::string format_double(double v);

}  // namespace nvs
