#include "nvscramble/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include "nvscramble/correlators.hpp"
#include "nvscramble/dormand_prince.hpp"

namespace nvs {

namespace {

struct KeySpec {
  std::string_view qualified;
  bool numeric;
};

// Every accepted key. Section "" is the top level.
constexpr KeySpec kKeys[] = {
    {"scenario", false},          {"model", false},
    {"note", false},              {"spin.omega0", true},
    {"spin.g", true},             {"spin.alpha", true},
    {"spin.omega_R", true},       {"spin.delta", true},
    {"oscillator.omega1", true},  {"oscillator.omega2", true},
    {"oscillator.D", true},       {"oscillator.K", true},
    {"oscillator.xi", true},      {"oscillator.gamma", true},
    {"oscillator.F", true},       {"oscillator.Omega", true},
    {"oscillator.regime", false}, {"channel.omega0", true},
    {"channel.omega", true},      {"channel.g", true},
    {"channel.n", true},          {"channel.beta", true},
    {"channel.T", true},          {"channel.n_values", false},
    {"initial.state", false},     {"initial.amplitudes", false},
    {"initial.x1", true},         {"initial.v1", true},
    {"initial.x2", true},         {"initial.v2", true},
    {"run.t_end", true},          {"run.dt_out", true},
    {"run.tol", true},            {"run.W", false},
    {"run.V", false},             {"output.path", false},
    {"output.format", false},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view bare_name(std::string_view qualified) {
  const auto dot = qualified.find('.');
  return dot == std::string_view::npos ? qualified : qualified.substr(dot + 1);
}

const KeySpec& resolve_key(std::string_view key) {
  for (const KeySpec& k : kKeys)
    if (k.qualified == key) return k;
  const KeySpec* match = nullptr;
  for (const KeySpec& k : kKeys) {
    if (bare_name(k.qualified) == key) {
      if (match) {
        throw ConfigError("ambiguous key '" + std::string(key) + "'; qualify it as " +
                          std::string(match->qualified) + " or " + std::string(k.qualified));
      }
      match = &k;
    }
  }
  if (!match) throw ConfigError("unknown key '" + std::string(key) + "'");
  return *match;
}

double parse_number(std::string_view key, std::string_view text) {
  std::string_view s = trim(text);
  double sign = 1.0;
  if (!s.empty() && s.front() == '-' && s.substr(1, 2) == "pi") {
    sign = -1.0;
    s.remove_prefix(1);
  }
  if (s.substr(0, 2) == "pi") {
    std::string_view rest = s.substr(2);
    if (rest.empty()) return sign * M_PI;
    if (rest.front() == '/') {
      double d = 0.0;
      auto [p, ec] = std::from_chars(rest.data() + 1, rest.data() + rest.size(), d);
      if (ec == std::errc() && p == rest.data() + rest.size() && d != 0.0) return sign * M_PI / d;
    }
    throw ConfigError("key '" + std::string(key) + "': cannot parse number '" + std::string(text) +
                      "'");
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + std::string(key) + "': cannot parse number '" + std::string(text) +
                      "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::string_view s = trim(text);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_number(key, s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

PauliAxis parse_axis(std::string_view key, std::string_view v) {
  if (v == "x") return PauliAxis::X;
  if (v == "y") return PauliAxis::Y;
  if (v == "z") return PauliAxis::Z;
  throw ConfigError("key '" + std::string(key) + "': expected x, y or z, got '" + std::string(v) +
                    "'");
}

std::string_view axis_name(PauliAxis a) {
  switch (a) {
    case PauliAxis::X:
      return "x";
    case PauliAxis::Y:
      return "y";
    default:
      return "z";
  }
}

// Parameters shared by the hybrid figures.
ScenarioConfig hybrid_base(std::string name, double K, double xi, double gamma, double F) {
  ScenarioConfig c;
  c.scenario = std::move(name);
  c.model = Model::Hybrid;
  c.spin = SpinParams{1.5, 1.0, M_PI / 3.0, std::nullopt, std::nullopt};
  c.osc = OscParams{};
  c.osc.omega1 = 1.0;
  c.osc.omega2 = 1.5;
  c.osc.xi = xi;
  c.osc.gamma = gamma;
  c.osc.F = F;
  c.osc.Omega = 1.0;
  c.K = K;
  c.t_end = 100.0;
  c.dt_out = 0.05;
  c.tol = 1e-9;
  if (F != 0.0) c.note = "drive listed as F1=F1; read as one common drive F on both oscillators";
  return c;
}

struct PresetEntry {
  std::string_view name;
  std::string_view alias_of;  // empty for primary entries
  std::string_view description;
};

constexpr PresetEntry kPresets[] = {
    {"al_weak", "", "autonomous linear, K=0.1"},
    {"al_strong", "", "autonomous linear, K=10"},
    {"anl_weak", "", "autonomous nonlinear (xi=1), K=0.1"},
    {"anl_strong", "", "autonomous nonlinear (xi=1), K=10"},
    {"dl_weak", "", "driven linear (F=0.5, gamma=0.15), K=0.1"},
    {"dl_strong", "", "driven linear (F=0.5, gamma=0.15), K=10"},
    {"dnl_weak", "", "driven nonlinear (F=0.5, xi=1, gamma=0.15), K=0.1"},
    {"dnl_strong", "", "driven nonlinear (F=0.5, xi=1, gamma=0.15), K=10"},
    {"fig2", "al_weak", "autonomous linear, weak connectivity"},
    {"fig3", "al_strong", "autonomous linear, strong connectivity"},
    {"fig4", "anl_weak", "autonomous nonlinear, weak connectivity"},
    {"fig5", "dnl_weak", "driven nonlinear, weak connectivity"},
    {"fig6", "dnl_strong", "driven nonlinear, strong connectivity"},
    {"fig7", "", "energy budget: autonomous linear, K=10"},
    {"fig8", "", "thermal OTOC, g=1, omega0=3, omega=2, T=100, n in {10,100,1000,10000}"},
};

ScenarioConfig primary_preset(std::string_view name) {
  if (name == "al_weak") return hybrid_base("al_weak", 0.1, 0.0, 0.0, 0.0);
  if (name == "al_strong") return hybrid_base("al_strong", 10.0, 0.0, 0.0, 0.0);
  if (name == "anl_weak") return hybrid_base("anl_weak", 0.1, 1.0, 0.0, 0.0);
  if (name == "anl_strong") return hybrid_base("anl_strong", 10.0, 1.0, 0.0, 0.0);
  if (name == "dl_weak") return hybrid_base("dl_weak", 0.1, 0.0, 0.15, 0.5);
  if (name == "dl_strong") return hybrid_base("dl_strong", 10.0, 0.0, 0.15, 0.5);
  if (name == "dnl_weak") return hybrid_base("dnl_weak", 0.1, 1.0, 0.15, 0.5);
  if (name == "dnl_strong") return hybrid_base("dnl_strong", 10.0, 1.0, 0.15, 0.5);
  if (name == "fig7") return hybrid_base("fig7", 10.0, 0.0, 0.0, 0.0);
  if (name == "fig8") {
    ScenarioConfig c;
    c.scenario = "fig8";
    c.model = Model::Channel;
    c.channel = QuantumChannelParams{3.0, 2.0, 1.0, 10.0, 1.0 / 100.0};
    c.n_values = {10.0, 100.0, 1000.0, 10000.0};
    c.initial = InitialSpin::BellPhiMinus;
    c.t_end = 100.0;
    c.tol = 1e-9;
    return c;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SpinState ScenarioConfig::initial_state() const {
  switch (initial) {
    case InitialSpin::Ket01:
      return states::ket01();
    case InitialSpin::BellPhiMinus:
      return states::bell_phi_minus();
    case InitialSpin::Custom:
      return custom_amplitudes;
  }
  return states::ket01();
}

Operator4 ScenarioConfig::W() const { return embed(pauli(w_axis), 1); }
Operator4 ScenarioConfig::V() const { return embed(pauli(v_axis), 2); }

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto osc_eq = [](const OscParams& x, const OscParams& y) {
    return x.omega1 == y.omega1 && x.omega2 == y.omega2 && x.D == y.D && x.xi == y.xi &&
           x.gamma == y.gamma && x.F == y.F && x.Omega == y.Omega;
  };
  auto ch_eq = [](const QuantumChannelParams& x, const QuantumChannelParams& y) {
    return x.omega0 == y.omega0 && x.omega == y.omega && x.g == y.g && x.n == y.n &&
           x.beta == y.beta;
  };
  return a.scenario == b.scenario && a.note == b.note && a.model == b.model &&
         a.spin.omega0 == b.spin.omega0 && a.spin.g == b.spin.g && a.spin.alpha == b.spin.alpha &&
         osc_eq(a.osc, b.osc) && a.regime == b.regime && ch_eq(a.channel, b.channel) &&
         a.n_values == b.n_values && a.initial == b.initial &&
         (a.initial != InitialSpin::Custom || a.custom_amplitudes == b.custom_amplitudes) &&
         a.x1 == b.x1 && a.v1 == b.v1 && a.x2 == b.x2 && a.v2 == b.v2 && a.t_end == b.t_end &&
         a.dt_out == b.dt_out && a.tol == b.tol && a.w_axis == b.w_axis &&
         a.v_axis == b.v_axis && a.output_path == b.output_path && a.format == b.format;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const PresetEntry& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::string preset_description(std::string_view name) {
  for (const PresetEntry& p : kPresets)
    if (p.name == name) return std::string(p.description);
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

ScenarioConfig preset(std::string_view name) {
  for (const PresetEntry& p : kPresets) {
    if (p.name != name) continue;
    ScenarioConfig c = primary_preset(p.alias_of.empty() ? p.name : p.alias_of);
    c.scenario = std::string(name);
    finalize(c);
    c.assigned.clear();
    return c;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

void apply_override(ScenarioConfig& cfg, std::string_view key_in, std::string_view value_in) {
  const KeySpec& spec = resolve_key(trim(key_in));
  const std::string_view key = spec.qualified;
  const std::string_view value = trim(value_in);
  auto num = [&] { return parse_number(key, value); };

  if (key == "scenario") {
    ScenarioConfig fresh = preset(value);
    fresh.output_path = cfg.output_path;
    fresh.format = cfg.format;
    cfg = std::move(fresh);
  } else if (key == "model") {
    if (value == "hybrid") cfg.model = Model::Hybrid;
    else if (value == "channel") cfg.model = Model::Channel;
    else throw ConfigError("model must be 'hybrid' or 'channel'");
  } else if (key == "note") {
    cfg.note = std::string(value);
  } else if (key == "spin.omega0") {
    cfg.spin.omega0 = num();
  } else if (key == "spin.g") {
    cfg.spin.g = num();
  } else if (key == "spin.alpha") {
    cfg.spin.alpha = num();
  } else if (key == "spin.omega_R") {
    cfg.spin.omega_R = num();
  } else if (key == "spin.delta") {
    cfg.spin.delta = num();
  } else if (key == "oscillator.omega1") {
    cfg.osc.omega1 = num();
  } else if (key == "oscillator.omega2") {
    cfg.osc.omega2 = num();
  } else if (key == "oscillator.D") {
    cfg.osc.D = num();
    cfg.K.reset();
  } else if (key == "oscillator.K") {
    cfg.K = num();
  } else if (key == "oscillator.xi") {
    cfg.osc.xi = num();
  } else if (key == "oscillator.gamma") {
    cfg.osc.gamma = num();
  } else if (key == "oscillator.F") {
    cfg.osc.F = num();
  } else if (key == "oscillator.Omega") {
    cfg.osc.Omega = num();
  } else if (key == "oscillator.regime") {
    const auto r = regime_from_string(value);
    if (!r) throw ConfigError("unknown regime '" + std::string(value) + "'");
    cfg.regime = r;
  } else if (key == "channel.omega0") {
    cfg.channel.omega0 = num();
  } else if (key == "channel.omega") {
    cfg.channel.omega = num();
  } else if (key == "channel.g") {
    cfg.channel.g = num();
  } else if (key == "channel.n") {
    cfg.channel.n = num();
    cfg.n_values.clear();
  } else if (key == "channel.beta") {
    cfg.channel.beta = num();
  } else if (key == "channel.T") {
    const double T = num();
    if (!(T > 0.0)) throw ConfigError("channel.T must be positive");
    cfg.channel.beta = 1.0 / T;
  } else if (key == "channel.n_values") {
    cfg.n_values = parse_list(key, value);
  } else if (key == "initial.state") {
    if (value == "01") cfg.initial = InitialSpin::Ket01;
    else if (value == "bell") cfg.initial = InitialSpin::BellPhiMinus;
    else if (value == "custom") cfg.initial = InitialSpin::Custom;
    else throw ConfigError("initial.state must be 01, bell or custom");
  } else if (key == "initial.amplitudes") {
    const auto v = parse_list(key, value);
    if (v.size() != 8) {
      throw ConfigError("initial.amplitudes needs 8 numbers (re,im for |00>,|01>,|10>,|11>)");
    }
    for (int k = 0; k < 4; ++k) cfg.custom_amplitudes(k) = cplx(v[2 * k], v[2 * k + 1]);
    cfg.initial = InitialSpin::Custom;
  } else if (key == "initial.x1") {
    cfg.x1 = num();
  } else if (key == "initial.v1") {
    cfg.v1 = num();
  } else if (key == "initial.x2") {
    cfg.x2 = num();
  } else if (key == "initial.v2") {
    cfg.v2 = num();
  } else if (key == "run.t_end") {
    cfg.t_end = num();
  } else if (key == "run.dt_out") {
    cfg.dt_out = num();
  } else if (key == "run.tol") {
    cfg.tol = num();
  } else if (key == "run.W") {
    cfg.w_axis = parse_axis(key, value);
  } else if (key == "run.V") {
    cfg.v_axis = parse_axis(key, value);
  } else if (key == "output.path") {
    cfg.output_path = std::string(value);
  } else if (key == "output.format") {
    if (value == "csv") cfg.format = OutputFormat::Csv;
    else if (value == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("output.format must be csv or json");
  }
  cfg.assigned.insert(std::string(key));
}

void finalize(ScenarioConfig& cfg) {
  const bool custom = cfg.scenario == "custom";
  auto require = [&](std::initializer_list<std::string_view> keys) {
    for (auto k : keys) {
      if (!cfg.assigned.count(std::string(k))) {
        throw ConfigError("missing required key '" + std::string(k) + "' for a custom scenario");
      }
    }
  };

  if (cfg.spin.omega_R.has_value() != cfg.spin.delta.has_value()) {
    throw ConfigError("spin.omega_R and spin.delta must be given together");
  }
  if (cfg.spin.omega_R && cfg.spin.delta) {
    if (cfg.assigned.count("spin.omega0") || cfg.assigned.count("spin.alpha")) {
      throw ConfigError("spin.omega0/spin.alpha conflict with spin.omega_R/spin.delta");
    }
    cfg.spin = SpinParams::from_rabi(*cfg.spin.omega_R, *cfg.spin.delta, cfg.spin.g);
  }
  if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-4)) throw ConfigError("run.tol must lie in [1e-12, 1e-4]");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("run.t_end must be non-negative");
  if (cfg.initial == InitialSpin::Custom &&
      std::abs(cfg.custom_amplitudes.norm() - 1.0) > 1e-10) {
    throw ConfigError("initial.amplitudes must be normalized");
  }

  if (cfg.model == Model::Hybrid) {
    if (custom) {
      require({"spin.omega0", "spin.g", "oscillator.omega1", "oscillator.omega2"});
      if (!cfg.assigned.count("oscillator.D") && !cfg.assigned.count("oscillator.K")) {
        throw ConfigError("missing required key 'oscillator.D' or 'oscillator.K' for a custom scenario");
      }
    }
    if (cfg.K) {
      if (cfg.osc.omega1 == cfg.osc.omega2) {
        throw ConfigError("oscillator.K needs omega1 != omega2");
      }
      cfg.osc.D = *cfg.K * std::abs(cfg.osc.omega1 * cfg.osc.omega1 - cfg.osc.omega2 * cfg.osc.omega2);
      cfg.K.reset();
    }
    if (cfg.osc.gamma < 0.0) throw ConfigError("oscillator.gamma must be non-negative");
    if (cfg.osc.F < 0.0) throw ConfigError("oscillator.F must be non-negative");
    const auto inferred = infer_regime(cfg.osc);
    if (!inferred) {
      throw ConfigError(
          "oscillator parameters (F=" + format_double(cfg.osc.F) + ", gamma=" +
          format_double(cfg.osc.gamma) + ", xi=" + format_double(cfg.osc.xi) +
          ") match none of the four regimes (driving requires damping and vice versa)");
    }
    if (cfg.regime && cfg.assigned.count("oscillator.regime") && *cfg.regime != *inferred) {
      throw ConfigError("oscillator.regime=" + std::string(to_string(*cfg.regime)) +
                        " contradicts the parameters, which imply " +
                        std::string(to_string(*inferred)));
    }
    cfg.regime = inferred;
    if (!cfg.dt_out) cfg.dt_out = 0.05;
  } else {
    if (custom) require({"channel.omega0", "channel.omega", "channel.g"});
    std::vector<double> ns = cfg.n_values.empty() ? std::vector<double>{cfg.channel.n} : cfg.n_values;
    double fastest = 0.0;
    for (double n : ns) {
      QuantumChannelParams q = cfg.channel;
      q.n = n;
      try {
        q.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      fastest = std::max(fastest, std::abs(q.Omega_n()));
    }
    if (!cfg.dt_out) cfg.dt_out = fastest > 0.0 ? 0.01 / fastest : 0.05;
  }
  if (!(*cfg.dt_out > 0.0)) throw ConfigError("run.dt_out must be positive");
}

ScenarioConfig parse_config(std::string_view text) {
  // The scenario key is applied first wherever it appears, so presets never
  // clobber explicit settings.
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known = {"spin", "oscillator", "channel",
                                                  "initial", "run", "output"};
      if (!known.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) fail("empty key");
    if (key.find('.') != std::string_view::npos) fail("keys inside a file must not contain '.'");
    std::string qualified = section.empty() ? std::string(key) : section + "." + std::string(key);
    bool found = false;
    for (const KeySpec& k : kKeys) found = found || k.qualified == qualified;
    if (!found) {
      fail("unknown key '" + std::string(key) + "'" +
           (section.empty() ? std::string() : " in section [" + section + "]"));
    }
    for (const Entry& e : entries) {
      if (e.key == qualified) fail("duplicate key '" + qualified + "' (first on line " +
                                   std::to_string(e.line) + ")");
    }
    entries.push_back({line_no, qualified, std::string(trim(line.substr(eq + 1)))});
  }

  ScenarioConfig cfg;
  auto apply = [&](const Entry& e) {
    try {
      apply_override(cfg, e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
    }
  };
  for (const Entry& e : entries)
    if (e.key == "scenario") apply(e);
  for (const Entry& e : entries)
    if (e.key != "scenario") apply(e);
  finalize(cfg);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto put = [&](std::string k, std::string v) { out.emplace_back(std::move(k), std::move(v)); };
  auto num = [&](std::string k, double v) { put(std::move(k), format_double(v)); };
  put("scenario", cfg.scenario);
  put("model", cfg.model == Model::Hybrid ? "hybrid" : "channel");
  if (!cfg.note.empty()) put("note", cfg.note);
  if (cfg.model == Model::Hybrid) {
    num("spin.omega0", cfg.spin.omega0);
    num("spin.g", cfg.spin.g);
    num("spin.alpha", cfg.spin.alpha);
    num("oscillator.omega1", cfg.osc.omega1);
    num("oscillator.omega2", cfg.osc.omega2);
    num("oscillator.D", cfg.osc.D);
    num("oscillator.xi", cfg.osc.xi);
    num("oscillator.gamma", cfg.osc.gamma);
    num("oscillator.F", cfg.osc.F);
    num("oscillator.Omega", cfg.osc.Omega);
    if (cfg.regime) put("oscillator.regime", std::string(to_string(*cfg.regime)));
  } else {
    num("channel.omega0", cfg.channel.omega0);
    num("channel.omega", cfg.channel.omega);
    num("channel.g", cfg.channel.g);
    num("channel.beta", cfg.channel.beta);
    if (cfg.n_values.empty()) {
      num("channel.n", cfg.channel.n);
    } else {
      std::string list;
      for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
        if (i) list += ",";
        list += format_double(cfg.n_values[i]);
      }
      put("channel.n_values", list);
    }
  }
  switch (cfg.initial) {
    case InitialSpin::Ket01:
      put("initial.state", "01");
      break;
    case InitialSpin::BellPhiMinus:
      put("initial.state", "bell");
      break;
    case InitialSpin::Custom: {
      std::string list;
      for (int k = 0; k < 4; ++k) {
        if (k) list += ",";
        list += format_double(cfg.custom_amplitudes(k).real()) + "," +
                format_double(cfg.custom_amplitudes(k).imag());
      }
      put("initial.amplitudes", list);
      break;
    }
  }
  if (cfg.model == Model::Hybrid) {
    num("initial.x1", cfg.x1);
    num("initial.v1", cfg.v1);
    num("initial.x2", cfg.x2);
    num("initial.v2", cfg.v2);
  }
  num("run.t_end", cfg.t_end);
  if (cfg.dt_out) num("run.dt_out", *cfg.dt_out);
  num("run.tol", cfg.tol);
  put("run.W", std::string(axis_name(cfg.w_axis)));
  put("run.V", std::string(axis_name(cfg.v_axis)));
  if (!cfg.output_path.empty()) put("output.path", cfg.output_path);
  put("output.format", cfg.format == OutputFormat::Csv ? "csv" : "json");
  return out;
}

std::string to_config_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& [key, value] : config_entries(cfg)) {
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    if (sec != current) {
      os << "\n[" << sec << "]\n";
      current = sec;
    }
    os << (dot == std::string::npos ? key : key.substr(dot + 1)) << " = " << value << "\n";
  }
  return os.str();
}

RunResult run_scenario(const ScenarioConfig& cfg_in) {
  ScenarioConfig cfg = cfg_in;
  if (!cfg.dt_out || (cfg.model == Model::Hybrid && !cfg.regime)) finalize(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;
  const double dt = *cfg.dt_out;

  if (cfg.model == Model::Hybrid) {
    HybridState init;
    init.t = 0.0;
    init.x1 = cfg.x1;
    init.v1 = cfg.v1;
    init.x2 = cfg.x2;
    init.v2 = cfg.v2;
    init.psi = cfg.initial_state();
    IntegrateOptions opts;
    opts.W = cfg.W();
    opts.V = cfg.V();
    try {
      Trajectory traj = integrate(init, cfg.osc, cfg.spin, *cfg.regime, cfg.t_end, dt, cfg.tol, opts);
      result.series = std::move(traj.series);
      result.diagnostics = traj.diagnostics;
    } catch (const IntegrationError& e) {
      throw IntegrationError("scenario " + cfg.scenario + ": " + e.what(), e.time());
    }
  } else {
    const SpinState psi0 = cfg.initial_state();
    const Operator4 W = cfg.W(), V = cfg.V();
    const std::vector<double> ns =
        cfg.n_values.empty() ? std::vector<double>{cfg.channel.n} : cfg.n_values;
    const auto n_t = static_cast<std::size_t>(std::floor(cfg.t_end / dt * (1.0 + 1e-12) + 1e-9)) + 1;
    for (double n : ns) {
      QuantumChannelParams q = cfg.channel;
      q.n = n;
      const Operator4 h = h_total(q);
      for (std::size_t k = 0; k < n_t; ++k) {
        const double t = static_cast<double>(k) * dt;
        const Operator4 U = expm_hermitian(h, t);
        ChannelRecord r;
        r.t = t;
        r.n = n;
        r.otoc = otoc_product(U, psi0, W, V).C;
        r.otoc_published = otoc_analytic(q, t);
        const ThermalValue th = thermal_otoc(q, t);
        r.thermal_otoc = th.closed_form;
        r.thermal_otoc_trace = th.numeric;
        r.thermal_concurrence = thermal_concurrence(q, t).closed_form;
        const SpinState psi = U * psi0;
        r.concurrence = concurrence(psi * psi.adjoint());
        r.gme = gme_pure(psi);
        result.channel.push_back(r);
      }
    }
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<RunResult> sweep(const ScenarioConfig& cfg, std::string_view parameter,
                             const std::vector<double>& values) {
  const KeySpec& spec = resolve_key(parameter);
  if (!spec.numeric) {
    throw ConfigError("cannot sweep non-numeric key '" + std::string(spec.qualified) + "'");
  }
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (double v : values) {
    ScenarioConfig c = cfg;
    apply_override(c, spec.qualified, format_double(v));
    // A swept connectivity must override the D resolved from the base config.
    finalize(c);
    configs.push_back(std::move(c));
  }
  std::vector<std::future<RunResult>> jobs;
  jobs.reserve(configs.size());
  for (const ScenarioConfig& c : configs) {
    jobs.push_back(std::async(std::launch::async, [&c] { return run_scenario(c); }));
  }
  std::vector<RunResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace nvs
