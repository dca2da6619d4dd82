// Command-line front end: correlation curves, ARMA fits, traces and
// predictor evaluations for the named presets or an ini scenario file.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipred/arma.hpp"
#include "ipred/correlation.hpp"
#include "ipred/evaluation.hpp"
#include "ipred/kalman.hpp"
#include "ipred/network_sim.hpp"
#include "ipred/results_io.hpp"
#include "ipred/scenarios.hpp"

namespace fs = std::filesystem;
using namespace ipred;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInput = 3, kIo = 4, kNumeric = 5 };

struct CommonOptions {
  std::string preset = "setup1";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> realizations;
  std::optional<std::size_t> slots;
  std::string out;
  bool full_scale = false;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<NamedScenario> resolve_scenarios(const CommonOptions& o) {
  std::vector<NamedScenario> scenarios;
  if (!o.config.empty()) {
    try {
      scenarios = load_scenario_config(o.config);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    if (scenarios.empty()) throw std::invalid_argument(o.config + ": no scenario sections");
    if (o.full_scale)
      for (auto& s : scenarios) s.config.realizations = kFullScaleRealizations;
  } else {
    scenarios = build_preset(o.preset, o.seed.value_or(1), o.full_scale).scenarios;
  }
  for (auto& s : scenarios) {
    if (o.seed) s.config.seed = *o.seed;
    if (o.realizations) s.config.realizations = *o.realizations;
    if (o.slots) s.config.horizon = *o.slots;
    s.config.validate();
  }
  return scenarios;
}

// Runs `write` against the output target: stdout when no path was given, the
// path itself for a single scenario, otherwise one sibling file per scenario.
template <typename Fn>
void write_output(const CommonOptions& o, const std::string& scenario, bool many, Fn&& write) {
  if (o.out.empty()) {
    if (many) std::cout << "# " << scenario << '\n';
    write(std::cout);
    return;
  }
  const fs::path path = many ? sibling_path(o.out, "_" + scenario) : fs::path(o.out);
  try {
    auto os = open_output(path);
    write(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: '" + path.string() + "'");
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  std::cerr << "wrote " << path.string() << '\n';
}

std::vector<int> parse_deltas(const std::string& text) {
  std::vector<int> deltas;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        if (lo > hi) throw std::invalid_argument("range");
        for (int d = lo; d <= hi; ++d) deltas.push_back(d);
      } else {
        deltas.push_back(std::stoi(item));
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--deltas: cannot parse '" + item + "'");
    }
  }
  if (deltas.empty()) throw std::invalid_argument("--deltas: empty list");
  for (int d : deltas)
    if (d < 1) throw std::invalid_argument("--deltas: horizons must be >= 1");
  return deltas;
}

int cmd_correlation(const CommonOptions& o, std::size_t max_lag, const std::string& source) {
  const auto scenarios = resolve_scenarios(o);
  for (const auto& s : scenarios) {
    const CorrelationCurve rho = source == "channel" ? channel_only_autocorr(s.config.params.nu, max_lag)
                                                     : interference_autocorr(s.config.params, max_lag);
    write_output(o, s.name, scenarios.size() > 1,
                 [&](std::ostream& os) { write_correlation_csv(os, rho); });
  }
  return kOk;
}

int cmd_fit(const CommonOptions& o, const std::string& source, int p_max) {
  const auto scenarios = resolve_scenarios(o);
  for (const auto& s : scenarios) {
    DesignOptions design;
    design.fit.p_max = p_max;
    const PredictorKind kind = source == "channel" ? PredictorKind::ChannelOnly : PredictorKind::Interference;
    const std::size_t max_lag = 2 * std::max<std::size_t>(design.fit.T, 2 * design.fit.p_max) *
                                static_cast<std::size_t>(design.max_decimation);
    const PredictorDesign d = design_predictor(design_curve(kind, s.config.params, max_lag), design);
    std::printf("%s: p=%d q=%d decimation=%d grid_mse_db=%.2f slot_mse_db=%.2f target_met=%s\n",
                s.name.c_str(), d.model.p(), d.model.q(), d.decimation, d.report.selected_mse_db,
                d.original_mse_db, d.report.target_met ? "yes" : "no");
    write_output(o, s.name, scenarios.size() > 1,
                 [&](std::ostream& os) { os << fit_grid_csv(d.report); });
    if (!o.out.empty()) {
      const fs::path base = scenarios.size() > 1 ? sibling_path(o.out, "_" + s.name) : fs::path(o.out);
      const fs::path model_path = base.parent_path() / (base.stem().string() + "_predictor.txt");
      try {
        auto os = open_output(model_path);
        make_predictor(d.model).save(os);
        if (!os) throw std::runtime_error("write failed: '" + model_path.string() + "'");
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      std::cerr << "wrote " << model_path.string() << '\n';
    }
  }
  return kOk;
}

int cmd_simulate(const CommonOptions& o) {
  CommonOptions local = o;
  if (!local.realizations) local.realizations = 10;
  const auto scenarios = resolve_scenarios(local);
  for (const auto& s : scenarios) {
    const auto traces = simulate_parallel(s.config, 0, s.config.realizations);
    write_output(local, s.name, scenarios.size() > 1,
                 [&](std::ostream& os) { write_traces_csv(os, traces); });
  }
  return kOk;
}

int cmd_evaluate(const CommonOptions& o, const std::string& deltas, const std::vector<std::string>& kinds) {
  const auto scenarios = resolve_scenarios(o);
  EvaluationOptions options;
  options.deltas = parse_deltas(deltas);
  if (!kinds.empty()) {
    options.kinds.clear();
    for (const auto& k : kinds) options.kinds.push_back(predictor_kind_from_string(k));
  }
  std::vector<EvaluationResult> results;
  for (const auto& s : scenarios) {
    results.push_back(evaluate_scenario(s.name, s.config, options));
    const auto& r = results.back();
    std::fprintf(stderr, "%s: %zu realizations in %.1f s\n", s.name.c_str(), s.config.realizations,
                 r.runtime_seconds);
  }
  if (o.out.empty()) {
    write_results_csv(std::cout, results);
    return kOk;
  }
  try {
    emit_results(results, o.out);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  std::cerr << "wrote " << o.out << '\n';
  return kOk;
}

int cmd_scenario_list() {
  std::printf("presets:\n");
  for (const auto& name : preset_names()) {
    const Preset p = build_preset(name);
    std::printf("  %-13s %s\n", name.c_str(), p.description.c_str());
    for (const auto& s : p.scenarios) {
      const SystemParams& q = s.config.params;
      std::printf("    %-22s mu=%g ell=%d nu=%.6g eta=%.1f area=%.0f\n", s.name.c_str(), q.mu, q.ell, q.nu,
                  eta_from_speed(q.nu), s.config.area_side * s.config.area_side);
    }
  }
  std::printf("technologies:\n");
  for (const auto& name : tech_scenario_names()) {
    const TechScenario t = build_tech_scenario(name);
    std::printf("  %-5s fc=%.2g Hz v=%.2f m/s slot=%.2g s doppler=%.4f eta=%.0f\n", name.c_str(), t.carrier_hz,
                t.speed_mps, t.slot_s, t.doppler, t.eta);
  }
  return kOk;
}

void error_line(const char* code, const std::string& message) {
  std::string clean = message;
  for (auto& c : clean)
    if (c == '\n' || c == '"') c = '\'';
  std::fprintf(stderr, "error code=%s message=\"%s\"\n", code, clean.c_str());
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--preset", o.preset, "Named preset (see 'scenario list')");
  cmd->add_option("--config", o.config, "Scenario ini file; overrides --preset");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--realizations", o.realizations, "Number of simulated networks");
  cmd->add_option("--slots", o.slots, "Slots per trace");
  cmd->add_option("--out", o.out, "Output path (stdout if omitted)");
  cmd->add_flag("--full-scale", o.full_scale, "10000 realizations per scenario");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interference prediction: correlation model, ARMA design, Kalman predictor"};
  app.require_subcommand(1);
  CommonOptions opts;

  std::size_t max_lag = 200;
  std::string source = "interference";
  auto* correlation = app.add_subcommand("correlation", "Emit the analytic autocorrelation as CSV");
  add_common(correlation, opts);
  correlation->add_option("--max-lag", max_lag, "Largest lag")->check(CLI::PositiveNumber);
  correlation->add_option("--source", source, "interference or channel")
      ->check(CLI::IsMember({"interference", "channel"}));

  int p_max = 20;
  auto* fit = app.add_subcommand("fit", "Fit the ARMA grid; emit the MSE heatmap and the predictor");
  add_common(fit, opts);
  fit->add_option("--source", source, "interference or channel")
      ->check(CLI::IsMember({"interference", "channel"}));
  fit->add_option("--p-max", p_max, "Largest AR order")->check(CLI::Range(1, 40));

  auto* simulate = app.add_subcommand("simulate", "Emit simulated interference traces");
  add_common(simulate, opts);

  std::string deltas = "1-10";
  std::vector<std::string> kinds;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictors; emit NMSE and histogram CSVs");
  add_common(evaluate, opts);
  evaluate->add_option("--deltas", deltas, "Horizons, e.g. 1,2,5 or 1-10");
  evaluate->add_option("--predictors", kinds, "Subset of interference,channel_only,last_value,mean_value")
      ->delimiter(',');

  auto* scenario = app.add_subcommand("scenario", "Scenario catalogue");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "List presets and technology rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what());
    return kUsage;
  }

  try {
    if (correlation->parsed()) return cmd_correlation(opts, max_lag, source);
    if (fit->parsed()) return cmd_fit(opts, source, p_max);
    if (simulate->parsed()) return cmd_simulate(opts);
    if (evaluate->parsed()) return cmd_evaluate(opts, deltas, kinds);
    if (list->parsed()) return cmd_scenario_list();
  } catch (const IoError& e) {
    error_line("io", e.what());
    return kIo;
  } catch (const std::invalid_argument& e) {
    error_line("invalid_input", e.what());
    return kInput;
  } catch (const std::exception& e) {
    error_line("numeric", e.what());
    return kNumeric;
  }
  error_line("usage", "no command");
  return kUsage;
}
