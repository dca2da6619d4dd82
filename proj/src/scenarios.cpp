#include "ipred/scenarios.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ipred {

double doppler_normalized(double speed_mps, double carrier_hz, double slot_s) {
  if (!(speed_mps > 0.0) || !(carrier_hz > 0.0) || !(slot_s > 0.0))
    throw std::invalid_argument("doppler_normalized: all arguments must be positive");
  return 2.0 * speed_mps / kSpeedOfLight * carrier_hz * slot_s;
}

SystemParams TechScenario::params() const {
  SystemParams p;
  p.mu = mu;
  p.ell = ell;
  p.nu = speed_from_eta(eta);
  return p;
}

namespace {

TechScenario make_tech(std::string name, double kmh, double carrier, double slot, double eta) {
  TechScenario t;
  t.name = std::move(name);
  t.carrier_hz = carrier;
  t.speed_mps = kmh / 3.6;
  t.slot_s = slot;
  t.doppler = doppler_normalized(t.speed_mps, carrier, slot);
  t.eta = eta;
  return t;
}

}  // namespace

std::vector<std::string> tech_scenario_names() { return {"LTE1", "LTE2", "LTE3", "WSN"}; }

TechScenario build_tech_scenario(const std::string& name) {
  if (name == "LTE1") return make_tech(name, 6.0, 2.0e9, 1.0e-3, 225.0);
  if (name == "LTE2") return make_tech(name, 40.0, 2.0e9, 1.0e-3, 35.0);
  if (name == "LTE3") return make_tech(name, 80.0, 2.0e9, 1.0e-3, 17.0);
  if (name == "WSN") return make_tech(name, 6.0, 2.4e9, 4.6e-3, 50.0);
  throw std::invalid_argument("unknown technology scenario '" + name + "'");
}

ScenarioConfig setup_config(int setup) {
  static constexpr double kNu[] = {0.0077, 0.0191, 0.0765};
  if (setup < 1 || setup > 3) throw std::invalid_argument("setup must be 1, 2 or 3");
  ScenarioConfig c;
  c.params.nu = kNu[setup - 1];
  c.params.mu = 0.01;
  c.params.ell = 10;
  return c;
}

std::vector<std::string> preset_names() {
  return {"setup1", "setup2", "setup3", "msglen-sweep", "thinning", "poisson-len",
          "lte1",   "lte2",   "lte3",   "wsn"};
}

Preset build_preset(const std::string& name, std::uint64_t seed, bool full_scale) {
  Preset preset;
  preset.name = name;
  auto add = [&](std::string scenario, ScenarioConfig c) {
    c.seed = seed;
    c.realizations = full_scale ? kFullScaleRealizations : kDeskRealizations;
    preset.scenarios.push_back({std::move(scenario), c});
  };
  if (name == "setup1" || name == "setup2" || name == "setup3") {
    preset.description = "example setup " + name.substr(5) + ", all predictors";
    add(name, setup_config(name.back() - '0'));
  } else if (name == "msglen-sweep") {
    preset.description = "setup 1 with message lengths 10, 50, 100";
    for (int ell : {10, 50, 100}) {
      ScenarioConfig c = setup_config(1);
      c.params.ell = ell;
      add("setup1-l" + std::to_string(ell), c);
    }
  } else if (name == "thinning") {
    preset.description = "setup 1 on a 200000 unit^2 area, PPP vs clustered placement (r = 40)";
    for (int ell : {10, 100}) {
      ScenarioConfig c = setup_config(1);
      c.params.ell = ell;
      c.area_side = std::sqrt(200000.0);
      const std::string tag = "setup1-l" + std::to_string(ell);
      add(tag + "-ppp", c);
      for (int k : {20, 30, 40}) {
        ScenarioConfig t = c;
        t.placement_mode = PlacementMode::Thinned;
        t.thin_radius = 40.0;
        t.thin_k = k;
        add(tag + "-k" + std::to_string(k), t);
      }
    }
  } else if (name == "poisson-len") {
    preset.description = "setup 1, fixed vs Poisson message lengths";
    for (int ell : {10, 100}) {
      ScenarioConfig c = setup_config(1);
      c.params.ell = ell;
      const std::string tag = "setup1-l" + std::to_string(ell);
      add(tag + "-fixed", c);
      c.length_mode = LengthMode::Poisson;
      add(tag + "-poisson", c);
    }
  } else if (name == "lte1" || name == "lte2" || name == "lte3" || name == "wsn") {
    std::string upper = name;
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const TechScenario t = build_tech_scenario(upper);
    preset.description = upper + " technology scenario, message length 20";
    ScenarioConfig c;
    c.params = t.params();
    add(upper, c);
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return preset;
}

namespace {

const std::set<std::string> kKnownKeys{
    "mu",        "ell",     "nu",          "eta",    "alpha",   "kappa",
    "lambda",    "area_side", "slots",     "length_mode", "placement", "thin_radius",
    "thin_k",    "mobility", "fading_sinusoids", "seed", "realizations"};

}  // namespace

std::vector<NamedScenario> parse_scenario_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  std::vector<NamedScenario> out;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw std::invalid_argument("config: key '" + section + "' outside a [section]");
    for (const auto& [key, value] : body)
      if (!kKnownKeys.count(key))
        throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
    ScenarioConfig c = setup_config(1);
    // ptree's get(key, default) falls back silently on a malformed value
    auto get = [&body]<typename T>(const char* key, T fallback) {
      return body.count(key) ? body.get<T>(key) : fallback;
    };
    try {
      c.params.mu = get("mu", c.params.mu);
      c.params.ell = get("ell", c.params.ell);
      c.params.nu = get("nu", c.params.nu);
      if (body.count("eta")) c.params.nu = speed_from_eta(body.get<double>("eta"));
      c.params.alpha = get("alpha", c.params.alpha);
      c.params.kappa = get("kappa", c.params.kappa);
      c.params.lambda = get("lambda", c.params.lambda);
      c.area_side = get("area_side", c.area_side);
      c.horizon = get("slots", c.horizon);
      const std::string len = get("length_mode", std::string("fixed"));
      if (len == "poisson") c.length_mode = LengthMode::Poisson;
      else if (len != "fixed") throw std::invalid_argument("length_mode must be fixed or poisson");
      const std::string place = get("placement", std::string("ppp"));
      if (place == "thinned") c.placement_mode = PlacementMode::Thinned;
      else if (place != "ppp") throw std::invalid_argument("placement must be ppp or thinned");
      c.thin_radius = get("thin_radius", c.thin_radius);
      c.thin_k = get("thin_k", c.thin_k);
      c.mobility = get("mobility", c.mobility);
      c.fading_sinusoids = get("fading_sinusoids", c.fading_sinusoids);
      c.seed = get("seed", c.seed);
      c.realizations = get("realizations", c.realizations);
      c.validate();
    } catch (const pt::ptree_bad_data& e) {
      throw std::invalid_argument("config: bad value in [" + section + "]: " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config: [" + section + "]: " + e.what());
    }
    out.push_back({section, c});
  }
  return out;
}

std::vector<NamedScenario> load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  try {
    return parse_scenario_config(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace ipred
