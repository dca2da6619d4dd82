#include "ipred/network_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace ipred {

void ScenarioConfig::validate() const {
  params.validate();
  if (!(area_side > 0.0)) throw std::invalid_argument("area side must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (placement_mode == PlacementMode::Thinned) {
    if (!(thin_radius > 0.0)) throw std::invalid_argument("thinning radius must be positive");
    if (thin_k < 0) throw std::invalid_argument("thinning neighbour count must be >= 0");
  }
  if (fading_sinusoids < 1) throw std::invalid_argument("fading needs at least one sinusoid");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over a golden-ratio stride.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Vec2> sample_ppp(double lambda, double area_side, Rng& rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sample_ppp: lambda must be positive");
  if (!(area_side > 0.0)) throw std::invalid_argument("sample_ppp: area side must be positive");
  std::poisson_distribution<long> count_dist(lambda * area_side * area_side);
  std::uniform_real_distribution<double> coord(-0.5 * area_side, 0.5 * area_side);
  const long count = count_dist(rng);
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(count));
  for (long n = 0; n < count; ++n) {
    Vec2 p;
    do {
      p = {coord(rng), coord(rng)};
    } while (std::hypot(p.x, p.y) < 1e-6);
    nodes.push_back(p);
  }
  return nodes;
}

std::vector<std::size_t> thin_keep_indices_bruteforce(std::span<const Vec2> nodes, double r,
                                                      int k) {
  std::vector<std::size_t> kept;
  const double r2 = r * r;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int neighbours = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j) continue;
      const double dx = nodes[i].x - nodes[j].x;
      const double dy = nodes[i].y - nodes[j].y;
      if (dx * dx + dy * dy <= r2) ++neighbours;
    }
    if (neighbours >= k) kept.push_back(i);
  }
  return kept;
}

std::vector<std::size_t> thin_keep_indices(std::span<const Vec2> nodes, double r, int k) {
  if (!(r > 0.0)) throw std::invalid_argument("thinning radius must be positive");
  std::vector<std::size_t> all(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) all[i] = i;
  if (k <= 0 || nodes.empty()) return all;

  // Uniform grid with cell side r; neighbours lie in the 3x3 block.
  auto cell_of = [r](double v) { return static_cast<long>(std::floor(v / r)); };
  auto key = [](long cx, long cy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    grid[key(cell_of(nodes[i].x), cell_of(nodes[i].y))].push_back(i);

  const double r2 = r * r;
  std::vector<char> keep(nodes.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const long cx = cell_of(nodes[i].x);
    const long cy = cell_of(nodes[i].y);
    int neighbours = 0;
    for (long gx = cx - 1; gx <= cx + 1 && neighbours < k; ++gx) {
      for (long gy = cy - 1; gy <= cy + 1 && neighbours < k; ++gy) {
        const auto it = grid.find(key(gx, gy));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (j == i) continue;
          const double dx = nodes[i].x - nodes[j].x;
          const double dy = nodes[i].y - nodes[j].y;
          if (dx * dx + dy * dy <= r2 && ++neighbours >= k) break;
        }
      }
    }
    keep[i] = neighbours >= k ? 1 : 0;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (keep[i]) kept.push_back(i);
  return kept;
}

std::vector<Vec2> thin_inhomogeneous(std::span<const Vec2> nodes, double r, int k) {
  std::vector<Vec2> out;
  for (std::size_t i : thin_keep_indices(nodes, r, k)) out.push_back(nodes[i]);
  return out;
}

void step_mobility(NodeState& node, double nu, Rng& rng, long slots) {
  if (slots <= 0 || nu == 0.0) {
    node.position_slot += std::max(0L, slots);
    return;
  }
  const double sigma = nu * std::sqrt(2.0 / std::numbers::pi * static_cast<double>(slots));
  std::normal_distribution<double> step(0.0, sigma);
  node.position.x += step(rng);
  node.position.y += step(rng);
  node.position_slot += slots;
}

void init_fading(FadingState& fading, double nu, int sinusoids, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const auto n = static_cast<std::size_t>(sinusoids);
  fading.doppler.resize(n);
  fading.phase.resize(n);
  fading.phasor.assign(n, {});
  fading.rotation.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    fading.doppler[s] = 2.0 * std::numbers::pi * nu * std::cos(angle(rng));
    fading.phase[s] = angle(rng);
    fading.rotation[s] = std::polar(1.0, fading.doppler[s]);
  }
  fading.phasor_slot = -1;
}

double step_fading(NodeState& node, long slot) {
  FadingState& f = node.fading;
  const std::size_t n = f.doppler.size();
  std::complex<double> sum{};
  if (f.phasor_slot >= 0 && slot == f.phasor_slot + 1) {
    for (std::size_t s = 0; s < n; ++s) {
      f.phasor[s] *= f.rotation[s];
      sum += f.phasor[s];
    }
  } else if (slot == f.phasor_slot) {
    for (std::size_t s = 0; s < n; ++s) sum += f.phasor[s];
  } else {
    for (std::size_t s = 0; s < n; ++s) {
      f.phasor[s] = std::polar(1.0, f.doppler[s] * static_cast<double>(slot) + f.phase[s]);
      sum += f.phasor[s];
    }
  }
  f.phasor_slot = slot;
  node.fading_power = std::norm(sum) / static_cast<double>(n);
  return node.fading_power;
}

namespace {

int draw_length(int ell, LengthMode mode, Rng& rng) {
  if (mode == LengthMode::Fixed) return ell;
  std::poisson_distribution<int> dist(ell);
  int len = 0;
  while (len == 0) len = dist(rng);
  return len;
}

}  // namespace

bool step_traffic(NodeState& node, double mu, int ell, LengthMode mode, Rng& rng) {
  if (node.remaining > 0) --node.remaining;
  if (node.remaining == 0) {
    const double start = std::min(1.0, mu / (1.0 - mu * (ell - 1)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < start) {
      node.message_length = draw_length(ell, mode, rng);
      node.remaining = node.message_length;
    }
  }
  return node.remaining > 0;
}

void init_traffic(NodeState& node, double mu, int ell, LengthMode mode, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  node.remaining = 0;
  node.message_length = 0;
  if (unit(rng) < mu * ell) {
    node.message_length = draw_length(ell, mode, rng);
    std::uniform_int_distribution<int> phase(1, node.message_length);
    node.remaining = phase(rng);
  }
}

double measure_interference(std::span<const NodeState> nodes, double kappa, double alpha) {
  double total = 0.0;
  for (const NodeState& n : nodes) {
    if (n.remaining <= 0) continue;
    const double d2 = n.position.x * n.position.x + n.position.y * n.position.y;
    total += kappa * std::pow(d2, -0.5 * alpha) * n.fading_power;
  }
  return total;
}

InterferenceTrace run_realization(const ScenarioConfig& config, std::size_t index) {
  const SystemParams& p = config.params;
  config.validate();
  InterferenceTrace trace;
  trace.seed = derive_seed(config.seed, index);
  Rng placement_rng(trace.seed);

  std::vector<Vec2> positions = sample_ppp(p.lambda, config.area_side, placement_rng);
  std::vector<std::size_t> ids;
  if (config.placement_mode == PlacementMode::Thinned) {
    ids = thin_keep_indices(positions, config.thin_radius, config.thin_k);
  } else {
    ids.resize(positions.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }

  // Each node owns an engine keyed by its index in the unthinned process, so
  // thinning does not perturb the surviving nodes' randomness.
  std::vector<NodeState> nodes(ids.size());
  std::vector<Rng> rngs;
  rngs.reserve(ids.size());
  for (std::size_t n = 0; n < ids.size(); ++n) {
    rngs.emplace_back(derive_seed(trace.seed ^ 0xa5a5a5a5a5a5a5a5ULL, ids[n]));
    nodes[n].position = positions[ids[n]];
    init_traffic(nodes[n], p.mu, p.ell, config.length_mode, rngs[n]);
    init_fading(nodes[n].fading, p.nu, config.fading_sinusoids, rngs[n]);
  }

  for (long t = -config.warmup_slots(); t < 0; ++t)
    for (std::size_t n = 0; n < nodes.size(); ++n)
      step_traffic(nodes[n], p.mu, p.ell, config.length_mode, rngs[n]);

  trace.values.resize(config.horizon);
  for (std::size_t t = 0; t < config.horizon; ++t) {
    const auto slot = static_cast<long>(t);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (!step_traffic(nodes[n], p.mu, p.ell, config.length_mode, rngs[n])) continue;
      // Positions and fading are only observed while transmitting; the
      // Brownian increments over unobserved slots are drawn in one step.
      if (config.mobility) step_mobility(nodes[n], p.nu, rngs[n], slot - nodes[n].position_slot);
      step_fading(nodes[n], slot);
    }
    trace.values[t] = measure_interference(nodes, p.kappa, p.alpha);
  }
  return trace;
}

std::vector<InterferenceTrace> simulate_serial(const ScenarioConfig& config, std::size_t first,
                                               std::size_t count) {
  config.validate();
  std::vector<InterferenceTrace> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = run_realization(config, first + i);
  return out;
}

std::vector<InterferenceTrace> simulate_parallel(const ScenarioConfig& config, std::size_t first,
                                                 std::size_t count) {
  config.validate();
  std::vector<InterferenceTrace> out(count);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < count; ++i) out[i] = run_realization(config, first + i);
  return out;
}

CorrelationCurve ensemble_autocorr(std::span<const InterferenceTrace> traces, std::size_t max_lag) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& tr : traces) {
    for (double v : tr.values) {
      sum += v;
      sum_sq += v * v;
    }
    count += tr.values.size();
  }
  if (count == 0) throw std::invalid_argument("ensemble_autocorr: no samples");
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  CorrelationCurve curve;
  curve.values.assign(max_lag + 1, 0.0);
  curve.values[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double cross = 0.0;
    std::size_t pairs = 0;
    for (const auto& tr : traces) {
      const auto& v = tr.values;
      for (std::size_t t = 0; t + lag < v.size(); ++t) cross += (v[t] - mean) * (v[t + lag] - mean);
      if (v.size() > lag) pairs += v.size() - lag;
    }
    curve.values[lag] = pairs > 0 ? cross / static_cast<double>(pairs) / var : 0.0;
  }
  return curve;
}

CorrelationCurve time_averaged_autocorr(std::span<const InterferenceTrace> traces,
                                        std::size_t max_lag) {
  CorrelationCurve curve;
  curve.values.assign(max_lag + 1, 0.0);
  std::size_t used = 0;
  for (const auto& tr : traces) {
    const auto& v = tr.values;
    if (v.size() <= max_lag) continue;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    if (!(var > 0.0)) continue;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
      double c = 0.0;
      for (std::size_t t = 0; t + lag < v.size(); ++t) c += (v[t] - mean) * (v[t + lag] - mean);
      curve.values[lag] += c / static_cast<double>(v.size() - lag) / var;
    }
    ++used;
  }
  if (used == 0) throw std::invalid_argument("time_averaged_autocorr: no usable traces");
  for (double& x : curve.values) x /= static_cast<double>(used);
  curve.values[0] = 1.0;
  return curve;
}

}  // namespace ipred
