#pragma once

// Binary particle swarm optimizer for per-round device-subset selection.
//
// Particles move in a continuous space with one coordinate per device
// (velocity/position updates are the standard inertia + cognitive + social
// form); a position decodes to the subset of eligible devices whose sigmoid
// exceeds the threshold. Fitness combines normalized projected energy,
// data relevance, and incremental redundancy against already-added members.
//
// All randomness comes from counter-based streams keyed by
// (seed, purpose, particle, iteration), so results are independent of
// evaluation order and thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "flswarm/datagen.hpp"
#include "flswarm/errors.hpp"
#include "flswarm/rng.hpp"
#include "flswarm/util.hpp"

namespace flswarm::pso {

struct FitnessWeights {
  double alpha_e = 1.0;  // projected-energy term
  double beta_r = 1.0;   // (1 - relevance) term
  double gamma_d = 1.0;  // redundancy term
};

struct DeviceInfo {
  int device_id = -1;
  double projected_energy_j = 0.0;
  double relevance = 0.0;               // R_i in [0,1]
  std::vector<double> label_hist;       // for redundancy against selected peers
  bool eligible = true;
};

struct SelectionContext {
  std::vector<DeviceInfo> devices;  // ascending device_id
  FitnessWeights weights;

  void sort_devices() {
    std::sort(devices.begin(), devices.end(),
              [](const DeviceInfo& a, const DeviceInfo& b) { return a.device_id < b.device_id; });
  }

  const DeviceInfo* find(int device_id) const {
    auto it = std::lower_bound(devices.begin(), devices.end(), device_id,
                               [](const DeviceInfo& d, int id) { return d.device_id < id; });
    if (it == devices.end() || it->device_id != device_id) return nullptr;
    return &*it;
  }

  int n_eligible() const {
    int n = 0;
    for (const auto& d : devices) n += d.eligible ? 1 : 0;
    return n;
  }

  // Fleet-max projected energy over eligible devices; the normalizer for
  // the fitness energy term.
  double max_projected_energy() const {
    double m = 0.0;
    for (const auto& d : devices)
      if (d.eligible) m = std::max(m, d.projected_energy_j);
    return m;
  }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Fitness of a device subset (lower is better):
//   alpha_e * sum Ehat_i + beta_r * sum (1 - R_i) + gamma_d * sum D_i
// with Ehat_i normalized by the fleet-max projected energy and D_i computed
// incrementally in ascending device-id order against earlier members.
// The empty set scores 0.
inline double fitness(const std::vector<int>& subset, const SelectionContext& ctx) {
  if (subset.empty()) return 0.0;
  std::vector<int> members = subset;
  std::sort(members.begin(), members.end());
  const double max_e = ctx.max_projected_energy();
  double energy_term = 0.0, relevance_term = 0.0, redundancy_term = 0.0;
  std::vector<const DeviceInfo*> added;
  added.reserve(members.size());
  for (int id : members) {
    const DeviceInfo* d = ctx.find(id);
    if (!d) throw UnknownDevice("fitness: device " + std::to_string(id) + " not in context");
    if (!d->eligible) throw IneligibleDevice("fitness: device " + std::to_string(id));
    energy_term += max_e > 0 ? d->projected_energy_j / max_e : 0.0;
    relevance_term += 1.0 - d->relevance;
    double red = 0.0;
    for (const DeviceInfo* prev : added)
      red = std::max(red, 1.0 - datagen::total_variation(d->label_hist, prev->label_hist));
    redundancy_term += std::clamp(red, 0.0, 1.0);
    added.push_back(d);
  }
  return ctx.weights.alpha_e * energy_term + ctx.weights.beta_r * relevance_term +
         ctx.weights.gamma_d * redundancy_term;
}

struct PsoHyper {
  double omega = 0.7;
  double c1 = 1.49;
  double c2 = 1.49;
  double v_max = 4.0;
  double threshold = 0.5;
};

// Maps a continuous position to a device subset. Devices whose sigmoid
// strictly exceeds the threshold and that are eligible are selected; an
// empty result falls back to the single eligible device with the largest
// sigmoid (tie -> lowest id). Returns empty only if nothing is eligible.
inline std::vector<int> decode(const std::vector<double>& position, const SelectionContext& ctx,
                               double threshold = 0.5) {
  if (position.size() != ctx.devices.size())
    throw DimensionMismatch("decode: position length != device count");
  std::vector<int> subset;
  for (std::size_t i = 0; i < position.size(); ++i) {
    const DeviceInfo& d = ctx.devices[i];
    if (d.eligible && sigmoid(position[i]) > threshold) subset.push_back(d.device_id);
  }
  if (!subset.empty()) return subset;
  int best = -1;
  double best_sig = -1.0;
  for (std::size_t i = 0; i < position.size(); ++i) {
    if (!ctx.devices[i].eligible) continue;
    double s = sigmoid(position[i]);
    if (s > best_sig) {
      best_sig = s;
      best = ctx.devices[i].device_id;
    }
  }
  if (best >= 0) subset.push_back(best);
  return subset;
}

struct Particle {
  int id = 0;
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_fitness = 0.0;
};

struct Swarm {
  std::vector<Particle> particles;
  std::vector<double> best_position;  // global best
  double best_fitness = 0.0;
  PsoHyper hyper;
  std::uint64_t seed = 0;
  int iteration = 0;
};

// r1/r2 supplier for one velocity component; the default draws from the
// particle's (seed, iteration) stream, tests may substitute constants.
using RandPairFn = std::function<std::pair<double, double>(int particle_id, int component)>;

inline Swarm make_swarm(const SelectionContext& ctx, const PsoHyper& hyper, int n_particles,
                        std::uint64_t seed) {
  if (n_particles < 1) throw Error("make_swarm: n_particles must be >= 1");
  Swarm sw;
  sw.hyper = hyper;
  sw.seed = seed;
  const std::size_t dim = ctx.devices.size();
  sw.particles.resize(static_cast<std::size_t>(n_particles));
  for (int p = 0; p < n_particles; ++p) {
    Particle& part = sw.particles[static_cast<std::size_t>(p)];
    part.id = p;
    part.position.resize(dim);
    part.velocity.resize(dim);
    rng::Stream s = rng::make_stream(seed, {rng::tag::pso_init, static_cast<std::uint64_t>(p)});
    for (std::size_t k = 0; k < dim; ++k) part.position[k] = s.uniform(-4.0, 4.0);
    for (std::size_t k = 0; k < dim; ++k) part.velocity[k] = s.uniform(-1.0, 1.0);
    part.best_position = part.position;
    part.best_fitness = fitness(decode(part.position, ctx, hyper.threshold), ctx);
  }
  sw.best_fitness = sw.particles[0].best_fitness;
  sw.best_position = sw.particles[0].best_position;
  for (const Particle& p : sw.particles) {
    if (p.best_fitness < sw.best_fitness) {
      sw.best_fitness = p.best_fitness;
      sw.best_position = p.best_position;
    }
  }
  return sw;
}

namespace detail {

inline void step_particle(Particle& part, const Swarm& sw, const SelectionContext& ctx,
                          const RandPairFn& rand_pair, double& fitness_out) {
  const PsoHyper& h = sw.hyper;
  for (std::size_t k = 0; k < part.position.size(); ++k) {
    auto [r1, r2] = rand_pair(part.id, static_cast<int>(k));
    double v = h.omega * part.velocity[k] +
               h.c1 * r1 * (part.best_position[k] - part.position[k]) +
               h.c2 * r2 * (sw.best_position[k] - part.position[k]);
    part.velocity[k] = std::clamp(v, -h.v_max, h.v_max);
    part.position[k] += part.velocity[k];
  }
  fitness_out = fitness(decode(part.position, ctx, h.threshold), ctx);
}

}  // namespace detail

// One synchronous PSO iteration: every particle moves and is evaluated
// (parallelizable), then personal and global bests are reduced in particle-id
// order. Bests replace incumbents only on strict improvement.
inline void pso_step(Swarm& sw, const SelectionContext& ctx, const RandPairFn& rand_pair,
                     int threads = 1) {
  const std::size_t n = sw.particles.size();
  std::vector<double> fitnesses(n, 0.0);
  util::parallel_for(n, threads, [&](std::size_t i) {
    detail::step_particle(sw.particles[i], sw, ctx, rand_pair, fitnesses[i]);
  });
  for (std::size_t i = 0; i < n; ++i) {
    Particle& p = sw.particles[i];
    if (fitnesses[i] < p.best_fitness) {
      p.best_fitness = fitnesses[i];
      p.best_position = p.position;
    }
  }
  for (const Particle& p : sw.particles) {
    if (p.best_fitness < sw.best_fitness) {
      sw.best_fitness = p.best_fitness;
      sw.best_position = p.best_position;
    }
  }
  sw.iteration += 1;
}

inline void pso_step(Swarm& sw, const SelectionContext& ctx, int threads = 1) {
  const std::uint64_t seed = sw.seed;
  const int iter = sw.iteration;
  // One stream per (particle, iteration); r1 then r2 drawn per component.
  struct StreamCache {
    std::uint64_t seed;
    int iter;
    int current_particle = -1;
    rng::Stream stream{0};
  };
  thread_local StreamCache cache;
  cache.current_particle = -1;
  RandPairFn rand_pair = [seed, iter](int particle_id, int component) -> std::pair<double, double> {
    if (cache.current_particle != particle_id || component == 0 || cache.seed != seed ||
        cache.iter != iter) {
      cache = {seed, iter, particle_id,
               rng::make_stream(seed, {rng::tag::pso_step, static_cast<std::uint64_t>(particle_id),
                                       static_cast<std::uint64_t>(iter)})};
    }
    double r1 = cache.stream.next_double();
    double r2 = cache.stream.next_double();
    return {r1, r2};
  };
  pso_step(sw, ctx, rand_pair, threads);
}

struct SelectionBudget {
  int n_particles = 40;
  int n_iters = 60;
};

struct SelectionResult {
  std::vector<int> subset;    // sorted device ids
  double fitness = 0.0;
  std::vector<double> trace;  // best fitness after init and after each iteration
};

// Full Algorithm-1 run: random swarm, n_iters synchronous steps, decoded
// global best. The trace is monotone non-increasing by construction.
inline SelectionResult select_devices(const SelectionContext& ctx, const PsoHyper& hyper,
                                      const SelectionBudget& budget, std::uint64_t seed,
                                      int threads = 1) {
  if (ctx.n_eligible() == 0) throw NoEligibleDevices("select_devices: no eligible devices");
  Swarm sw = make_swarm(ctx, hyper, budget.n_particles, seed);
  SelectionResult res;
  res.trace.reserve(static_cast<std::size_t>(budget.n_iters) + 1);
  res.trace.push_back(sw.best_fitness);
  for (int t = 0; t < budget.n_iters; ++t) {
    pso_step(sw, ctx, threads);
    res.trace.push_back(sw.best_fitness);
  }
  res.subset = decode(sw.best_position, ctx, hyper.threshold);
  std::sort(res.subset.begin(), res.subset.end());
  res.fitness = sw.best_fitness;
  return res;
}

}  // namespace flswarm::pso
