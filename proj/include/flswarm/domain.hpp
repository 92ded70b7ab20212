#pragma once

// Core data model: devices, network topology, model parameters, objective
// weights. Topology generation builds a random geometric graph over a square
// area with a relay tier and a single cloud node, then patches connectivity.
//
// Units throughout: energy in joules, time in seconds, data in megabits,
// bandwidth in Mbps, distance in meters, latency stored in milliseconds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flswarm/errors.hpp"
#include "flswarm/rng.hpp"

namespace flswarm::domain {

using NodeId = int;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class NodeKind { device, relay, cloud };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::device: return "device";
    case NodeKind::relay: return "relay";
    case NodeKind::cloud: return "cloud";
  }
  return "?";
}

struct Node {
  NodeId id = -1;
  NodeKind kind = NodeKind::device;
  Vec2 position;
};

// Undirected channel; stored with src < dst.
struct Link {
  NodeId src = -1;
  NodeId dst = -1;
  double bandwidth_mbps = 0.0;  // > 0
  double latency_ms = 0.0;      // >= 0
  double distance_m = 0.0;      // >= 0
};

struct NetworkGraph {
  std::vector<Node> nodes;  // indexed by id
  std::vector<Link> links;
  NodeId cloud_id = -1;
  // adjacency[n] = (neighbor, link index) pairs in link-insertion order
  std::vector<std::vector<std::pair<NodeId, int>>> adjacency;

  void rebuild_adjacency() {
    adjacency.assign(nodes.size(), {});
    for (int li = 0; li < static_cast<int>(links.size()); ++li) {
      const Link& l = links[static_cast<std::size_t>(li)];
      adjacency[static_cast<std::size_t>(l.src)].emplace_back(l.dst, li);
      adjacency[static_cast<std::size_t>(l.dst)].emplace_back(l.src, li);
    }
  }

  const Node& node(NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }

  std::vector<NodeId> device_ids() const {
    std::vector<NodeId> out;
    for (const Node& n : nodes)
      if (n.kind == NodeKind::device) out.push_back(n.id);
    return out;
  }
};

struct Device {
  int id = -1;
  double compute_capacity = 1e6;   // abstract ops/second, > 0
  double battery_j = 0.0;          // >= 0
  double energy_per_step_j = 0.1;  // > 0
  double tx_power_w = 2.0;         // > 0
  Vec2 position;
  int dataset_ref = -1;  // index into the partition's device slot
};

struct ModelParams {
  std::vector<double> values;
  int dim() const { return static_cast<int>(values.size()); }
  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Weights of the round-level trade-off objective (energy / time / loss).
struct ObjectiveWeights {
  double alpha_energy = 1.0;
  double gamma_time = 1.0;
  double beta_loss = 1.0;
};

struct TopologySpec {
  int n_devices = 50;
  int n_relays = 5;
  double area_m = 1000.0;
  std::pair<double, double> bw_range_mbps{10.0, 100.0};
  std::pair<double, double> latency_range_ms{1.0, 20.0};
  double connection_radius_m = 300.0;
};

struct FleetSpec {
  std::pair<double, double> compute_capacity_range{5e5, 5e6};
  std::pair<double, double> battery_range_j{500.0, 1500.0};
  std::pair<double, double> energy_per_step_range_j{0.05, 0.2};
  double tx_power_w = 2.0;
  double idle_power_w = 0.5;
};

namespace detail {

// Union-find over node ids, used while patching connectivity.
struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace detail

// Nodes reachable from `start` over the link set.
inline std::vector<char> reachable_from(const NetworkGraph& g, NodeId start) {
  std::vector<char> seen(g.nodes.size(), 0);
  if (start < 0 || start >= static_cast<NodeId>(g.nodes.size())) return seen;
  std::queue<NodeId> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  while (!q.empty()) {
    NodeId cur = q.front();
    q.pop();
    for (auto [nb, li] : g.adjacency[static_cast<std::size_t>(cur)]) {
      (void)li;
      if (!seen[static_cast<std::size_t>(nb)]) {
        seen[static_cast<std::size_t>(nb)] = 1;
        q.push(nb);
      }
    }
  }
  return seen;
}

// Builds a random geometric graph: device/relay positions uniform over the
// square, device-device and device-relay (and relay-relay) links exactly when
// the endpoint distance is within the connection radius, a backhaul link from
// every relay to the cloud, and one patch link per disconnected component.
// Pure function of (spec, seed).
inline NetworkGraph build_topology(const TopologySpec& spec, std::uint64_t seed) {
  if (spec.n_devices < 1 || spec.n_devices > 10000)
    throw Error("build_topology: n_devices must be in [1, 10000]");
  if (spec.n_relays < 0) throw Error("build_topology: n_relays must be >= 0");
  if (spec.area_m <= 0) throw Error("build_topology: area_m must be > 0");
  if (spec.bw_range_mbps.first <= 0 || spec.bw_range_mbps.second < spec.bw_range_mbps.first)
    throw Error("build_topology: invalid bandwidth range");
  if (spec.latency_range_ms.first < 0 || spec.latency_range_ms.second < spec.latency_range_ms.first)
    throw Error("build_topology: invalid latency range");
  if (spec.connection_radius_m <= 0)
    throw Error("build_topology: connection_radius_m must be > 0");

  NetworkGraph g;
  const int n_mobile = spec.n_devices + spec.n_relays;
  g.nodes.reserve(static_cast<std::size_t>(n_mobile) + 1);

  rng::Stream dev_stream = rng::make_stream(seed, {rng::tag::topology_devices});
  for (int i = 0; i < spec.n_devices; ++i) {
    Node n;
    n.id = i;
    n.kind = NodeKind::device;
    n.position = {dev_stream.uniform(0.0, spec.area_m), dev_stream.uniform(0.0, spec.area_m)};
    g.nodes.push_back(n);
  }
  rng::Stream relay_stream = rng::make_stream(seed, {rng::tag::topology_relays});
  for (int i = 0; i < spec.n_relays; ++i) {
    Node n;
    n.id = spec.n_devices + i;
    n.kind = NodeKind::relay;
    n.position = {relay_stream.uniform(0.0, spec.area_m), relay_stream.uniform(0.0, spec.area_m)};
    g.nodes.push_back(n);
  }
  Node cloud;
  cloud.id = n_mobile;
  cloud.kind = NodeKind::cloud;
  cloud.position = {spec.area_m / 2.0, spec.area_m / 2.0};
  g.nodes.push_back(cloud);
  g.cloud_id = cloud.id;

  rng::Stream link_stream = rng::make_stream(seed, {rng::tag::topology_links});
  auto add_link = [&](NodeId a, NodeId b) {
    Link l;
    l.src = std::min(a, b);
    l.dst = std::max(a, b);
    l.bandwidth_mbps = link_stream.uniform(spec.bw_range_mbps.first, spec.bw_range_mbps.second);
    l.latency_ms = link_stream.uniform(spec.latency_range_ms.first, spec.latency_range_ms.second);
    l.distance_m = distance(g.node(a).position, g.node(b).position);
    g.links.push_back(l);
  };

  detail::DisjointSet dsu(g.nodes.size());
  // Radius links among devices and relays, ascending (i, j).
  for (int i = 0; i < n_mobile; ++i) {
    for (int j = i + 1; j < n_mobile; ++j) {
      if (distance(g.node(i).position, g.node(j).position) <= spec.connection_radius_m) {
        add_link(i, j);
        dsu.unite(i, j);
      }
    }
  }
  // Relay backhaul to the cloud (wired; not radius-limited).
  for (int r = spec.n_devices; r < n_mobile; ++r) {
    add_link(r, g.cloud_id);
    dsu.unite(r, g.cloud_id);
  }
  // Patch each component that cannot reach the cloud: its node closest to the
  // cloud (tie -> lowest id) gets a direct uplink. One pass suffices, so the
  // retry budget of the generation contract is never consumed.
  const int cloud_root = dsu.find(g.cloud_id);
  std::set<int> handled;
  for (int i = 0; i < n_mobile; ++i) {
    int root = dsu.find(i);
    if (root == dsu.find(g.cloud_id)) continue;
    if (handled.count(root)) continue;
    handled.insert(root);
    int best = i;
    double best_d = distance(g.node(i).position, cloud.position);
    for (int j = i + 1; j < n_mobile; ++j) {
      if (dsu.find(j) != root) continue;
      double d = distance(g.node(j).position, cloud.position);
      if (d < best_d) {
        best = j;
        best_d = d;
      }
    }
    add_link(best, g.cloud_id);
    dsu.unite(best, g.cloud_id);
  }
  (void)cloud_root;

  g.rebuild_adjacency();

  std::vector<char> seen = reachable_from(g, g.cloud_id);
  for (const Node& n : g.nodes)
    if (!seen[static_cast<std::size_t>(n.id)])
      throw InfeasibleTopology("node " + std::to_string(n.id) +
                               " unreachable after connectivity patching");
  return g;
}

enum class Violation {
  missing_cloud,
  multiple_clouds,
  self_loop,
  duplicate_link,
  bad_endpoint,
  nonpositive_bandwidth,
  negative_latency,
  distance_mismatch,
  disconnected,
};

inline const char* to_string(Violation v) {
  switch (v) {
    case Violation::missing_cloud: return "MissingCloud";
    case Violation::multiple_clouds: return "MultipleClouds";
    case Violation::self_loop: return "SelfLoop";
    case Violation::duplicate_link: return "DuplicateLink";
    case Violation::bad_endpoint: return "BadEndpoint";
    case Violation::nonpositive_bandwidth: return "NonpositiveBandwidth";
    case Violation::negative_latency: return "NegativeLatency";
    case Violation::distance_mismatch: return "DistanceMismatch";
    case Violation::disconnected: return "Disconnected";
  }
  return "?";
}

struct ValidationIssue {
  Violation kind;
  NodeId a = -1;
  NodeId b = -1;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool has(Violation v) const {
    for (const auto& i : issues)
      if (i.kind == v) return true;
    return false;
  }
};

// Report-style check of every graph invariant; never throws.
inline ValidationReport validate_graph(const NetworkGraph& g) {
  ValidationReport rep;
  int clouds = 0;
  for (const Node& n : g.nodes)
    if (n.kind == NodeKind::cloud) ++clouds;
  if (clouds == 0) rep.issues.push_back({Violation::missing_cloud, -1, -1});
  if (clouds > 1) rep.issues.push_back({Violation::multiple_clouds, -1, -1});

  std::set<std::pair<NodeId, NodeId>> seen_pairs;
  const NodeId n_nodes = static_cast<NodeId>(g.nodes.size());
  for (const Link& l : g.links) {
    if (l.src < 0 || l.src >= n_nodes || l.dst < 0 || l.dst >= n_nodes) {
      rep.issues.push_back({Violation::bad_endpoint, l.src, l.dst});
      continue;
    }
    if (l.src == l.dst) rep.issues.push_back({Violation::self_loop, l.src, l.dst});
    auto key = std::minmax(l.src, l.dst);
    if (!seen_pairs.insert({key.first, key.second}).second)
      rep.issues.push_back({Violation::duplicate_link, l.src, l.dst});
    if (!(l.bandwidth_mbps > 0))
      rep.issues.push_back({Violation::nonpositive_bandwidth, l.src, l.dst});
    if (l.latency_ms < 0) rep.issues.push_back({Violation::negative_latency, l.src, l.dst});
    double d = distance(g.node(l.src).position, g.node(l.dst).position);
    if (std::abs(d - l.distance_m) > 1e-6)
      rep.issues.push_back({Violation::distance_mismatch, l.src, l.dst});
  }

  if (clouds == 1 && g.cloud_id >= 0 && g.cloud_id < n_nodes) {
    std::vector<char> seen = reachable_from(g, g.cloud_id);
    for (const Node& n : g.nodes)
      if (!seen[static_cast<std::size_t>(n.id)])
        rep.issues.push_back({Violation::disconnected, n.id, -1});
  }
  return rep;
}

inline nlohmann::json graph_to_json(const NetworkGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"x", n.position.x},
                     {"y", n.position.y}});
  }
  nlohmann::json links = nlohmann::json::array();
  for (const Link& l : g.links) {
    links.push_back({{"src", l.src},
                     {"dst", l.dst},
                     {"bandwidth_mbps", l.bandwidth_mbps},
                     {"latency_ms", l.latency_ms},
                     {"distance_m", l.distance_m}});
  }
  return nlohmann::json{{"nodes", nodes}, {"links", links}, {"cloud_id", g.cloud_id}};
}

// Samples per-device capabilities for every device node, ascending id.
inline std::vector<Device> make_fleet(const FleetSpec& spec, const NetworkGraph& g,
                                      std::uint64_t seed) {
  if (spec.compute_capacity_range.first <= 0 || spec.energy_per_step_range_j.first <= 0 ||
      spec.battery_range_j.first < 0 || spec.tx_power_w <= 0 || spec.idle_power_w < 0)
    throw Error("make_fleet: invalid fleet spec");
  rng::Stream stream = rng::make_stream(seed, {rng::tag::fleet});
  std::vector<Device> fleet;
  for (const Node& n : g.nodes) {
    if (n.kind != NodeKind::device) continue;
    Device d;
    d.id = n.id;
    d.compute_capacity =
        stream.uniform(spec.compute_capacity_range.first, spec.compute_capacity_range.second);
    d.battery_j = stream.uniform(spec.battery_range_j.first, spec.battery_range_j.second);
    d.energy_per_step_j = stream.uniform(spec.energy_per_step_range_j.first,
                                         spec.energy_per_step_range_j.second);
    d.tx_power_w = spec.tx_power_w;
    d.position = n.position;
    d.dataset_ref = static_cast<int>(fleet.size());
    fleet.push_back(d);
  }
  return fleet;
}

}  // namespace flswarm::domain
