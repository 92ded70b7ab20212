#pragma once

// Synthetic classification data and non-IID partitioning.
//
// Datasets are Gaussian class clusters with deterministically placed means:
// mean of class c sits on axis (c mod f) at distance class_sep * (1 + c / f)
// from the origin, which guarantees pairwise mean separation >= class_sep
// without rejection sampling. Labels cycle 0..C-1 so class counts stay
// balanced within one sample.
//
// Partitioning follows the usual Dirichlet label-skew recipe: per class, a
// Dirichlet(alpha) draw over devices fixes the split proportions, realized
// by cumulative rounding. Devices left empty steal one sample from the
// currently largest device so every device ends with at least one sample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flswarm/errors.hpp"
#include "flswarm/rng.hpp"
#include "flswarm/util.hpp"

namespace flswarm::datagen {

struct DatasetSpec {
  int n_samples = 2000;
  int n_features = 8;
  int num_classes = 5;
  double class_sep = 2.0;
};

struct Dataset {
  std::vector<double> features;  // n * n_features, row-major
  std::vector<int> labels;       // size n, values in [0, num_classes)
  int n = 0;
  int n_features = 0;
  int num_classes = 0;

  const double* row(int i) const {
    return features.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_features);
  }
};

inline Dataset make_synthetic_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  if (spec.num_classes < 2) throw Error("make_synthetic_dataset: num_classes must be >= 2");
  if (spec.n_samples < spec.num_classes)
    throw Error("make_synthetic_dataset: n_samples must be >= num_classes");
  if (spec.n_features < 1) throw Error("make_synthetic_dataset: n_features must be >= 1");
  if (spec.class_sep < 0) throw Error("make_synthetic_dataset: class_sep must be >= 0");

  const int f = spec.n_features;
  std::vector<std::vector<double>> means(static_cast<std::size_t>(spec.num_classes),
                                         std::vector<double>(static_cast<std::size_t>(f), 0.0));
  for (int c = 0; c < spec.num_classes; ++c)
    means[static_cast<std::size_t>(c)][static_cast<std::size_t>(c % f)] =
        spec.class_sep * (1.0 + static_cast<double>(c / f));

  Dataset ds;
  ds.n = spec.n_samples;
  ds.n_features = f;
  ds.num_classes = spec.num_classes;
  ds.features.resize(static_cast<std::size_t>(ds.n) * static_cast<std::size_t>(f));
  ds.labels.resize(static_cast<std::size_t>(ds.n));

  rng::Stream stream = rng::make_stream(seed, {rng::tag::dataset});
  for (int i = 0; i < ds.n; ++i) {
    const int label = i % spec.num_classes;
    ds.labels[static_cast<std::size_t>(i)] = label;
    double* r = ds.features.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(f);
    const auto& mu = means[static_cast<std::size_t>(label)];
    for (int k = 0; k < f; ++k) r[k] = mu[static_cast<std::size_t>(k)] + stream.normal();
  }
  return ds;
}

// Head/tail split; label cycling keeps both halves balanced within one.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, int n_head) {
  if (n_head < 0 || n_head > ds.n) throw Error("split_dataset: bad split point");
  auto take = [&](int begin, int count) {
    Dataset out;
    out.n = count;
    out.n_features = ds.n_features;
    out.num_classes = ds.num_classes;
    out.features.assign(ds.row(begin), ds.row(begin) + static_cast<std::size_t>(count) *
                                                           static_cast<std::size_t>(ds.n_features));
    out.labels.assign(ds.labels.begin() + begin, ds.labels.begin() + begin + count);
    return out;
  };
  return {take(0, n_head), take(n_head, ds.n - n_head)};
}

struct PartitionAssignment {
  // device_to_indices[d] = sorted sample indices owned by device d
  std::vector<std::vector<int>> device_to_indices;
  int n_devices() const { return static_cast<int>(device_to_indices.size()); }
};

inline PartitionAssignment dirichlet_partition(const Dataset& ds, int n_devices, double alpha,
                                               std::uint64_t seed, double coverage = 1.0) {
  if (n_devices < 1) throw Error("dirichlet_partition: n_devices must be >= 1");
  if (!(alpha > 0)) throw Error("dirichlet_partition: alpha must be > 0");
  if (coverage <= 0 || coverage > 1) throw Error("dirichlet_partition: coverage must be in (0,1]");
  if (n_devices > ds.n)
    throw PartitionInfeasible("n_devices=" + std::to_string(n_devices) + " exceeds n_samples=" +
                              std::to_string(ds.n));

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (int i = 0; i < ds.n; ++i)
    by_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);

  PartitionAssignment pa;
  pa.device_to_indices.assign(static_cast<std::size_t>(n_devices), {});
  for (int c = 0; c < ds.num_classes; ++c) {
    auto& idx = by_class[static_cast<std::size_t>(c)];
    const int n_c = static_cast<int>(static_cast<double>(idx.size()) * coverage);
    if (n_c == 0) continue;
    rng::Stream stream = rng::make_stream(seed, {rng::tag::partition, static_cast<std::uint64_t>(c)});
    std::vector<double> p = stream.dirichlet(alpha, n_devices);
    double cum = 0.0;
    int prev = 0;
    for (int d = 0; d < n_devices; ++d) {
      cum += p[static_cast<std::size_t>(d)];
      int bound = (d + 1 == n_devices) ? n_c
                                       : std::clamp(static_cast<int>(std::llround(cum * n_c)),
                                                    prev, n_c);
      for (int k = prev; k < bound; ++k)
        pa.device_to_indices[static_cast<std::size_t>(d)].push_back(idx[static_cast<std::size_t>(k)]);
      prev = bound;
    }
  }

  // Guarantee >= 1 sample per device: empty devices (ascending id) steal the
  // last index of the currently largest device (tie -> lowest id).
  for (int d = 0; d < n_devices; ++d) {
    if (!pa.device_to_indices[static_cast<std::size_t>(d)].empty()) continue;
    int donor = -1;
    std::size_t donor_size = 1;  // donor must keep one sample
    for (int e = 0; e < n_devices; ++e) {
      std::size_t sz = pa.device_to_indices[static_cast<std::size_t>(e)].size();
      if (sz > donor_size) {
        donor = e;
        donor_size = sz;
      }
    }
    if (donor < 0) throw PartitionInfeasible("cannot give every device a sample");
    auto& from = pa.device_to_indices[static_cast<std::size_t>(donor)];
    pa.device_to_indices[static_cast<std::size_t>(d)].push_back(from.back());
    from.pop_back();
  }
  for (auto& v : pa.device_to_indices) std::sort(v.begin(), v.end());
  return pa;
}

struct DeviceDataStats {
  std::vector<double> label_hist;  // length C, sums to 1
  int n_i = 0;
  double relevance = 0.0;   // R_i in [0,1]
  double redundancy = 0.0;  // D_i in [0,1]
};

inline std::vector<double> label_histogram(const Dataset& ds, const std::vector<int>& indices) {
  std::vector<double> h(static_cast<std::size_t>(ds.num_classes), 0.0);
  for (int i : indices) h[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])] += 1.0;
  if (!indices.empty())
    for (double& v : h) v /= static_cast<double>(indices.size());
  return h;
}

inline std::vector<double> global_label_histogram(const Dataset& ds) {
  std::vector<double> h(static_cast<std::size_t>(ds.num_classes), 0.0);
  for (int l : ds.labels) h[static_cast<std::size_t>(l)] += 1.0;
  if (ds.n > 0)
    for (double& v : h) v /= static_cast<double>(ds.n);
  return h;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionMismatch("total_variation: histogram sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// R_i = 1 - TV(hist_i, global hist); D_i = max over already-selected devices
// of 1 - TV(hist_i, hist_s), or 0 when nothing is selected yet.
inline DeviceDataStats device_stats(const PartitionAssignment& pa, const Dataset& ds,
                                    int device_id, const std::vector<int>& already_selected) {
  if (device_id < 0 || device_id >= pa.n_devices())
    throw UnknownDevice("device_stats: id " + std::to_string(device_id));
  const auto& idx = pa.device_to_indices[static_cast<std::size_t>(device_id)];
  if (idx.empty()) throw UnknownDevice("device_stats: device " + std::to_string(device_id) +
                                       " has no samples");
  DeviceDataStats st;
  st.n_i = static_cast<int>(idx.size());
  st.label_hist = label_histogram(ds, idx);
  st.relevance = std::clamp(1.0 - total_variation(st.label_hist, global_label_histogram(ds)),
                            0.0, 1.0);
  double d = 0.0;
  for (int s : already_selected) {
    if (s < 0 || s >= pa.n_devices())
      throw UnknownDevice("device_stats: selected id " + std::to_string(s));
    const auto& sidx = pa.device_to_indices[static_cast<std::size_t>(s)];
    d = std::max(d, 1.0 - total_variation(st.label_hist, label_histogram(ds, sidx)));
  }
  st.redundancy = std::clamp(d, 0.0, 1.0);
  return st;
}

// Binary layout (little-endian): u64 n, u64 n_features, u64 num_classes,
// then n*n_features f64 features row-major, then n i32 labels.
inline void write_dataset(const Dataset& ds, const std::string& path_bin) {
  std::ofstream os(path_bin, std::ios::binary);
  if (!os) throw Error("write_dataset: cannot open " + path_bin);
  util::write_u64_le(os, static_cast<std::uint64_t>(ds.n));
  util::write_u64_le(os, static_cast<std::uint64_t>(ds.n_features));
  util::write_u64_le(os, static_cast<std::uint64_t>(ds.num_classes));
  for (double v : ds.features) util::write_f64_le(os, v);
  for (int l : ds.labels) util::write_i32_le(os, l);
  if (!os) throw Error("write_dataset: write failed for " + path_bin);

  nlohmann::json meta{{"n", ds.n}, {"n_features", ds.n_features}, {"num_classes", ds.num_classes}};
  std::ofstream ms(path_bin + ".json");
  ms << meta.dump(2) << "\n";
}

inline Dataset read_dataset(const std::string& path_bin) {
  std::ifstream is(path_bin, std::ios::binary);
  if (!is) throw Error("read_dataset: cannot open " + path_bin);
  Dataset ds;
  ds.n = static_cast<int>(util::read_u64_le(is));
  ds.n_features = static_cast<int>(util::read_u64_le(is));
  ds.num_classes = static_cast<int>(util::read_u64_le(is));
  if (!is || ds.n < 0 || ds.n_features < 1 || ds.num_classes < 2)
    throw Error("read_dataset: bad header in " + path_bin);
  ds.features.resize(static_cast<std::size_t>(ds.n) * static_cast<std::size_t>(ds.n_features));
  for (double& v : ds.features) v = util::read_f64_le(is);
  ds.labels.resize(static_cast<std::size_t>(ds.n));
  for (int& l : ds.labels) l = util::read_i32_le(is);
  if (!is) throw Error("read_dataset: truncated file " + path_bin);
  return ds;
}

}  // namespace flswarm::datagen
