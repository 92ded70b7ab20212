#pragma once

// Surrogate local model: multinomial logistic regression trained by
// full-batch gradient descent. Convex and deterministic, so optimizer
// behavior can be checked against closed-form and finite-difference oracles.
//
// Parameter layout: dim = (n_features + 1) * num_classes, flattened as
// values[c * (n_features + 1) + k] = weight of feature k for class c, with
// k = n_features holding the class bias.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "flswarm/datagen.hpp"
#include "flswarm/domain.hpp"
#include "flswarm/errors.hpp"

namespace flswarm::localmodel {

struct TrainConfig {
  int steps = 20;
  double lr = 0.5;
  double cost_per_step = 1e6;  // abstract ops; wall time = steps * cost / capacity
};

struct TrainReport {
  domain::ModelParams updated_params;
  double final_loss = 0.0;
  int steps = 0;
  double energy_train_j = 0.0;
  double wall_time_model_s = 0.0;
};

// Non-owning view of one device's slice of the dataset.
struct DataSlice {
  const datagen::Dataset* dataset = nullptr;
  const std::vector<int>* indices = nullptr;
  int size() const { return indices ? static_cast<int>(indices->size()) : 0; }
};

inline int param_dim(int n_features, int num_classes) {
  return (n_features + 1) * num_classes;
}

inline domain::ModelParams zero_params(int n_features, int num_classes) {
  domain::ModelParams p;
  p.values.assign(static_cast<std::size_t>(param_dim(n_features, num_classes)), 0.0);
  return p;
}

namespace detail {

inline void check_dims(const domain::ModelParams& params, const datagen::Dataset& ds) {
  if (params.dim() != param_dim(ds.n_features, ds.num_classes))
    throw DimensionMismatch("params dim " + std::to_string(params.dim()) + " != (f+1)*C = " +
                            std::to_string(param_dim(ds.n_features, ds.num_classes)));
}

inline void logits_for(const domain::ModelParams& params, const datagen::Dataset& ds, int sample,
                       std::vector<double>& logits) {
  const int f = ds.n_features;
  const int C = ds.num_classes;
  const double* x = ds.row(sample);
  for (int c = 0; c < C; ++c) {
    const double* w = params.values.data() + static_cast<std::size_t>(c) *
                                                 static_cast<std::size_t>(f + 1);
    double z = w[f];  // bias
    for (int k = 0; k < f; ++k) z += w[k] * x[k];
    logits[static_cast<std::size_t>(c)] = z;
  }
}

inline double log_sum_exp(const std::vector<double>& z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace detail

// Mean cross-entropy of the slice; finite for any finite params.
inline double local_loss(const domain::ModelParams& params, const DataSlice& data) {
  detail::check_dims(params, *data.dataset);
  if (data.size() == 0) throw Error("local_loss: empty data slice");
  const datagen::Dataset& ds = *data.dataset;
  std::vector<double> logits(static_cast<std::size_t>(ds.num_classes));
  double total = 0.0;
  for (int i : *data.indices) {
    detail::logits_for(params, ds, i, logits);
    total += detail::log_sum_exp(logits) -
             logits[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])];
  }
  return total / static_cast<double>(data.size());
}

// Analytic full-batch gradient of local_loss, same layout as params.
inline std::vector<double> loss_gradient(const domain::ModelParams& params, const DataSlice& data) {
  detail::check_dims(params, *data.dataset);
  if (data.size() == 0) throw Error("loss_gradient: empty data slice");
  const datagen::Dataset& ds = *data.dataset;
  const int f = ds.n_features;
  const int C = ds.num_classes;
  std::vector<double> grad(params.values.size(), 0.0);
  std::vector<double> logits(static_cast<std::size_t>(C));
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (int i : *data.indices) {
    detail::logits_for(params, ds, i, logits);
    const double lse = detail::log_sum_exp(logits);
    const double* x = ds.row(i);
    const int y = ds.labels[static_cast<std::size_t>(i)];
    for (int c = 0; c < C; ++c) {
      double coeff = (std::exp(logits[static_cast<std::size_t>(c)] - lse) - (c == y ? 1.0 : 0.0)) *
                     inv_n;
      double* gc = grad.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(f + 1);
      for (int k = 0; k < f; ++k) gc[k] += coeff * x[k];
      gc[f] += coeff;
    }
  }
  return grad;
}

// Full-batch gradient descent for config.steps steps. Training is
// deterministic; the seed parameter is part of the interface for stochastic
// optimizers but unused here. Energy and modeled wall time are exact
// products: steps * energy_per_step and steps * cost_per_step / capacity.
inline TrainReport local_train(const domain::ModelParams& params, const DataSlice& data,
                               const TrainConfig& config, const domain::Device& device,
                               [[maybe_unused]] std::uint64_t seed) {
  detail::check_dims(params, *data.dataset);
  if (config.steps < 0) throw Error("local_train: steps must be >= 0");
  if (!(config.lr > 0)) throw Error("local_train: lr must be > 0");
  TrainReport rep;
  rep.updated_params = params;
  rep.steps = config.steps;
  for (int s = 0; s < config.steps; ++s) {
    std::vector<double> grad = loss_gradient(rep.updated_params, data);
    for (std::size_t i = 0; i < grad.size(); ++i)
      rep.updated_params.values[i] -= config.lr * grad[i];
  }
  rep.final_loss = local_loss(rep.updated_params, data);
  rep.energy_train_j = static_cast<double>(config.steps) * device.energy_per_step_j;
  rep.wall_time_model_s =
      static_cast<double>(config.steps) * (config.cost_per_step / device.compute_capacity);
  return rep;
}

struct EvalMetrics {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
};

inline int predict(const domain::ModelParams& params, const datagen::Dataset& ds, int sample) {
  std::vector<double> logits(static_cast<std::size_t>(ds.num_classes));
  detail::logits_for(params, ds, sample, logits);
  int best = 0;
  for (int c = 1; c < ds.num_classes; ++c)
    if (logits[static_cast<std::size_t>(c)] > logits[static_cast<std::size_t>(best)]) best = c;
  return best;  // ties resolve to the lowest class id
}

// Macro-averaged metrics over all classes; classes with an empty denominator
// contribute zero to the corresponding average.
inline EvalMetrics evaluate(const domain::ModelParams& params, const datagen::Dataset& test) {
  detail::check_dims(params, test);
  if (test.n == 0) throw EmptyTestSet("evaluate: empty test set");
  const int C = test.num_classes;
  std::vector<long> tp(static_cast<std::size_t>(C), 0), fp(static_cast<std::size_t>(C), 0),
      fn(static_cast<std::size_t>(C), 0);
  long correct = 0;
  for (int i = 0; i < test.n; ++i) {
    int pred = predict(params, test, i);
    int truth = test.labels[static_cast<std::size_t>(i)];
    if (pred == truth) {
      ++tp[static_cast<std::size_t>(truth)];
      ++correct;
    } else {
      ++fp[static_cast<std::size_t>(pred)];
      ++fn[static_cast<std::size_t>(truth)];
    }
  }
  EvalMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(test.n);
  for (int c = 0; c < C; ++c) {
    const double tpc = static_cast<double>(tp[static_cast<std::size_t>(c)]);
    const double denom_p = tpc + static_cast<double>(fp[static_cast<std::size_t>(c)]);
    const double denom_r = tpc + static_cast<double>(fn[static_cast<std::size_t>(c)]);
    const double prec = denom_p > 0 ? tpc / denom_p : 0.0;
    const double rec = denom_r > 0 ? tpc / denom_r : 0.0;
    m.precision_macro += prec;
    m.recall_macro += rec;
    m.f1_macro += (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  m.precision_macro /= C;
  m.recall_macro /= C;
  m.f1_macro /= C;
  return m;
}

}  // namespace flswarm::localmodel
