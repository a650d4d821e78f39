#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcrm/adam.hpp"
#include "dcrm/boundary.hpp"
#include "dcrm/losses.hpp"
#include "dcrm/quadrature.hpp"
#include "dcrm/unet.hpp"

namespace dcrm {

/// Everything besides the weights that inference and reporting need.
struct ModelInfo {
  Method method = Method::kDcrm;
  CaseId case_id = CaseId::kCase1;
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  QuadratureKind quadrature = QuadratureKind::kTrapezoid;
  DirichletGhost ghost = DirichletGhost::kLinearExtrapolation;
  double source_sign = 1.0;
  NormStats input_stats;
  /// Maps network output to the solution: u = mean + std * out. Identity
  /// for the physics-based methods.
  ChannelStats output_stats{0.0, 1.0};
};

struct Model {
  ModelInfo info;
  UNet net;
};

struct TrainConfig {
  Method method = Method::kDcrm;
  std::size_t epochs = 100;
  std::size_t batch_size = 1;
  AdamConfig adam;
  std::uint64_t seed = 0;
  std::size_t eval_every = 50;
  NetworkConfig network;
  QuadratureKind quadrature = QuadratureKind::kTrapezoid;
  DirichletGhost ghost = DirichletGhost::kLinearExtrapolation;
  double source_sign = 1.0;
};

struct MetricRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_err = 0.0;  // mean normalized e_abs over the training set
  double test_err = 0.0;
  double wall_seconds = 0.0;
};

struct RunMetrics {
  std::vector<MetricRow> rows;
};

struct TrainResult {
  Model model;
  RunMetrics metrics;
  bool diverged = false;
  std::string message;
};

/// Labels of a dataset: stored outputs, or finite-difference solutions.
FieldBatch ground_truth(const Dataset& dataset);

/// Eval-mode forward with Dirichlet enforcement, in solution units.
FieldBatch predict(Model& model, const FieldBatch& inputs);

struct Evaluation {
  std::vector<double> per_sample;  // normalized e_abs
  double mean = 0.0;
};

/// Side-effect free evaluation against `truth`.
Evaluation evaluate(Model& model, const FieldBatch& inputs, const FieldBatch& truth);
Evaluation evaluate(Model& model, const Dataset& dataset);

/// Training objective of `model`'s method on a whole set, eval-mode forward.
double objective(Model& model, const FieldBatch& inputs, const FieldBatch* truth);

/// One optimization step's worth of work: forward in `mode`, enforcement,
/// method loss, and backward into the parameters' grad buffers (zeroed first).
/// Returns the loss; a non-finite loss leaves the gradients zero.
double loss_and_gradient(Model& model, const FieldBatch& inputs, const FieldBatch* truth,
                         const std::vector<SampleBoundary>& bcs, Mode mode, Rng& dropout_rng);

using EvalCallback = std::function<void(const MetricRow&)>;

/// Seeded minibatch training. Rows are logged at epoch 0, every `eval_every`
/// epochs and after the last epoch. A non-finite loss or gradient stops the
/// run and returns the rows logged so far with `diverged` set.
TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& test_set,
                  const EvalCallback& on_eval = {});

}  // namespace dcrm
