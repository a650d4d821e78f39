#include "dcrm/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "dcrm/errors.hpp"
#include "dcrm/parallel.hpp"
#include "dcrm/problems.hpp"

namespace dcrm {

namespace {

constexpr std::size_t kEvalChunk = 16;

enum class StreamTag : std::uint64_t { kInit = 0, kShuffle = 1, kDropout = 2 };

Tensor network_input(const ModelInfo& info, const FieldBatch& inputs) {
  return Tensor::from_batch(normalize(inputs, info.input_stats));
}

// Eval-mode prediction of one chunk, no gradients recorded.
FieldBatch predict_chunk(Model& model, const FieldBatch& inputs) {
  Tape tape(false);
  Rng unused(0);
  const Var x = tape.constant(network_input(model.info, inputs));
  const Var out = model.net.forward(tape, x, Mode::kEval, unused);
  const Var u = affine(tape, out, model.info.output_stats.std, model.info.output_stats.mean);
  return tape.value(u).to_batch();
}

LossValue method_loss(const ModelInfo& info, const FieldBatch& pred, const FieldBatch& inputs,
                      const FieldBatch* truth, const std::vector<SampleBoundary>& bcs) {
  switch (info.method) {
    case Method::kCnn: {
      if (!truth) throw ConfigError("labels required for method cnn");
      LossValue l = supervised_loss(pred, *truth);
      // Mean squared error of the normalized fields.
      const double s = 1.0 / (info.output_stats.std * info.output_stats.std);
      l.value *= s;
      for (double& v : l.per_sample) v *= s;
      for (double& g : l.gradient.values()) g *= s;
      return l;
    }
    case Method::kCpinn:
      return cpinn_loss(pred, inputs, bcs);
    case Method::kDcrm:
      return dcrm_energy(pred, inputs, bcs, {info.quadrature, info.source_sign});
  }
  throw ConfigError("unknown method");
}

std::vector<SampleBoundary> gather_bcs(const std::vector<SampleBoundary>& all,
                                       std::span<const std::size_t> idx) {
  std::vector<SampleBoundary> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

FieldBatch ground_truth(const Dataset& dataset) {
  if (dataset.outputs) return *dataset.outputs;
  return solve_labels(dataset.inputs);
}

FieldBatch predict(Model& model, const FieldBatch& inputs) {
  if (inputs.side() != model.net.config().input_resolution)
    throw ShapeError("inputs have resolution " + std::to_string(inputs.side()) +
                     ", model expects " + std::to_string(model.net.config().input_resolution));
  const std::size_t chunks = (inputs.n() + kEvalChunk - 1) / kEvalChunk;
  FieldBatch out(inputs.n(), 1, inputs.side());
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = c * kEvalChunk; i < std::min(inputs.n(), (c + 1) * kEvalChunk); ++i)
      idx.push_back(i);
    const FieldBatch part = predict_chunk(model, inputs.gather(idx));
    for (std::size_t k = 0; k < idx.size(); ++k) out.set_field(idx[k], 0, part.field(k, 0));
  });
  enforce_boundaries(out, boundaries_from_masks(inputs, model.info.ghost));
  return out;
}

Evaluation evaluate(Model& model, const FieldBatch& inputs, const FieldBatch& truth) {
  if (truth.n() != inputs.n() || truth.side() != inputs.side())
    throw ShapeError("ground truth does not match inputs");
  Evaluation ev;
  ev.per_sample = e_abs_normalized_per_sample(predict(model, inputs), truth);
  ev.mean = std::accumulate(ev.per_sample.begin(), ev.per_sample.end(), 0.0) /
            static_cast<double>(ev.per_sample.size());
  return ev;
}

Evaluation evaluate(Model& model, const Dataset& dataset) {
  return evaluate(model, dataset.inputs, ground_truth(dataset));
}

double objective(Model& model, const FieldBatch& inputs, const FieldBatch* truth) {
  const FieldBatch pred = predict(model, inputs);
  const auto bcs = boundaries_from_masks(inputs, model.info.ghost);
  return method_loss(model.info, pred, inputs, truth, bcs).value;
}

double loss_and_gradient(Model& model, const FieldBatch& inputs, const FieldBatch* truth,
                         const std::vector<SampleBoundary>& bcs, Mode mode, Rng& dropout_rng) {
  if (bcs.size() != inputs.n()) throw ShapeError("one boundary per sample required");
  Tape tape(true);
  const Var x = tape.constant(network_input(model.info, inputs));
  const Var out = model.net.forward(tape, x, mode, dropout_rng);
  const Var u = affine(tape, out, model.info.output_stats.std, model.info.output_stats.mean);
  FieldBatch pred = tape.value(u).to_batch();
  enforce_boundaries(pred, bcs);
  LossValue loss = method_loss(model.info, pred, inputs, truth, bcs);
  model.net.zero_grad();
  if (!std::isfinite(loss.value)) return loss.value;
  for (std::size_t k = 0; k < bcs.size(); ++k) bcs[k].enforce_adjoint(loss.gradient.plane(k, 0));
  tape.backward(u, Tensor::from_batch(loss.gradient));
  return loss.value;
}

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& test_set,
                  const EvalCallback& on_eval) {
  train_set.validate();
  test_set.validate();
  if (config.method == Method::kCnn && !train_set.outputs)
    throw ConfigError("labels required for method cnn");
  if (config.batch_size == 0 || config.batch_size > train_set.size())
    throw ConfigError("batch size must lie in [1, training set size]");
  if (config.eval_every == 0) throw ConfigError("eval_every must be positive");
  if (train_set.inputs.side() != config.network.input_resolution ||
      test_set.inputs.side() != config.network.input_resolution)
    throw ConfigError("dataset resolution does not match network input resolution");
  if (config.method == Method::kDcrm && config.quadrature == QuadratureKind::kSimpson &&
      train_set.inputs.side() % 2 == 0)
    throw ConfigError("Simpson quadrature requires an odd DOF");

  const auto start = std::chrono::steady_clock::now();
  ModelInfo info;
  info.method = config.method;
  info.case_id = train_set.case_id;
  info.seed = config.seed;
  info.quadrature = config.quadrature;
  info.ghost = config.ghost;
  info.source_sign = config.source_sign;
  info.input_stats = train_set.norm_stats;
  if (config.method == Method::kCnn) info.output_stats = compute_stats(*train_set.outputs)[0];
  if (!(info.output_stats.std > 0.0)) throw ConfigError("degenerate channel");

  TrainResult result{Model{info, UNet(config.network, derive_seed(config.seed, 0))}, {}, false, {}};
  Model& model = result.model;

  const FieldBatch train_truth = ground_truth(train_set);
  const FieldBatch test_truth = ground_truth(test_set);
  const FieldBatch* labels = train_set.outputs ? &*train_set.outputs : nullptr;
  const auto train_bcs = boundaries_from_masks(train_set.inputs, config.ghost);

  const auto log_row = [&](std::size_t epoch) {
    MetricRow row;
    row.epoch = epoch;
    row.train_loss = objective(model, train_set.inputs, labels);
    row.train_err = evaluate(model, train_set.inputs, train_truth).mean;
    row.test_err = evaluate(model, test_set.inputs, test_truth).mean;
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(row.train_loss) || !std::isfinite(row.train_err) ||
        !std::isfinite(row.test_err))
      throw DivergenceError("divergence: non-finite metric at epoch " + std::to_string(epoch));
    result.metrics.rows.push_back(row);
    if (on_eval) on_eval(row);
  };

  Rng shuffle_rng(derive_seed(config.seed, static_cast<std::uint64_t>(StreamTag::kShuffle)));
  Rng dropout_rng(derive_seed(config.seed, static_cast<std::uint64_t>(StreamTag::kDropout)));
  Adam adam(config.adam);
  std::vector<std::size_t> order(train_set.size());

  try {
    log_row(0);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle_rng.shuffle(order.begin(), order.end());
      for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
        const std::size_t last = std::min(order.size(), first + config.batch_size);
        const std::span<const std::size_t> idx(order.data() + first, last - first);

        const FieldBatch inputs = train_set.inputs.gather(idx);
        const std::optional<FieldBatch> truth =
            labels ? std::optional<FieldBatch>(labels->gather(idx)) : std::nullopt;
        const double loss = loss_and_gradient(model, inputs, truth ? &*truth : nullptr,
                                              gather_bcs(train_bcs, idx), Mode::kTrain,
                                              dropout_rng);
        if (!std::isfinite(loss))
          throw DivergenceError("divergence: non-finite loss at epoch " + std::to_string(epoch));
        adam.step(model.net.parameters());
      }
      model.info.epochs = epoch;
      if (epoch % config.eval_every == 0 || epoch == config.epochs) log_row(epoch);
    }
  } catch (const DivergenceError& e) {
    result.diverged = true;
    result.message = e.what();
  }
  return result;
}

}  // namespace dcrm
