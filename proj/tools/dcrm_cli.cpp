#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dcrm/checkpoint.hpp"
#include "dcrm/dataset_io.hpp"
#include "dcrm/errors.hpp"
#include "dcrm/manifest.hpp"
#include "dcrm/metrics_io.hpp"
#include "dcrm/problems.hpp"
#include "dcrm/random.hpp"
#include "dcrm/trainer.hpp"

namespace fs = std::filesystem;
using namespace dcrm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

// Stream tag separating the test split's sampling seed from the training one.
constexpr std::uint64_t kTestSeedTag = 17;

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

bool parse_switch(const std::string& v, const char* flag) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw ConfigError(std::string(flag) + " expects on or off, got '" + v + "'");
}

DirichletGhost parse_ghost(const std::string& v) {
  if (v == "linear") return DirichletGhost::kLinearExtrapolation;
  if (v == "value") return DirichletGhost::kBoundaryValue;
  throw ConfigError("--ghost expects linear or value, got '" + v + "'");
}

std::string ghost_name(DirichletGhost g) {
  return g == DirichletGhost::kLinearExtrapolation ? "linear" : "value";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(FormatError::Kind::kIo, "cannot create " + dir.string());
}

// --- gen-data -------------------------------------------------------------

struct GenOptions {
  std::string case_name = "1";
  std::size_t dof = 33;
  std::optional<std::size_t> train;
  std::optional<std::size_t> test;
  std::uint64_t seed = 0;
  std::string labels = "on";
  std::string out = ".";
};

int run_gen_data(const GenOptions& o) {
  const CaseDefinition def = case_definition(parse_case(o.case_name));
  const bool labels = parse_switch(o.labels, "--labels");
  const std::size_t n_train = o.train.value_or(def.train_count);
  const std::size_t n_test = o.test.value_or(def.test_count);
  if (n_train == 0 || n_test == 0) throw ConfigError("--train and --test must be positive");
  if (def.case_id == CaseId::kCase1 && (n_train != 1 || n_test != 1))
    throw ConfigError("case 1 is a single forward problem: --train and --test must be 1");
  const GridSpec grid(o.dof);

  const Dataset train = assemble_dataset(def, grid, n_train, o.seed, labels);
  const std::uint64_t test_seed =
      def.case_id == CaseId::kCase1 ? o.seed : derive_seed(o.seed, kTestSeedTag);
  const Dataset test = assemble_dataset(def, grid, n_test, test_seed, labels, train.norm_stats);

  const fs::path dir(o.out);
  ensure_dir(dir);
  write_dataset(train, dir / "train.bin");
  write_dataset(test, dir / "test.bin");

  Manifest m;
  m.set("command", "gen-data");
  m.set("version", version_string());
  m.set("created", timestamp());
  m.set("case", std::to_string(static_cast<unsigned>(def.case_id)));
  m.set("dof", std::to_string(o.dof));
  m.set("train", std::to_string(n_train));
  m.set("test", std::to_string(n_test));
  m.set("seed", std::to_string(o.seed));
  m.set("test_seed", std::to_string(test_seed));
  m.set("labels", o.labels);
  m.set("train_file", (dir / "train.bin").string());
  m.set("test_file", (dir / "test.bin").string());
  m.write(dir / "manifest.txt");
  std::cout << "wrote " << n_train << " training and " << n_test << " test samples to "
            << dir.string() << '\n';
  return 0;
}

// --- train ----------------------------------------------------------------

struct TrainOptions {
  std::string manifest;
  std::string method = "dcrm";
  std::string data;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  std::string out;
  double lr = 1e-4;
  std::optional<std::size_t> batch_size;
  std::size_t eval_every = 50;
  std::size_t depth = 4;
  std::size_t base_channels = 8;
  double dropout = 0.5;
  std::size_t dropout_blocks = 3;
  std::string quadrature = "trapezoid";
  std::string ghost = "linear";
  double source_sign = 1.0;
  std::string timing = "off";
};

// Values from a previous run's manifest; flags given explicitly still win.
void apply_manifest(TrainOptions& o, const CLI::App& cmd) {
  const Manifest m = Manifest::read(o.manifest);
  if (m.require("command") != "train") throw ConfigError(o.manifest + " is not a train manifest");
  const auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
  if (unset("--method")) o.method = m.require("method");
  if (unset("--data")) o.data = m.require("data");
  if (unset("--epochs")) o.epochs = std::stoull(m.require("epochs"));
  if (unset("--seed")) o.seed = std::stoull(m.require("seed"));
  if (unset("--out")) o.out = m.require("out");
  if (unset("--lr")) o.lr = std::stod(m.require("learning_rate"));
  if (unset("--batch-size")) o.batch_size = std::stoull(m.require("batch_size"));
  if (unset("--eval-every")) o.eval_every = std::stoull(m.require("eval_every"));
  if (unset("--depth")) o.depth = std::stoull(m.require("depth"));
  if (unset("--base-channels")) o.base_channels = std::stoull(m.require("base_channels"));
  if (unset("--dropout")) o.dropout = std::stod(m.require("dropout"));
  if (unset("--dropout-blocks")) o.dropout_blocks = std::stoull(m.require("dropout_blocks"));
  if (unset("--quadrature")) o.quadrature = m.require("quadrature");
  if (unset("--ghost")) o.ghost = m.require("ghost");
  if (unset("--source-sign")) o.source_sign = std::stod(m.require("source_sign"));
  if (unset("--timing")) o.timing = m.require("timing");
}

int run_train(TrainOptions o, const CLI::App& cmd) {
  if (!o.manifest.empty()) apply_manifest(o, cmd);
  if (o.data.empty()) throw ConfigError("--data is required");
  if (o.out.empty()) throw ConfigError("--out is required");
  const bool timing = parse_switch(o.timing, "--timing");
  const fs::path data(o.data);
  const Dataset train_set = read_dataset(data / "train.bin");
  const Dataset test_set = read_dataset(data / "test.bin");

  TrainConfig cfg;
  cfg.method = parse_method(o.method);
  if (cfg.method == Method::kCnn && !train_set.outputs)
    throw ConfigError("labels required for method cnn (dataset " + o.data + " has none)");
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size.value_or(case_definition(train_set.case_id).batch_size);
  cfg.adam.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.eval_every = o.eval_every;
  cfg.network = NetworkConfig::desk(train_set.inputs.side());
  cfg.network.depth = o.depth;
  cfg.network.base_channels = o.base_channels;
  cfg.network.dropout_p = o.dropout;
  cfg.network.dropout_blocks = o.dropout_blocks;
  cfg.quadrature = parse_quadrature(o.quadrature);
  cfg.ghost = parse_ghost(o.ghost);
  if (o.source_sign != 1.0 && o.source_sign != -1.0)
    throw ConfigError("--source-sign must be 1 or -1");
  cfg.source_sign = o.source_sign;

  const fs::path out(o.out);
  ensure_dir(out);
  const std::string started = timestamp();
  TrainResult result = train(cfg, train_set, test_set, [&](const MetricRow& r) {
    std::cerr << "epoch " << r.epoch << " loss " << format_double(r.train_loss) << " train_err "
              << format_double(r.train_err) << " test_err " << format_double(r.test_err) << '\n';
  });
  if (!timing)
    for (auto& r : result.metrics.rows) r.wall_seconds = 0.0;

  write_metrics_csv(result.metrics, out / "metrics.csv");
  write_checkpoint(result.model, out / "model.ckpt");

  Manifest m;
  m.set("command", "train");
  m.set("version", version_string());
  m.set("started", started);
  m.set("finished", timestamp());
  m.set("method", std::string(to_string(cfg.method)));
  m.set("data", o.data);
  m.set("train_file", (data / "train.bin").string());
  m.set("test_file", (data / "test.bin").string());
  m.set("epochs", std::to_string(cfg.epochs));
  m.set("seed", std::to_string(cfg.seed));
  m.set("out", o.out);
  m.set("learning_rate", format_double(cfg.adam.learning_rate));
  m.set("batch_size", std::to_string(cfg.batch_size));
  m.set("eval_every", std::to_string(cfg.eval_every));
  m.set("depth", std::to_string(cfg.network.depth));
  m.set("base_channels", std::to_string(cfg.network.base_channels));
  m.set("dropout", format_double(cfg.network.dropout_p));
  m.set("dropout_blocks", std::to_string(cfg.network.dropout_blocks));
  m.set("quadrature", std::string(to_string(cfg.quadrature)));
  m.set("ghost", ghost_name(cfg.ghost));
  m.set("source_sign", format_double(cfg.source_sign));
  m.set("timing", o.timing);
  m.set("checkpoint", (out / "model.ckpt").string());
  m.set("metrics", (out / "metrics.csv").string());
  m.set("status", result.diverged ? "diverged" : "completed");
  m.write(out / "manifest.txt");

  if (result.diverged) {
    std::cerr << "error: " << result.message << '\n';
    return kExitDivergence;
  }
  const MetricRow& last = result.metrics.rows.back();
  std::cout << "train_err=" << format_double(last.train_err)
            << " test_err=" << format_double(last.test_err) << '\n';
  return 0;
}

// --- eval -----------------------------------------------------------------

struct EvalOptions {
  std::string ckpt;
  std::string data;
  std::string split = "test";
  std::string out;
};

int run_eval(const EvalOptions& o) {
  if (o.split != "train" && o.split != "test") throw ConfigError("--split expects train or test");
  fs::path file(o.data);
  if (fs::is_directory(file)) file /= o.split + ".bin";
  const Dataset ds = read_dataset(file);
  Model model = read_checkpoint(o.ckpt);
  if (ds.inputs.side() != model.net.config().input_resolution)
    throw ConfigError("dataset DOF " + std::to_string(ds.inputs.side()) +
                      " does not match checkpoint resolution " +
                      std::to_string(model.net.config().input_resolution));
  const Evaluation ev = evaluate(model, ds);

  std::ostream* sink = &std::cout;
  std::ofstream file_out;
  if (!o.out.empty()) {
    file_out.open(o.out, std::ios::trunc);
    if (!file_out) throw FormatError(FormatError::Kind::kIo, "cannot write " + o.out);
    sink = &file_out;
  }
  *sink << "sample,e_abs_normalized\n";
  for (std::size_t i = 0; i < ev.per_sample.size(); ++i)
    *sink << i << ',' << format_double(ev.per_sample[i]) << '\n';
  if (!o.out.empty()) std::cout << o.split << "_err=" << format_double(ev.mean) << '\n';
  else std::cerr << o.split << "_err=" << format_double(ev.mean) << '\n';
  return 0;
}

// --- curves ---------------------------------------------------------------

struct CurvesOptions {
  std::vector<std::string> runs;
  std::vector<std::string> labels;
  std::string out;
};

std::string run_label(const fs::path& csv) {
  const fs::path manifest = csv.parent_path() / "manifest.txt";
  if (fs::exists(manifest)) {
    const Manifest m = Manifest::read(manifest);
    if (auto method = m.get("method")) return *method;
  }
  return csv.stem().string();
}

int run_curves(const CurvesOptions& o) {
  if (!o.labels.empty() && o.labels.size() != o.runs.size())
    throw ConfigError("--labels needs one entry per run");
  std::vector<CurvePoint> points;
  for (std::size_t i = 0; i < o.runs.size(); ++i) {
    const std::string label = o.labels.empty() ? run_label(o.runs[i]) : o.labels[i];
    const auto p = curve_points(label, read_metrics_csv(o.runs[i]));
    points.insert(points.end(), p.begin(), p.end());
  }
  write_curves_csv(points, o.out);
  std::cout << "wrote " << points.size() << " points to " << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep convolutional Ritz method: data generation, training and evaluation"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Sample a case and write train/test datasets");
  gen_cmd->add_option("--case", gen.case_name, "Case 1, 2 or 3")->required();
  gen_cmd->add_option("--dof", gen.dof, "Grid points per side")->check(CLI::Range(3, 4097));
  gen_cmd->add_option("--train", gen.train, "Training samples (default: case protocol)");
  gen_cmd->add_option("--test", gen.test, "Test samples (default: case protocol)");
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed");
  gen_cmd->add_option("--labels", gen.labels, "Attach finite-difference labels (on|off)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a network with cnn, cpinn or dcrm");
  train_cmd->add_option("--manifest", tr.manifest, "Rerun from a train manifest");
  train_cmd->add_option("--method", tr.method, "cnn, cpinn or dcrm");
  train_cmd->add_option("--data", tr.data, "Directory written by gen-data");
  train_cmd->add_option("--epochs", tr.epochs, "Training epochs");
  train_cmd->add_option("--seed", tr.seed, "Initialization, shuffling and dropout seed");
  train_cmd->add_option("--out", tr.out, "Output directory");
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate");
  train_cmd->add_option("--batch-size", tr.batch_size, "Minibatch size (default: case protocol)");
  train_cmd->add_option("--eval-every", tr.eval_every, "Epochs between metric rows");
  train_cmd->add_option("--depth", tr.depth, "Contracting/expanding blocks");
  train_cmd->add_option("--base-channels", tr.base_channels, "Width of the first layer");
  train_cmd->add_option("--dropout", tr.dropout, "Dropout probability");
  train_cmd->add_option("--dropout-blocks", tr.dropout_blocks, "Contracting blocks with dropout");
  train_cmd->add_option("--quadrature", tr.quadrature, "dcrm quadrature: trapezoid or simpson");
  train_cmd->add_option("--ghost", tr.ghost, "Dirichlet ghost values: linear or value");
  train_cmd->add_option("--source-sign", tr.source_sign, "+1 for laplace(u)=f, -1 for -laplace(u)=f");
  train_cmd->add_option("--timing", tr.timing, "Record wall-clock seconds (on|off, default off)");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Per-sample normalized error of a checkpoint");
  eval_cmd->add_option("--ckpt", ev.ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset file or gen-data directory")->required();
  eval_cmd->add_option("--split", ev.split, "Split to read from a directory (train|test)");
  eval_cmd->add_option("--out", ev.out, "CSV output file (default: stdout)");

  CurvesOptions cv;
  auto* curves_cmd = app.add_subcommand("curves", "Merge metrics files into long-format CSV");
  curves_cmd->add_option("--runs", cv.runs, "metrics.csv files")->required();
  curves_cmd->add_option("--labels", cv.labels, "Method label per run (default: from manifest)");
  curves_cmd->add_option("--out", cv.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_data(gen);
    if (*train_cmd) return run_train(tr, *train_cmd);
    if (*eval_cmd) return run_eval(ev);
    if (*curves_cmd) return run_curves(cv);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
