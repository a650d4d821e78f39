#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dcrm/trainer.hpp"

namespace dcrm {

/// Header `epoch,train_loss,train_err,test_err,wall_seconds`; values are
/// printed with 17 significant digits so they read back exactly.
void write_metrics_csv(const RunMetrics& metrics, const std::filesystem::path& path);
RunMetrics read_metrics_csv(const std::filesystem::path& path);

struct CurvePoint {
  std::string method;
  std::size_t epoch = 0;
  std::string split;  // "train" or "test"
  double value = 0.0;
};

/// Long-format rows (train_err and test_err) of one run.
std::vector<CurvePoint> curve_points(const std::string& method, const RunMetrics& metrics);
/// Header `method,epoch,split,value`.
void write_curves_csv(const std::vector<CurvePoint>& points, const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace dcrm
