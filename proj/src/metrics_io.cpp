#include "dcrm/metrics_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dcrm/errors.hpp"

namespace dcrm {

namespace {

constexpr const char* kMetricsHeader = "epoch,train_loss,train_err,test_err,wall_seconds";

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot write " + path.string());
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(FormatError::Kind::kHeaderMismatch, "bad number '" + s + "' in " + where);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void write_metrics_csv(const RunMetrics& metrics, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kMetricsHeader << '\n';
  for (const auto& r : metrics.rows)
    out << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.train_err) << ','
        << format_double(r.test_err) << ',' << format_double(r.wall_seconds) << '\n';
  if (!out) throw FormatError(FormatError::Kind::kIo, "short write to " + path.string());
}

RunMetrics read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatError::Kind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw FormatError(FormatError::Kind::kHeaderMismatch,
                      "header mismatch: " + path.string() + " is not a metrics file");
  RunMetrics m;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      throw FormatError(FormatError::Kind::kHeaderMismatch, "bad row in " + path.string());
    MetricRow r;
    r.epoch = static_cast<std::size_t>(parse_double(cells[0], path.string()));
    r.train_loss = parse_double(cells[1], path.string());
    r.train_err = parse_double(cells[2], path.string());
    r.test_err = parse_double(cells[3], path.string());
    r.wall_seconds = parse_double(cells[4], path.string());
    m.rows.push_back(r);
  }
  return m;
}

std::vector<CurvePoint> curve_points(const std::string& method, const RunMetrics& metrics) {
  std::vector<CurvePoint> out;
  for (const auto& r : metrics.rows) {
    out.push_back({method, r.epoch, "train", r.train_err});
    out.push_back({method, r.epoch, "test", r.test_err});
  }
  return out;
}

void write_curves_csv(const std::vector<CurvePoint>& points, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "method,epoch,split,value\n";
  for (const auto& p : points)
    out << p.method << ',' << p.epoch << ',' << p.split << ',' << format_double(p.value) << '\n';
  if (!out) throw FormatError(FormatError::Kind::kIo, "short write to " + path.string());
}

}  // namespace dcrm
