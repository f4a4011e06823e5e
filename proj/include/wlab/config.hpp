#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wlab/asymptotics.hpp"
#include "wlab/diagnostics.hpp"
#include "wlab/reduction.hpp"

namespace wlab {

// One configuration document drives every subcommand. Identical config plus
// seed reproduces byte-identical outputs.
struct RunConfig {
  MetricFamily family;
  unsigned seed = 20240901;
  int jobs = 1;
  std::string out_dir;  // empty: ./out/<command>-<timestamp>/
  SolverConfig solver;
  OptimizerConfig optimizer;
  AsymptoticsConfig asymptotics;
  DiagnosticsConfig diagnostics;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
};

// CSV per RFC 4180 (CRLF rows); floats printed with %.17g.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();
  void row(const std::vector<std::string>& cells);
  static std::string num(double v);

 private:
  std::FILE* f_;
};

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

std::filesystem::path prepare_out_dir(const RunConfig& cfg, const std::string& command);

nlohmann::json reduced_point_json(const ReducedPoint& r);

}  // namespace wlab
