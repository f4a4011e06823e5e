#include "wlab/config.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

// byte offset -> "line L, column C" for config error messages
std::string locate(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error at " + locate(text, e.byte) + ": " + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("family")) cfg.family = MetricFamily::from_json(j.at("family"));
    maybe(j, "seed", cfg.seed);
    maybe(j, "jobs", cfg.jobs);
    maybe(j, "out", cfg.out_dir);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      maybe(s, "lmax", cfg.solver.lmax);
      maybe(s, "tol", cfg.solver.tol);
      maybe(s, "max_iter", cfg.solver.max_iter);
      maybe(s, "delta", cfg.solver.delta);
      maybe(s, "fd_step", cfg.solver.fd_step);
      maybe(s, "geom_pad", cfg.solver.geom_pad);
    }
    cfg.optimizer.solver = cfg.solver;
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      maybe(o, "coarse_lmax", cfg.optimizer.coarse_lmax);
      maybe(o, "coarse_tol", cfg.optimizer.coarse_tol);
      maybe(o, "rho_count", cfg.optimizer.rho_count);
      maybe(o, "rho_min", cfg.optimizer.rho_min);
      maybe(o, "rho_max", cfg.optimizer.rho_max);
      maybe(o, "nm_max_eval", cfg.optimizer.nm_max_eval);
      maybe(o, "flat_spread", cfg.optimizer.flat_spread);
    }
    cfg.asymptotics.solver = cfg.solver;
    cfg.asymptotics.solver.delta = 0.04;
    if (j.contains("asymptotics")) {
      const auto& a = j.at("asymptotics");
      maybe(a, "delta", cfg.asymptotics.solver.delta);
      maybe(a, "lmax", cfg.asymptotics.solver.lmax);
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      maybe(d, "homothety_threshold", cfg.diagnostics.homothety_threshold);
      maybe(d, "coefficient_floor", cfg.diagnostics.coefficient_floor);
      maybe(d, "eps_probes", cfg.diagnostics.eps_probes);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (cfg.solver.lmax < 8 || cfg.solver.lmax > 48)
    throw ConfigError("config: solver.lmax must be in [8, 48]");
  if (!(cfg.solver.tol > 0) || !(cfg.solver.delta > 0))
    throw ConfigError("config: solver.tol and solver.delta must be positive");
  if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : f_(std::fopen(path.c_str(), "wb")) {
  if (!f_) throw ConfigError("cannot open output file " + path.string());
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    const std::string& c = cells[i];
    const bool quote = c.find_first_of(",\"\r\n") != std::string::npos;
    if (quote) {
      std::fputc('"', f_);
      for (char ch : c) {
        if (ch == '"') std::fputc('"', f_);
        std::fputc(ch, f_);
      }
      std::fputc('"', f_);
    } else {
      std::fwrite(c.data(), 1, c.size(), f_);
    }
    if (i + 1 < cells.size()) std::fputc(',', f_);
  }
  std::fputs("\r\n", f_);
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << j.dump(2) << "\n";
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg, const std::string& command) {
  std::filesystem::path dir;
  if (!cfg.out_dir.empty()) {
    dir = cfg.out_dir;
  } else {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", std::gmtime(&t));
    dir = std::filesystem::path("out") / (command + "-" + stamp);
  }
  std::filesystem::create_directories(dir);
  return dir;
}

nlohmann::json reduced_point_json(const ReducedPoint& r) {
  nlohmann::json j;
  j["family"] = r.family.to_json();
  j["epsilon"] = r.epsilon;
  j["p"] = {r.p[0], r.p[1], r.p[2], r.p[3]};
  j["rho"] = r.rho;
  j["phi"] = r.phi;
  j["aux_residual"] = r.aux_residual;
  j["grad_norm"] = r.grad_norm;
  j["kernel_coeffs"] = r.kernel_coeffs;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["residual_history"] = r.residual_history;
  j["lmax"] = r.w.grid() ? r.w.grid()->lmax() : 0;
  if (r.w.grid())
    j["w_coeffs"] = std::vector<double>(r.w.coeffs().data(),
                                        r.w.coeffs().data() + r.w.coeffs().size());
  return j;
}

}  // namespace wlab
