// Run configuration, pipelines and deterministic CSV/JSON emission.
// Config values are physical (scaled by hbar, mass, a); the pipelines convert once.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltunnel/analytic.hpp"
#include "ltunnel/core_model.hpp"

namespace ltunnel::io {

// Bad configuration; path names the offending key ("packet.L", "barrier", ...).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Mode { analytic, oracle, compare, figure1, validate, packet_info };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);  // throws ConfigError

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int n = 0;  // 0: pipeline default
};

struct OracleSettings {
  double dx = 0.01;
  double dt = 1e-3;
  double x_min = -60.0;
  double x_max = 50.0;
  std::vector<double> times;  // empty: pipeline default
};

struct RunConfig {
  Mode mode = Mode::figure1;
  PhysicalScales scales;
  double x0 = -20.0;
  double p0 = 10.0;
  double L = 20.0;
  std::optional<double> V, k0;  // exactly one
  std::optional<double> d, D;   // exactly one
  double K = 1.4;
  std::vector<double> times;  // empty: t_R + 2 sqrt(a) m / p0
  GridSpec grid;
  OracleSettings oracle;
  int workers = 1;
  std::string output = "ltunnel_out";

  // Dimensionless views.
  double X0() const;
  double P0() const;
  double V_dimless() const;  // may be 0 (free control run)
  double D_dimless() const;
  double k0_value() const;
  std::vector<double> times_dimless() const;
  double default_time() const;  // dimensionless t_R + 2/P0
  bool free_control() const { return V_dimless() == 0.0; }
  PacketSpec packet() const;
  Barrier barrier() const;  // throws for the free control
  Scenario scenario() const;
};

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
std::string echo_config(const RunConfig& cfg);  // normalized JSON, sorted keys

struct FrameRecord {
  double x;
  double t;
  double re;
  double im;
  double abs2;
  Region region;
  std::string source;
};
FrameRecord make_record(double x, double t, cplx psi, Region region, std::string source);
std::string format_number(double v);  // %.16e
std::string csv_header();
std::string format_csv(const std::vector<FrameRecord>& rows, const RunConfig& cfg);

// Parallel map over [0, n) on cfg.workers threads; deterministic results.
void parallel_for(int workers, std::size_t n, const std::function<void(std::size_t)>& body);

struct PipelineResult {
  int exit_code = 0;
  std::string summary_json;
  std::vector<std::string> files;
};

// All pipelines write <output>*.csv / <output>_summary.json and return the summary text.
PipelineResult run_analytic(const RunConfig& cfg);
PipelineResult run_oracle(const RunConfig& cfg);
PipelineResult run_compare(const RunConfig& cfg, bool force);
PipelineResult run_figure1(const RunConfig& cfg);
PipelineResult run_packet_info(const RunConfig& cfg);

struct ValidationRow {
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool pass;
};
std::vector<ValidationRow> validate_suite();
std::string format_validation(const std::vector<ValidationRow>& rows);
PipelineResult run_validate(const RunConfig& cfg);

PipelineResult run(const RunConfig& cfg, bool force);

// Compare-report numbers, shared with the acceptance suite.
struct CompareReport {
  double P_right_oracle;
  double transmitted_factor_sq;
  double transmission_ratio;
  double inferred_delay;
  double hartmann_time;
  double delay_ratio;
  double leakage_fraction;
  double grid_delta_P_right;
  double grid_delta_lag;
  double lag;
  double lag_refined;
  bool below_noise_floor;
};
CompareReport compare_scenario(const RunConfig& cfg);

}  // namespace ltunnel::io
