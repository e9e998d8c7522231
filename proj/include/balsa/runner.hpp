#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "balsa/scenario.hpp"

namespace balsa {

// One control step, in the fixed telemetry CSV column order.
struct TelemetryRow {
  double t = 0.0;
  Vector4d z = Vector4d::Zero();
  Vector4d x_rm = Vector4d::Zero();
  double e_norm = 0.0;
  double lyapunov = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double min_h = 0.0;
  double u_c = 0.0;
  double u_a = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  int model_index = 0;
  int solver_status = 0;
  double step_ms = 0.0;

  double position_error() const {
    return (z.head<2>() - x_rm.head<2>()).norm();
  }
};

struct RunSummary {
  double mean_err_0_60 = 0.0;
  double mean_err_60_120 = 0.0;
  double std_err = 0.0;
  double max_err = 0.0;
  double min_h_overall = 0.0;
  double pct_d2_pos = 0.0;
  double p50_ms = 0.0;
  double p99_ms = 0.0;
};

struct RunRecord {
  std::vector<TelemetryRow> rows;
  RunSummary summary;

  // Diagnostics kept out of the fixed CSV schema.
  std::vector<double> latency_ms;         // always wall-clock measured
  std::vector<double> prediction_error;   // ||m_i(x_t) - delta(z_t)||
  std::vector<int> publish_steps;
  std::vector<std::string> events;
  // Fraction of per-axis sample residuals within 2 sigma_i of the published
  // mean (after the first publication); reported, never guaranteed.
  double calibration_2sigma = std::numeric_limits<double>::quiet_NaN();

  std::string to_csv() const;
  void write_csv(const std::string& path) const;
  static std::vector<TelemetryRow> rows_from_csv(std::istream& is);
};

inline constexpr const char* kTelemetryHeader =
    "t,z1,z2,z3,z4,xrm1,xrm2,xrm3,xrm4,e_norm,V,d1,d2,min_h,u_c,u_a,"
    "sigma1,sigma2,model_index,solver_status,step_ms";

// Summary statistics of a row series (same numbers whether computed from a
// live run or re-read from its CSV).
RunSummary summarize_rows(const std::vector<TelemetryRow>& rows);

// Execute a scenario: reference generation, per-step control, plant
// stepping, sample collection, and pipelined model training.  Training runs
// on a worker thread; publications land at a fixed step offset so results
// are deterministic given the scenario and seed.
RunRecord run(const Scenario& scenario);

}  // namespace balsa
