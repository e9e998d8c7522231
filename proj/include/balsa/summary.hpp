#pragma once

#include <optional>
#include <string>

#include "balsa/runner.hpp"

namespace balsa {

struct RunMeta {
  std::string scenario;
  std::string controller;
  std::string learner;
  std::uint64_t seed = 0;
};

inline constexpr const char* kSummaryHeader =
    "scenario,controller,learner,seed,mean_err_0_60,mean_err_60_120,"
    "std_err,max_err,min_h_overall,pct_d2_pos,p50_ms,p99_ms";

std::string summary_row(const RunMeta& meta, const RunSummary& summary);

// Telemetry file naming convention used by the CLI:
//   <scenario>__<controller>__<learner>__seed<N>.csv
std::string run_filename(const RunMeta& meta);
std::optional<RunMeta> parse_run_filename(const std::string& filename);

// Reads every telemetry CSV in a directory (by the naming convention) and
// emits one summary row per run, sorted by filename.
std::string summarize_directory(const std::string& dir);

}  // namespace balsa
