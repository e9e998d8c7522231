#include "balsa/summary.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "balsa/csv.hpp"

namespace balsa {

std::string summary_row(const RunMeta& meta, const RunSummary& s) {
  std::string out;
  out += meta.scenario + ',' + meta.controller + ',' + meta.learner + ',' +
         std::to_string(meta.seed);
  for (const double v :
       {s.mean_err_0_60, s.mean_err_60_120, s.std_err, s.max_err,
        s.min_h_overall, s.pct_d2_pos, s.p50_ms, s.p99_ms}) {
    out += ',';
    append_number(out, v);
  }
  return out;
}

std::string run_filename(const RunMeta& meta) {
  return meta.scenario + "__" + meta.controller + "__" + meta.learner +
         "__seed" + std::to_string(meta.seed) + ".csv";
}

std::optional<RunMeta> parse_run_filename(const std::string& filename) {
  if (!filename.ends_with(".csv")) return std::nullopt;
  const std::string stem = filename.substr(0, filename.size() - 4);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = stem.find("__", start);
    if (pos == std::string::npos) {
      parts.push_back(stem.substr(start));
      break;
    }
    parts.push_back(stem.substr(start, pos - start));
    start = pos + 2;
  }
  if (parts.size() != 4 || !parts[3].starts_with("seed")) return std::nullopt;
  RunMeta meta;
  meta.scenario = parts[0];
  meta.controller = parts[1];
  meta.learner = parts[2];
  try {
    meta.seed = std::stoull(parts[3].substr(4));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return meta;
}

std::string summarize_directory(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (parse_run_filename(name)) files.push_back(name);
  }
  std::sort(files.begin(), files.end());

  std::string out(kSummaryHeader);
  out += '\n';
  for (const std::string& name : files) {
    const auto meta = parse_run_filename(name);
    std::ifstream is(std::filesystem::path(dir) / name);
    if (!is) throw Error("cannot open telemetry file: " + name);
    const std::vector<TelemetryRow> rows = RunRecord::rows_from_csv(is);
    out += summary_row(*meta, summarize_rows(rows));
    out += '\n';
  }
  return out;
}

}  // namespace balsa
