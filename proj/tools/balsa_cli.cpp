// Command-line front end: run scenarios, sweep controller/learner grids,
// and summarize telemetry directories.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "balsa/runner.hpp"
#include "balsa/summary.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

balsa::RunMeta meta_for(const balsa::Scenario& s) {
  return {s.name, balsa::to_string(s.controller),
          balsa::to_string(s.learner.kind), s.seed};
}

int run_one(const balsa::Scenario& scenario, const std::string& out_dir,
            bool quiet) {
  const balsa::RunRecord record = balsa::run(scenario);
  const balsa::RunMeta meta = meta_for(scenario);
  std::filesystem::create_directories(out_dir);
  const auto path =
      std::filesystem::path(out_dir) / balsa::run_filename(meta);
  record.write_csv(path.string());
  if (!quiet) {
    std::cout << balsa::kSummaryHeader << '\n'
              << balsa::summary_row(meta, record.summary) << '\n';
    if (!std::isnan(record.calibration_2sigma)) {
      std::cout << "# residuals within 2 sigma: " << record.calibration_2sigma
                << '\n';
    }
    for (const std::string& event : record.events) {
      std::cout << "# event: " << event << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic CLF/CBF-QP adaptive tracking experiments"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "runs";
  std::string controller_override;
  std::string learner_override;
  std::int64_t seed_override = -1;
  double duration_override = -1.0;
  double dt_override = -1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--duration", duration_override, "override duration [s]");
    cmd->add_option("--dt", dt_override, "override time step [s]");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run one scenario");
  add_common(cmd_run);
  cmd_run->add_option("--controller", controller_override,
                      "pd|ad|qp|rob|balsa");
  cmd_run->add_option("--learner", learner_override, "none|gp|blr");
  cmd_run->add_option("--seed", seed_override, "random seed");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run a controller x learner x seed grid");
  add_common(cmd_sweep);
  std::string controllers = "pd,ad,qp,rob,balsa";
  std::string learners = "none";
  int num_seeds = 1;
  cmd_sweep->add_option("--controllers", controllers, "comma-separated kinds");
  cmd_sweep->add_option("--learners", learners, "comma-separated learners");
  cmd_sweep->add_option("--seeds", num_seeds, "number of seeds (0..N-1)");

  CLI::App* cmd_sum =
      app.add_subcommand("summarize", "aggregate a directory of runs");
  std::string sum_dir;
  std::string sum_out;
  cmd_sum->add_option("dir", sum_dir, "directory of telemetry CSVs")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_sum->add_option("--out", sum_out, "summary CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      balsa::Scenario scenario = balsa::load_scenario(scenario_path);
      if (!controller_override.empty()) {
        scenario.controller = balsa::parse_controller_kind(controller_override);
      }
      if (!learner_override.empty()) {
        scenario.learner.kind = balsa::parse_learner_kind(learner_override);
      }
      if (seed_override >= 0) {
        scenario.seed = static_cast<std::uint64_t>(seed_override);
      }
      if (duration_override > 0.0) scenario.duration = duration_override;
      if (dt_override > 0.0) scenario.dt = dt_override;
      return run_one(scenario, out_dir, false);
    }

    if (cmd_sweep->parsed()) {
      balsa::Scenario base = balsa::load_scenario(scenario_path);
      if (duration_override > 0.0) base.duration = duration_override;
      if (dt_override > 0.0) base.dt = dt_override;
      for (const std::string& ctrl : split_list(controllers)) {
        for (const std::string& lrn : split_list(learners)) {
          for (int seed = 0; seed < num_seeds; ++seed) {
            balsa::Scenario scenario = base;
            scenario.controller = balsa::parse_controller_kind(ctrl);
            scenario.learner.kind = balsa::parse_learner_kind(lrn);
            scenario.seed = static_cast<std::uint64_t>(seed);
            std::cout << "running " << ctrl << "/" << lrn << " seed " << seed
                      << "...\n";
            run_one(scenario, out_dir, true);
          }
        }
      }
      std::cout << balsa::summarize_directory(out_dir);
      return 0;
    }

    const std::string table = balsa::summarize_directory(sum_dir);
    if (sum_out.empty()) {
      std::cout << table;
    } else {
      std::ofstream os(sum_out, std::ios::binary);
      os << table;
    }
    return 0;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
