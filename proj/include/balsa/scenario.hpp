#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "balsa/blr.hpp"
#include "balsa/cbf.hpp"
#include "balsa/controller.hpp"
#include "balsa/gp.hpp"
#include "balsa/reference.hpp"

namespace balsa {

enum class LearnerKind { kNone, kGp, kBlr };

std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& name);

struct ReferenceSpec {
  enum class Kind { kFigureEight, kWaypoints } kind = Kind::kFigureEight;
  // figure-eight
  double period = 12.0;
  double size_x = 4.0;
  double size_y = 2.0;
  // waypoints
  std::vector<Vector2d> points;
  double speed = 2.0;

  std::unique_ptr<ReferenceTrajectory> build() const;
};

struct PlantSpec {
  double sigma = 0.0;        // plant diffusion, Sigma = sigma * I
  bool disturbance = false;  // inject the true model error
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kNone;
  int retrain_every = 40;        // new samples per retrain
  double warmup = 10.0;          // seconds before the first publication
  int publish_delay_steps = 5;   // training latency in control steps
  std::size_t window = 500;      // dataset capacity (5000 for blr)
  // Append every n-th control step to the dataset so the sliding window
  // spans several reference periods at 50 Hz control rates.
  int sample_stride = 3;
  GpHyper gp;
  RffConfig blr;
};

struct BarrierSetup {
  std::vector<Obstacle> obstacles;
  double gamma_p = 1.0;
  double gamma = 1.0;
  double v_max = 0.0;  // <= 0 disables
  double v_min = 0.0;  // <= 0 disables

  std::vector<BarrierSpec> build() const;
};

// Full experiment description; deterministic given (scenario, seed).
struct Scenario {
  std::string name = "scenario";
  double duration = 120.0;
  double dt = 0.02;
  std::uint64_t seed = 0;
  // When false the step_ms telemetry column is zeroed so repeated runs
  // produce byte-identical files; latencies stay available in memory.
  bool record_timing = true;
  ReferenceSpec reference;
  PlantSpec plant;
  ControllerKind controller = ControllerKind::kBalsa;
  ControllerConfig control;
  LearnerSpec learner;
  BarrierSetup barriers;
  // Start pose (px, py, theta, v); defaults to the reference at t = 0.
  std::optional<Vector4d> start;

  CanonicalState initial_state() const;
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace balsa
