#include "balsa/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <random>
#include <sstream>

#include "balsa/csv.hpp"
#include "balsa/dataset.hpp"

namespace balsa {

namespace {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(
      q * static_cast<double>(values.size() - 1) + 0.5);
  std::nth_element(values.begin(), values.begin() + static_cast<long>(idx),
                   values.end());
  return values[idx];
}

}  // namespace

RunSummary summarize_rows(const std::vector<TelemetryRow>& rows) {
  RunSummary s;
  if (rows.empty()) return s;

  double sum0 = 0.0, sum1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
  double sum_all = 0.0, sum_sq = 0.0;
  s.max_err = 0.0;
  s.min_h_overall = std::numeric_limits<double>::infinity();
  std::size_t d2_pos = 0;
  std::vector<double> lat;
  lat.reserve(rows.size());
  for (const TelemetryRow& r : rows) {
    const double err = r.position_error();
    if (r.t < 60.0) {
      sum0 += err;
      ++n0;
    } else if (r.t < 120.0) {
      sum1 += err;
      ++n1;
    }
    sum_all += err;
    sum_sq += err * err;
    s.max_err = std::max(s.max_err, err);
    s.min_h_overall = std::min(s.min_h_overall, r.min_h);
    if (r.d2 > 1e-9) ++d2_pos;
    lat.push_back(r.step_ms);
  }
  const auto n = static_cast<double>(rows.size());
  s.mean_err_0_60 = n0 > 0 ? sum0 / static_cast<double>(n0)
                           : std::numeric_limits<double>::quiet_NaN();
  s.mean_err_60_120 = n1 > 0 ? sum1 / static_cast<double>(n1)
                             : std::numeric_limits<double>::quiet_NaN();
  const double mean_all = sum_all / n;
  s.std_err = std::sqrt(std::max(0.0, sum_sq / n - mean_all * mean_all));
  s.pct_d2_pos = 100.0 * static_cast<double>(d2_pos) / n;
  s.p50_ms = percentile(lat, 0.50);
  s.p99_ms = percentile(lat, 0.99);
  return s;
}

std::string RunRecord::to_csv() const {
  std::string out(kTelemetryHeader);
  out += '\n';
  for (const TelemetryRow& r : rows) {
    append_number(out, r.t);
    for (int i = 0; i < 4; ++i) {
      out += ',';
      append_number(out, r.z[i]);
    }
    for (int i = 0; i < 4; ++i) {
      out += ',';
      append_number(out, r.x_rm[i]);
    }
    for (const double v : {r.e_norm, r.lyapunov, r.d1, r.d2, r.min_h, r.u_c,
                           r.u_a, r.sigma1, r.sigma2}) {
      out += ',';
      append_number(out, v);
    }
    out += ',' + std::to_string(r.model_index);
    out += ',' + std::to_string(r.solver_status);
    out += ',';
    append_number(out, r.step_ms);
    out += '\n';
  }
  return out;
}

void RunRecord::write_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write telemetry file: " + path);
  os << to_csv();
}

std::vector<TelemetryRow> RunRecord::rows_from_csv(std::istream& is) {
  std::vector<TelemetryRow> rows;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> c = split_csv_line(line);
    if (c.size() != 21) throw Error("bad telemetry row: " + line);
    TelemetryRow r;
    r.t = std::stod(c[0]);
    for (int i = 0; i < 4; ++i) r.z[i] = std::stod(c[1 + i]);
    for (int i = 0; i < 4; ++i) r.x_rm[i] = std::stod(c[5 + i]);
    r.e_norm = std::stod(c[9]);
    r.lyapunov = std::stod(c[10]);
    r.d1 = std::stod(c[11]);
    r.d2 = std::stod(c[12]);
    r.min_h = std::stod(c[13]);
    r.u_c = std::stod(c[14]);
    r.u_a = std::stod(c[15]);
    r.sigma1 = std::stod(c[16]);
    r.sigma2 = std::stod(c[17]);
    r.model_index = std::stoi(c[18]);
    r.solver_status = std::stoi(c[19]);
    r.step_ms = std::stod(c[20]);
    rows.push_back(r);
  }
  return rows;
}

RunRecord run(const Scenario& scenario) {
  if (scenario.duration <= 0.0 || scenario.dt <= 0.0) {
    throw Error("scenario requires positive duration and dt");
  }

  const auto trajectory = scenario.reference.build();
  const std::vector<BarrierSpec> barriers = scenario.barriers.build();
  const TrackingController controller(scenario.controller, scenario.control);

  Plant plant;
  plant.sigma = scenario.plant.sigma * Matrix2d::Identity();
  plant.disturbance = scenario.plant.disturbance;

  std::mt19937_64 rng(scenario.seed);

  const bool learning = scenario.learner.kind != LearnerKind::kNone;
  Dataset dataset(scenario.learner.window);
  ModelBus bus(scenario.control.sigma0);

  GpHyper gp_hyper = scenario.learner.gp;
  gp_hyper.sigma_cap = scenario.control.sigma0;
  RffConfig blr_cfg = scenario.learner.blr;
  blr_cfg.seed = scenario.seed;
  blr_cfg.sigma_cap = scenario.control.sigma0;
  const auto fit = [&, gp_hyper, blr_cfg](std::vector<Sample> data) {
    return scenario.learner.kind == LearnerKind::kGp
               ? gp_fit(data, gp_hyper)
               : blr_fit(data, blr_cfg);
  };

  const auto num_steps =
      static_cast<std::size_t>(std::llround(scenario.duration / scenario.dt));

  RunRecord record;
  record.rows.reserve(num_steps);
  record.latency_ms.reserve(num_steps);

  CanonicalState z = scenario.initial_state();
  VehicleControl u_prev;

  std::future<GaussianBelief> pending;
  std::size_t pending_step = 0;
  int samples_since_fit = 0;
  long cal_within = 0;
  long cal_total = 0;

  for (std::size_t k = 0; k < num_steps; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;

    if (pending.valid() && k >= pending_step) {
      try {
        bus.publish(pending.get());
        record.publish_steps.push_back(static_cast<int>(k));
      } catch (const Error& err) {
        record.events.push_back("train_failed@" + std::to_string(k) + ": " +
                                err.what());
      }
      pending = {};
    }

    const GaussianBelief belief = bus.snapshot();
    const ReferencePoint ref = trajectory->at(t);
    const VectorXd x_query = learner_input(z, u_prev);

    const StepResult res =
        controller.step(z, x_query, ref, belief, barriers, plant.f_hat);
    if (!res.event.empty()) {
      record.events.push_back(res.event + "@" + std::to_string(k));
    }

    const CanonicalState z_next =
        plant.step(z, res.u, scenario.dt, rng);

    if (learning && k % static_cast<std::size_t>(std::max(
                            1, scenario.learner.sample_stride)) ==
                        0) {
      Sample sample = make_sample(z, z_next, res.u, u_prev, scenario.dt,
                                  plant.f_hat, t);
      if (belief.index() > 0) {
        const Vector2d resid =
            (sample.y - belief.mean(sample.x)).cwiseAbs();
        const Vector2d bound = 2.0 * belief.sigma(sample.x);
        cal_within += (resid[0] <= bound[0]) + (resid[1] <= bound[1]);
        cal_total += 2;
      }
      dataset.append(std::move(sample));
      ++samples_since_fit;
      if (t >= scenario.learner.warmup &&
          samples_since_fit >= scenario.learner.retrain_every &&
          !pending.valid()) {
        pending = std::async(std::launch::async, fit, dataset.snapshot());
        pending_step =
            k + static_cast<std::size_t>(
                    std::max(1, scenario.learner.publish_delay_steps));
        samples_since_fit = 0;
      }
    }

    const Vector2d delta =
        plant.disturbance ? true_disturbance(z) : Vector2d::Zero();
    record.prediction_error.push_back((belief.mean(x_query) - delta).norm());
    record.latency_ms.push_back(res.step_ms);

    TelemetryRow row;
    row.t = t;
    row.z = z.vec();
    row.x_rm = ref.x_rm;
    row.e_norm = res.e.norm();
    row.lyapunov = res.lyapunov;
    row.d1 = res.d1;
    row.d2 = res.d2;
    row.min_h = res.min_h;
    row.u_c = res.u.c;
    row.u_a = res.u.a;
    row.sigma1 = res.sigma[0];
    row.sigma2 = res.sigma[1];
    row.model_index = belief.index();
    row.solver_status = res.solver_status;
    row.step_ms = scenario.record_timing ? res.step_ms : 0.0;
    record.rows.push_back(row);

    z = z_next;
    u_prev = res.u;
  }

  if (pending.valid()) {
    pending.wait();  // join the trainer; result discarded at shutdown
  }

  if (cal_total > 0) {
    record.calibration_2sigma =
        static_cast<double>(cal_within) / static_cast<double>(cal_total);
  }

  record.summary = summarize_rows(record.rows);
  // Percentiles from wall-clock latencies even when the CSV column is
  // zeroed for byte-identical output.
  record.summary.p50_ms = percentile(record.latency_ms, 0.50);
  record.summary.p99_ms = percentile(record.latency_ms, 0.99);
  return record;
}

}  // namespace balsa
