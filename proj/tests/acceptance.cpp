// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Scenario parameters mirror the files under scenarios/.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <random>
#include <thread>
#include <vector>

#include "balsa/csv.hpp"
#include "balsa/runner.hpp"
#include "oracles.hpp"
#include "sim_helpers.hpp"

using namespace balsa;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Scenario table1_scenario() {
  Scenario s;
  s.name = "figure_eight_disturbance";
  s.duration = 120.0;
  s.dt = 0.02;
  s.record_timing = false;
  s.plant.sigma = 0.05;
  s.plant.disturbance = true;
  s.controller = ControllerKind::kBalsa;
  s.learner.warmup = 10.0;
  return s;
}

Scenario obstacle_scenario() {
  Scenario s;
  s.name = "obstacle_course";
  s.duration = 24.0;
  s.dt = 0.02;
  s.record_timing = false;
  s.plant.sigma = 0.03;
  s.plant.disturbance = true;
  s.barriers.obstacles.push_back({Vector2d(4.0, 0.0), 0.6});
  s.barriers.gamma = 5.0;
  s.barriers.gamma_p = 2.0;
  s.control.sigma_robust = 2.5;
  s.learner.kind = LearnerKind::kGp;
  s.learner.warmup = 5.0;
  return s;
}

// Seeds [seed0, seed0 + count) on two workers; per-run results are
// independent of scheduling.
std::vector<RunRecord> run_seeds(const Scenario& base, std::uint64_t seed0,
                                 int count) {
  std::vector<RunRecord> records(count);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < 2; ++w) {
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < count) {
        Scenario s = base;
        s.seed = seed0 + static_cast<std::uint64_t>(i);
        records[i] = run(s);
      }
    });
  }
  for (auto& t : pool) t.join();
  return records;
}

double mean_position_error(const RunRecord& r) {
  double sum = 0.0;
  for (const TelemetryRow& row : r.rows) sum += row.position_error();
  return sum / static_cast<double>(r.rows.size());
}

void criterion_1_learning_benefit() {
  const int seeds = 5;
  double gp_m2 = 0.0, none_m2 = 0.0, worst_runtime = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    Scenario s = table1_scenario();
    s.seed = seed;

    s.learner.kind = LearnerKind::kGp;
    auto t0 = std::chrono::steady_clock::now();
    gp_m2 += run(s).summary.mean_err_60_120;
    worst_runtime = std::max(
        worst_runtime,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());

    s.learner.kind = LearnerKind::kNone;
    t0 = std::chrono::steady_clock::now();
    none_m2 += run(s).summary.mean_err_60_120;
    worst_runtime = std::max(
        worst_runtime,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());
  }
  gp_m2 /= seeds;
  none_m2 /= seeds;
  const double ratio = gp_m2 / none_m2;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "gp minute-2 err %.4f, no-learn %.4f, ratio %.3f <= 0.35; "
                "worst runtime %.1f s <= 120 s",
                gp_m2, none_m2, ratio, worst_runtime);
  report(1, "learning benefit", ratio <= 0.35 && worst_runtime <= 120.0,
         detail);
}

// Shared by criteria 2 and 3.
struct SafetyResults {
  double pd_min_h = 0.0;
  double ad_min_h = 0.0;
  double balsa_min_h = 0.0;
  double rob_min_h = 0.0;
  double balsa_err = 0.0;
  double rob_err = 0.0;
};

SafetyResults run_safety_experiments() {
  SafetyResults out;

  Scenario pd = obstacle_scenario();
  pd.controller = ControllerKind::kPd;
  pd.learner.kind = LearnerKind::kNone;
  out.pd_min_h = run(pd).summary.min_h_overall;

  Scenario ad = obstacle_scenario();
  ad.controller = ControllerKind::kAd;
  out.ad_min_h = run(ad).summary.min_h_overall;

  Scenario balsa = obstacle_scenario();
  balsa.controller = ControllerKind::kBalsa;
  const std::vector<RunRecord> balsa_runs = run_seeds(balsa, 0, 100);

  Scenario rob = obstacle_scenario();
  rob.controller = ControllerKind::kRob;
  rob.learner.kind = LearnerKind::kNone;
  const std::vector<RunRecord> rob_runs = run_seeds(rob, 0, 100);

  out.balsa_min_h = 1e9;
  out.rob_min_h = 1e9;
  for (int i = 0; i < 100; ++i) {
    out.balsa_min_h =
        std::min(out.balsa_min_h, balsa_runs[i].summary.min_h_overall);
    out.rob_min_h = std::min(out.rob_min_h, rob_runs[i].summary.min_h_overall);
    out.balsa_err += mean_position_error(balsa_runs[i]);
    out.rob_err += mean_position_error(rob_runs[i]);
  }
  out.balsa_err /= 100.0;
  out.rob_err /= 100.0;
  return out;
}

void criterion_2_safety_ordering(const SafetyResults& r) {
  const bool pass = r.pd_min_h < 0.0 && r.ad_min_h < 0.0 &&
                    r.balsa_min_h >= -0.02 && r.rob_min_h >= -0.02;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "min h: pd %.3f < 0, ad %.3f < 0; over 100 rollouts balsa "
                "%.3f >= -0.02, rob %.3f >= -0.02",
                r.pd_min_h, r.ad_min_h, r.balsa_min_h, r.rob_min_h);
  report(2, "safety ordering", pass, detail);
}

void criterion_3_conservatism(const SafetyResults& r) {
  const double ratio = r.rob_err / r.balsa_err;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "mean tracking error rob %.3f vs balsa %.3f, ratio %.2f >= 1.2",
                r.rob_err, r.balsa_err, ratio);
  report(3, "conservatism ordering", ratio >= 1.2, detail);
}

void criterion_4_clf_surrogate() {
  ControllerConfig config;
  const TrackingController ctrl(ControllerKind::kBalsa, config);
  const FigureEight traj(12.0, 4.0, 2.0);
  Plant plant;
  plant.disturbance = true;  // perfectly cancelled by the oracle belief

  CanonicalState z0 = CanonicalState::from_vec(traj.at(0.0).x_rm);
  z0.z1 += 1.0;
  z0.z2 -= 0.5;

  const double dt = 2.5e-4;
  const auto result = simrig::run_mini_loop(
      ctrl, plant, traj, simrig::perfect_belief(0.0), {}, z0, dt, 60.0);

  double worst_increase = 0.0;
  for (std::size_t k = 1; k < result.lyapunov.size(); ++k) {
    worst_increase = std::max(
        worst_increase, result.lyapunov[k] - result.lyapunov[k - 1]);
  }
  const double final_err = result.errors.back().norm();
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "max per-step V increase %.2e <= 1e-6, ||e(60 s)|| %.2e < 1e-3",
                worst_increase, final_err);
  report(4, "stochastic CLF surrogate", worst_increase <= 1e-6 &&
                                            final_err < 1e-3,
         detail);
}

void criterion_5_cbf_surrogate() {
  Scenario s = obstacle_scenario();
  s.controller = ControllerKind::kBalsa;
  const std::vector<RunRecord> runs = run_seeds(s, 100, 100);
  double min_h = 1e9;
  int safe = 0;
  for (const RunRecord& r : runs) {
    min_h = std::min(min_h, r.summary.min_h_overall);
    if (r.summary.min_h_overall >= -0.02) ++safe;
  }
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "%d/100 rollouts keep h >= -0.02 at every step (min %.3f)",
                safe, min_h);
  report(5, "stochastic CBF surrogate", safe == 100, detail);
}

void criterion_6_numerical_kernels() {
  bool pass = true;
  std::string detail;

  // Lyapunov residuals on 100 random Hurwitz systems.
  {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Matrix4d A;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) A(i, j) = normal(rng);
      }
      A -= (A.eigenvalues().real().maxCoeff() + 0.5) * Matrix4d::Identity();
      Matrix4d Q;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) Q(i, j) = normal(rng);
      }
      Q = (Q * Q.transpose() + 0.1 * Matrix4d::Identity()).eval();
      const Matrix4d P = solve_lyapunov(A, Q);
      worst = std::max(worst,
                       (A.transpose() * P + P * A + Q).norm());
    }
    pass = pass && worst < 1e-10;
    detail += "lyapunov residual " + format_number(worst) + " < 1e-10";
  }

  // Barrier derivative agreement on 1000 safe states.
  {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> radius(1.0, 8.0);
    std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    const BarrierSpec spec =
        BarrierSpec::make_obstacle({Vector2d(0.3, -0.4), 0.7}, 1.5, 1.0);
    double worst_grad = 0.0, worst_hess = 0.0;
    int states = 0;
    while (states < 1000) {
      const double rho = radius(rng);
      const double phi = angle(rng);
      CanonicalState z{spec.obstacle.center[0] + rho * std::cos(phi),
                       spec.obstacle.center[1] + rho * std::sin(phi),
                       vel(rng), vel(rng)};
      const double h = h_obstacle(z, spec.obstacle);
      if (spec.gamma_p * h + hdot_obstacle(z, spec.obstacle) < 0.2) continue;
      ++states;
      const Vector4d grad = barrier_gradient(z, spec);
      const Eigen::VectorXd grad_fd = oracles::fd_gradient(
          [&](const Eigen::VectorXd& x) {
            return barrier_value(CanonicalState{x[0], x[1], x[2], x[3]},
                                 spec);
          },
          z.vec(), 1e-6);
      worst_grad = std::max(
          worst_grad, (grad - grad_fd).norm() / std::max(1.0, grad.norm()));
      const Matrix4d hess = barrier_hessian(z, spec);
      const Eigen::MatrixXd hess_fd = oracles::fd_jacobian(
          [&](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(barrier_gradient(
                CanonicalState{x[0], x[1], x[2], x[3]}, spec));
          },
          z.vec(), 1e-6);
      worst_hess = std::max(
          worst_hess, (hess - hess_fd).norm() / std::max(1.0, hess.norm()));
    }
    pass = pass && worst_grad < 1e-5 && worst_hess < 1e-4;
    detail += "; dB/dx rel err " + format_number(worst_grad) +
              " < 1e-5, d2B/dx2 " + format_number(worst_hess) + " < 1e-4";
  }

  // GP posterior vs dense-inverse oracle on 50-point datasets.
  {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<Sample> data(50);
      for (Sample& s : data) {
        s.x.resize(4);
        for (int d = 0; d < 4; ++d) s.x[d] = normal(rng);
        s.y = Vector2d(normal(rng), normal(rng));
      }
      GpHyper hyper;
      hyper.sigma_cap = 100.0;
      const GaussianBelief belief = gp_fit(data, hyper);

      Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
      for (const Sample& s : data) mean += s.x;
      mean /= 50.0;
      Eigen::VectorXd var = Eigen::VectorXd::Zero(4);
      for (const Sample& s : data) var += (s.x - mean).cwiseAbs2();
      var /= 50.0;
      const Eigen::VectorXd inv_std =
          var.cwiseSqrt().cwiseMax(1e-8).cwiseInverse();

      oracles::DenseGp oracle;
      oracle.X.resize(50, 4);
      oracle.y.resize(50);
      oracle.lengthscale = hyper.lengthscale;
      oracle.signal = hyper.signal;
      oracle.noise = hyper.noise;
      for (int i = 0; i < 50; ++i) {
        oracle.X.row(i) =
            ((data[i].x - mean).cwiseProduct(inv_std)).transpose();
      }
      for (int q = 0; q < 10; ++q) {
        Eigen::VectorXd xq(4);
        for (int d = 0; d < 4; ++d) xq[d] = normal(rng);
        const Eigen::VectorXd xs = (xq - mean).cwiseProduct(inv_std);
        for (int dim = 0; dim < 2; ++dim) {
          for (int i = 0; i < 50; ++i) oracle.y[i] = data[i].y[dim];
          const auto [m, v] = oracle.predict(xs);
          worst = std::max(worst, std::abs(belief.mean(xq)[dim] - m));
          worst =
              std::max(worst, std::abs(belief.sigma(xq)[dim] - std::sqrt(v)));
        }
      }
    }
    pass = pass && worst < 1e-8;
    detail += "; gp vs dense oracle " + format_number(worst) + " < 1e-8";
  }

  // QP objective vs independent oracle on 1000 random instances.
  {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> positive(0.1, 10.0);
    std::uniform_int_distribution<int> num_cbf(0, 6);
    const AdmmQpSolver solver;
    double worst_obj = 0.0, worst_kkt = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      ClfRow clf;
      clf.psi0 = normal(rng);
      clf.psi1 = Vector2d(normal(rng), normal(rng));
      std::vector<CbfRow> cbf(num_cbf(rng));
      for (CbfRow& row : cbf) {
        row.phi0 = normal(rng);
        row.phi1 = Vector2d(normal(rng), normal(rng));
      }
      const CanonicalState z =
          bicycle_to_canonical(0, 0, normal(rng), positive(rng));
      QpWeights weights;
      weights.p1 = positive(rng);
      weights.p2 = positive(rng);
      const QpProblem p = assemble(
          clf, cbf,
          control_rows(z, Vector2d(normal(rng), normal(rng)),
                       Vector2d::Zero(), {}),
          weights);
      const QpSolution sol = solver.solve(p);
      if (sol.status != QpStatus::kOptimal) {
        pass = false;
        continue;
      }
      worst_kkt = std::max({worst_kkt, sol.kkt.stationarity, sol.kkt.primal,
                            sol.kkt.complementarity});
      const Eigen::VectorXd x_oracle =
          oracles::dual_fista_qp(p.P, p.q, p.A, p.ub);
      const double f_sol = oracles::qp_objective(p.P, p.q, sol.x);
      double f_oracle = oracles::qp_objective(p.P, p.q, x_oracle);
      double rel = std::abs(f_sol - f_oracle) /
                   std::max(1.0, std::abs(f_oracle));
      if (rel > 5e-7) {
        // The first-order oracle occasionally stalls on degenerate duals;
        // escalate to the exact active-set enumeration oracle.
        f_oracle = oracles::qp_objective(
            p.P, p.q, oracles::enumerate_qp(p.P, p.q, p.A, p.ub));
        rel = std::abs(f_sol - f_oracle) / std::max(1.0, std::abs(f_oracle));
      }
      worst_obj = std::max(worst_obj, rel);
    }
    pass = pass && worst_obj < 1e-6 && worst_kkt < 1e-6;
    detail += "; qp vs oracle rel " + format_number(worst_obj) +
              " < 1e-6, kkt " + format_number(worst_kkt) + " < 1e-6";
  }

  report(6, "numerical kernels", pass, detail);
}

void criterion_7_latency() {
  Scenario s;
  s.name = "latency";
  s.duration = 20.0;
  s.dt = 0.02;
  s.plant.sigma = 0.03;
  s.plant.disturbance = true;
  s.controller = ControllerKind::kBalsa;
  s.learner.kind = LearnerKind::kGp;
  s.learner.warmup = 5.0;
  s.control.cull_radius = 50.0;
  s.barriers.gamma = 5.0;
  s.barriers.gamma_p = 2.0;
  // Ring of obstacles around the course: 100 active barrier rows per step.
  for (int i = 0; i < 100; ++i) {
    const double phi = 2.0 * 3.14159265358979324 * i / 100.0;
    s.barriers.obstacles.push_back(
        {Vector2d(7.0 * std::cos(phi), 7.0 * std::sin(phi)), 0.3});
  }

  const RunRecord record = run(s);
  std::vector<double> lat = record.latency_ms;
  std::sort(lat.begin(), lat.end());
  const double p50 = lat[lat.size() / 2];
  const double p99 = lat[static_cast<std::size_t>(0.99 * (lat.size() - 1))];
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "100 barriers: p50 %.3f ms < 4, p99 %.3f ms < 10 "
                "(min h %.3f stayed valid)",
                p50, p99, record.summary.min_h_overall);
  report(7, "control-step latency", p50 < 4.0 && p99 < 10.0, detail);
}

void criterion_8_determinism() {
  Scenario s = obstacle_scenario();
  s.controller = ControllerKind::kBalsa;
  s.seed = 7;
  const std::string a = run(s).to_csv();
  const std::string b = run(s).to_csv();
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "telemetry CSV identical across repeated runs (%zu bytes)",
                a.size());
  report(8, "determinism", !a.empty() && a == b, detail);
}

}  // namespace

int main() {
  criterion_1_learning_benefit();
  const SafetyResults safety = run_safety_experiments();
  criterion_2_safety_ordering(safety);
  criterion_3_conservatism(safety);
  criterion_4_clf_surrogate();
  criterion_5_cbf_surrogate();
  criterion_6_numerical_kernels();
  criterion_7_latency();
  criterion_8_determinism();

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
