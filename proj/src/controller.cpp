#include "balsa/controller.hpp"

#include <chrono>

namespace balsa {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kPd:
      return "pd";
    case ControllerKind::kAd:
      return "ad";
    case ControllerKind::kQp:
      return "qp";
    case ControllerKind::kRob:
      return "rob";
    case ControllerKind::kBalsa:
      return "balsa";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(const std::string& name) {
  if (name == "pd") return ControllerKind::kPd;
  if (name == "ad") return ControllerKind::kAd;
  if (name == "qp") return ControllerKind::kQp;
  if (name == "rob") return ControllerKind::kRob;
  if (name == "balsa") return ControllerKind::kBalsa;
  throw Error("unknown controller kind: " + name);
}

TrackingController::TrackingController(ControllerKind kind,
                                       const ControllerConfig& config)
    : kind_(kind),
      config_(config),
      kp_(config.kp * Matrix2d::Identity()),
      kd_(config.kd * Matrix2d::Identity()),
      cert_(LyapunovCertificate::make(kp_, kd_, config.Q, config.epsilon)),
      solver_(config.qp) {}

PseudoControl TrackingController::pd_term(const Vector4d& e) const {
  return -kp_ * e.head<2>() - kd_ * e.tail<2>();
}

StepResult TrackingController::step(const CanonicalState& z,
                                    const VectorXd& x_query,
                                    const ReferencePoint& ref,
                                    const GaussianBelief& belief,
                                    const std::vector<BarrierSpec>& barriers,
                                    const DriftModel& f_hat) const {
  const auto t0 = std::chrono::steady_clock::now();
  StepResult out;

  out.e = z.vec() - ref.x_rm;
  out.lyapunov = cert_.value(out.e);

  const PseudoControl mu_pd = pd_term(out.e);
  const PseudoControl mu_ad =
      uses_model() ? PseudoControl(belief.mean(x_query)) : PseudoControl::Zero();
  const PseudoControl mu_d = ref.mu_rm + mu_pd - mu_ad;

  for (const BarrierSpec& spec : barriers) {
    out.min_h = std::min(out.min_h, barrier_h(z, spec));
  }

  Vector2d sigma_diag;
  switch (kind_) {
    case ControllerKind::kQp:
      sigma_diag = Vector2d::Constant(config_.sigma0);
      break;
    case ControllerKind::kRob:
      sigma_diag = Vector2d::Constant(config_.sigma_robust);
      break;
    default:
      sigma_diag = belief.sigma(x_query);
      break;
  }
  out.sigma = sigma_diag;

  PseudoControl mu_qp = PseudoControl::Zero();
  bool brake = false;
  if (uses_qp()) {
    const DiffusionMatrix sigma = sigma_diag.asDiagonal();
    try {
      const ClfRow clf = clf_row(out.e, cert_, sigma);
      std::vector<CbfRow> cbf_rows;
      cbf_rows.reserve(barriers.size());
      for (const BarrierSpec& spec : barriers) {
        if (barrier_h(z, spec) > config_.cull_radius) continue;
        cbf_rows.push_back(cbf_row(z, spec, mu_d, sigma));
      }
      const Vector2d f_hat_value = eval_drift(f_hat, z);
      const QpProblem problem =
          assemble(clf, cbf_rows,
                   control_rows(z, mu_d, f_hat_value, config_.limits),
                   config_.weights);
      const QpSolution sol = solver_.solve(problem);
      switch (sol.status) {
        case QpStatus::kOptimal:
          out.solver_status = kSolverOptimal;
          break;
        case QpStatus::kMaxIter:
          out.solver_status = kSolverMaxIter;
          break;
        case QpStatus::kInfeasible:
          out.solver_status = kSolverInfeasible;
          break;
      }
      if (sol.status == QpStatus::kInfeasible) {
        out.event = "qp_infeasible";
        brake = true;
      } else {
        mu_qp = sol.mu_qp();
        out.d1 = sol.d1();
        out.d2 = sol.d2();
      }
    } catch (const OutsideSafeSet& err) {
      out.event = err.what();
      out.solver_status = kSolverNotRun;
      brake = true;
    }
  }

  PseudoControl mu_total;
  if (brake) {
    // Conservative fallback: drop the adaptive and QP terms and bias to
    // full braking.
    out.fallback = true;
    mu_total = ref.mu_rm + mu_pd;
  } else {
    mu_total = mu_d + mu_qp;
  }
  out.mu_qp = mu_qp;

  const ControlResult ctrl =
      canonical_to_vehicle(mu_total, z, f_hat, config_.limits, true);
  out.u = ctrl.u;
  out.u_requested = ctrl.requested;
  out.saturated = ctrl.saturated;
  if (brake) {
    out.u.a = config_.limits.a_min;
  }

  out.step_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

}  // namespace balsa
