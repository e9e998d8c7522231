#pragma once

#include <limits>
#include <string>
#include <vector>

#include "balsa/belief.hpp"
#include "balsa/cbf.hpp"
#include "balsa/clf.hpp"
#include "balsa/dynamics.hpp"
#include "balsa/qp.hpp"
#include "balsa/types.hpp"

namespace balsa {

// Reference state and feedforward pseudo-control mu_rm = d/dt x_2rm.
struct ReferencePoint {
  Vector4d x_rm = Vector4d::Zero();
  PseudoControl mu_rm = PseudoControl::Zero();
};

// pd:    mu_rm + mu_pd
// ad:    mu_rm + mu_pd - mu_ad
// qp:    mu_rm + mu_pd + mu_qp, m = 0, sigma = sigma0 I
// rob:   qp with sigma fixed at a constant robust bound
// balsa: mu_rm + mu_pd + mu_qp - mu_ad with the learned belief
enum class ControllerKind { kPd, kAd, kQp, kRob, kBalsa };

std::string to_string(ControllerKind kind);
ControllerKind parse_controller_kind(const std::string& name);

struct ControllerConfig {
  double kp = 4.0;
  double kd = 4.0;
  Matrix4d Q = Matrix4d::Identity();
  double epsilon = 1.0;
  QpWeights weights;
  ControlLimits limits;
  double sigma0 = 1.0;         // belief bound before the first publication
  double sigma_robust = 2.0;   // fixed bound used by the rob controller
  double cull_radius = 10.0;   // drop barrier rows with h beyond this
  AdmmSettings qp;
};

// Telemetry solver_status codes (CSV column).
inline constexpr int kSolverOptimal = 0;
inline constexpr int kSolverMaxIter = 1;
inline constexpr int kSolverInfeasible = 2;
inline constexpr int kSolverNotRun = 3;  // pd/ad kinds and fallback steps

struct StepResult {
  VehicleControl u;
  VehicleControl u_requested;
  bool saturated = false;

  Vector4d e = Vector4d::Zero();
  double lyapunov = 0.0;
  PseudoControl mu_qp = PseudoControl::Zero();
  double d1 = 0.0;
  double d2 = 0.0;
  double min_h = std::numeric_limits<double>::infinity();
  Vector2d sigma = Vector2d::Zero();  // sigma used in the constraint rows
  int solver_status = kSolverNotRun;
  bool fallback = false;
  std::string event;  // nonempty when a safety event fired
  double step_ms = 0.0;
};

// Per-step control law.  Pure aside from the solver scratch space; reads
// exactly one belief snapshot per call.
class TrackingController {
 public:
  TrackingController(ControllerKind kind, const ControllerConfig& config);

  PseudoControl pd_term(const Vector4d& e) const;

  StepResult step(const CanonicalState& z, const VectorXd& x_query,
                  const ReferencePoint& ref, const GaussianBelief& belief,
                  const std::vector<BarrierSpec>& barriers,
                  const DriftModel& f_hat = {}) const;

  const LyapunovCertificate& certificate() const { return cert_; }
  ControllerKind kind() const { return kind_; }
  const ControllerConfig& config() const { return config_; }

 private:
  bool uses_qp() const {
    return kind_ == ControllerKind::kQp || kind_ == ControllerKind::kRob ||
           kind_ == ControllerKind::kBalsa;
  }
  bool uses_model() const {
    return kind_ == ControllerKind::kAd || kind_ == ControllerKind::kBalsa;
  }

  ControllerKind kind_;
  ControllerConfig config_;
  Matrix2d kp_;
  Matrix2d kd_;
  LyapunovCertificate cert_;
  AdmmQpSolver solver_;
};

}  // namespace balsa
