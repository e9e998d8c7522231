#pragma once

#include <functional>
#include <random>

#include "balsa/types.hpp"

namespace balsa {

// Below this speed g(z) is near-singular (det = -v^2); the v^2 terms are
// clamped to max(v, kSpeedFloor) when clamping is requested.
inline constexpr double kSpeedFloor = 0.1;

// Optional known drift model f_hat(z) of the velocity states. Empty means
// zero drift, which is exact for the kinematic bicycle transform.
using DriftModel = std::function<Vector2d(const CanonicalState&)>;

inline Vector2d eval_drift(const DriftModel& f_hat, const CanonicalState& z) {
  return f_hat ? f_hat(z) : Vector2d::Zero();
}

// Pose (px, py, theta, v) -> z = (px, py, v cos(theta), v sin(theta)).
CanonicalState bicycle_to_canonical(double px, double py, double theta,
                                    double v);

// Control gain of the transformed bicycle:
//   g(z) = [[-v^2 sin(theta), cos(theta)], [v^2 cos(theta), sin(theta)]]
// so that d(z3,z4)/dt = g(z) u with u = (c, a).  det(g) = -v^2.
// Throws SingularGain when v < kSpeedFloor and clamping is off.
Matrix2d control_gain(const CanonicalState& z, bool clamp_speed = true);

// Closed-form inverse of control_gain, same clamping rule.
Matrix2d control_gain_inverse(const CanonicalState& z,
                              bool clamp_speed = true);

// Injected "true" disturbance: a body-frame drag nonlinearity plus a
// constant rightward drift, rotated into the world frame.
Vector2d true_disturbance(const CanonicalState& z);

struct ControlResult {
  VehicleControl u;          // applied (clamped) control
  VehicleControl requested;  // pre-clamp control
  bool saturated = false;
};

// u = g(z)^{-1} (mu_total - f_hat(z)), clamped to the actuator box.
ControlResult canonical_to_vehicle(const PseudoControl& mu_total,
                                   const CanonicalState& z,
                                   const DriftModel& f_hat,
                                   const ControlLimits& limits,
                                   bool clamp_speed = true);

// Simulated plant: Euler-Maruyama stepping of
//   d(z1,z2) = (z3,z4) dt
//   d(z3,z4) = (f_hat + delta + g u) dt + Sigma sqrt(dt) w,  w ~ N(0, I)
// where delta is the injected disturbance when enabled.  The plant's Sigma
// is independent of any learner's sigma_i.  Deterministic given the
// caller-owned rng.
struct Plant {
  DiffusionMatrix sigma = DiffusionMatrix::Zero();
  bool disturbance = false;
  DriftModel f_hat;  // empty = zero

  Vector2d drift(const CanonicalState& z) const;
  CanonicalState step(const CanonicalState& z, const VehicleControl& u,
                      double dt, std::mt19937_64& rng) const;
};

}  // namespace balsa
