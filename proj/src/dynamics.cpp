#include "balsa/dynamics.hpp"

#include <cmath>

namespace balsa {

namespace {

// Heading direction and (optionally clamped) speed used by the gain terms.
struct GainFrame {
  double cos_t;
  double sin_t;
  double v2;
};

GainFrame gain_frame(const CanonicalState& z, bool clamp_speed) {
  const double v = z.speed();
  if (v < kSpeedFloor && !clamp_speed) {
    throw SingularGain("control gain singular at speed " + std::to_string(v));
  }
  const double vc = std::max(v, kSpeedFloor);
  // atan2(0,0) = 0 keeps the frame defined at rest under clamping.
  const double theta = z.heading();
  return {std::cos(theta), std::sin(theta), vc * vc};
}

}  // namespace

CanonicalState bicycle_to_canonical(double px, double py, double theta,
                                    double v) {
  return {px, py, v * std::cos(theta), v * std::sin(theta)};
}

Matrix2d control_gain(const CanonicalState& z, bool clamp_speed) {
  const GainFrame f = gain_frame(z, clamp_speed);
  Matrix2d g;
  g << -f.v2 * f.sin_t, f.cos_t, f.v2 * f.cos_t, f.sin_t;
  return g;
}

Matrix2d control_gain_inverse(const CanonicalState& z, bool clamp_speed) {
  const GainFrame f = gain_frame(z, clamp_speed);
  // det(g) = -v^2; adjugate divided by det.
  Matrix2d ginv;
  ginv << -f.sin_t / f.v2, f.cos_t / f.v2, f.cos_t, f.sin_t;
  return ginv;
}

Vector2d true_disturbance(const CanonicalState& z) {
  const double v = z.speed();
  const double theta = z.heading();
  const Vector2d body(-std::tanh(v * v), -(0.1 + v));
  Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return rot * body;
}

ControlResult canonical_to_vehicle(const PseudoControl& mu_total,
                                   const CanonicalState& z,
                                   const DriftModel& f_hat,
                                   const ControlLimits& limits,
                                   bool clamp_speed) {
  const Matrix2d ginv = control_gain_inverse(z, clamp_speed);
  const Vector2d u_vec = ginv * (mu_total - eval_drift(f_hat, z));
  const VehicleControl requested{u_vec[0], u_vec[1]};
  const VehicleControl applied = limits.clamp(requested);
  const bool saturated =
      applied.c != requested.c || applied.a != requested.a;
  return {applied, requested, saturated};
}

Vector2d Plant::drift(const CanonicalState& z) const {
  Vector2d d = eval_drift(f_hat, z);
  if (disturbance) d += true_disturbance(z);
  return d;
}

namespace {

// Forward gain of the true plant: uses the actual v^2, never inverted, so
// no clamping or singularity handling applies.
Matrix2d plant_gain(const CanonicalState& z) {
  const double v2 = z.z3 * z.z3 + z.z4 * z.z4;
  const double theta = z.heading();
  Matrix2d g;
  g << -v2 * std::sin(theta), std::cos(theta), v2 * std::cos(theta),
      std::sin(theta);
  return g;
}

}  // namespace

CanonicalState Plant::step(const CanonicalState& z, const VehicleControl& u,
                           double dt, std::mt19937_64& rng) const {
  Vector2d accel = drift(z) + plant_gain(z) * u.vec();
  Vector2d noise = Vector2d::Zero();
  if (!sigma.isZero()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vector2d w(normal(rng), normal(rng));
    noise = sigma * (std::sqrt(dt) * w);
  }
  return {z.z1 + z.z3 * dt, z.z2 + z.z4 * dt, z.z3 + accel[0] * dt + noise[0],
          z.z4 + accel[1] * dt + noise[1]};
}

}  // namespace balsa
