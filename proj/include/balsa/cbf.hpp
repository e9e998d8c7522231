#pragma once

#include <vector>

#include "balsa/types.hpp"

namespace balsa {

struct Obstacle {
  Vector2d center = Vector2d::Zero();
  double r = 1.0;  // > 0
};

enum class BarrierKind { kObstacle, kVelocityMax, kVelocityMin };

// One safety constraint.  Obstacle barriers use the reciprocal form
//   B = 1 / (gamma_p h + dh/dt),  h = ||p - center|| - r,
// which penalizes approach velocity; velocity barriers have relative
// degree 1 and use B = 1/h with h = v_max - v or v - v_min.
struct BarrierSpec {
  BarrierKind kind = BarrierKind::kObstacle;
  Obstacle obstacle;
  double v_limit = 0.0;   // velocity barriers only
  double gamma_p = 1.0;   // position-term gain, > 0
  double gamma = 1.0;     // class-K scale in gamma3(h) = gamma / h, > 0

  static BarrierSpec make_obstacle(const Obstacle& obs, double gamma_p = 1.0,
                                   double gamma = 1.0);
  static BarrierSpec velocity_max(double v_max, double gamma = 1.0);
  static BarrierSpec velocity_min(double v_min, double gamma = 1.0);
};

// Signed distance to the obstacle circle: ||p - center|| - r.
double h_obstacle(const CanonicalState& z, const Obstacle& obs);

// d/dt of h_obstacle along the state flow.  Throws DegenerateCenter when
// the position coincides with the obstacle center.
double hdot_obstacle(const CanonicalState& z, const Obstacle& obs);

// Level function h for any barrier kind.
double barrier_h(const CanonicalState& z, const BarrierSpec& spec);

// Barrier value B.  Throws OutsideSafeSet when h <= 0 or, for obstacle
// barriers, when the denominator gamma_p h + hdot <= 0.
double barrier_value(const CanonicalState& z, const BarrierSpec& spec);

// Analytic dB/dx over the canonical state (z1, z2, z3, z4).
Vector4d barrier_gradient(const CanonicalState& z, const BarrierSpec& spec);

// Analytic d^2B/dx^2.
Matrix4d barrier_hessian(const CanonicalState& z, const BarrierSpec& spec);

// One stochastic CBF constraint row: phi0 + phi1 . mu_qp <= d2.
struct CbfRow {
  double phi0 = 0.0;
  Vector2d phi1 = Vector2d::Zero();
};

// phi0 = dB/dx . (A0 x + G mu_d) - gamma/h + 1/2 tr(G sigma sigma^T G^T d2B/dx2),
// phi1 = dB/dx . G, with A0 = [0 I; 0 0] and mu_d = mu_rm + mu_pd - mu_ad.
CbfRow cbf_row(const CanonicalState& z, const BarrierSpec& spec,
               const PseudoControl& mu_d, const DiffusionMatrix& sigma);

}  // namespace balsa
