#include "balsa/cbf.hpp"

#include <cmath>
#include <string>

namespace balsa {

BarrierSpec BarrierSpec::make_obstacle(const Obstacle& obs, double gamma_p,
                                       double gamma) {
  BarrierSpec s;
  s.kind = BarrierKind::kObstacle;
  s.obstacle = obs;
  s.gamma_p = gamma_p;
  s.gamma = gamma;
  return s;
}

BarrierSpec BarrierSpec::velocity_max(double v_max, double gamma) {
  BarrierSpec s;
  s.kind = BarrierKind::kVelocityMax;
  s.v_limit = v_max;
  s.gamma = gamma;
  return s;
}

BarrierSpec BarrierSpec::velocity_min(double v_min, double gamma) {
  BarrierSpec s;
  s.kind = BarrierKind::kVelocityMin;
  s.v_limit = v_min;
  s.gamma = gamma;
  return s;
}

double h_obstacle(const CanonicalState& z, const Obstacle& obs) {
  return (z.position() - obs.center).norm() - obs.r;
}

double hdot_obstacle(const CanonicalState& z, const Obstacle& obs) {
  const Vector2d q = z.position() - obs.center;
  const double n = q.norm();
  if (n == 0.0) {
    throw DegenerateCenter("vehicle exactly at obstacle center");
  }
  return q.dot(z.velocity()) / n;
}

namespace {

// Gradient and Hessian of B assembled from the pieces of the chosen form.
struct BarrierEval {
  double h;
  double value;           // B
  Vector4d grad;          // dB/dx
  Matrix4d hess;          // d2B/dx2
};

BarrierEval eval_obstacle(const CanonicalState& z, const BarrierSpec& spec) {
  const Vector2d q = z.position() - spec.obstacle.center;
  const Vector2d w = z.velocity();
  const double n = q.norm();
  if (n == 0.0) {
    throw DegenerateCenter("vehicle exactly at obstacle center");
  }
  const Vector2d dir = q / n;
  const double h = n - spec.obstacle.r;
  const double hdot = dir.dot(w);
  const double den = spec.gamma_p * h + hdot;
  if (h <= 0.0 || den <= 0.0) {
    throw OutsideSafeSet("obstacle barrier invalid: h = " + std::to_string(h) +
                         ", gamma_p h + hdot = " + std::to_string(den));
  }

  // den = gamma_p h + q.w / n; gradient blocks over (p, w).
  const Matrix2d proj = Matrix2d::Identity() - dir * dir.transpose();
  const Vector2d den_p = spec.gamma_p * dir + (w - hdot * dir) / n;
  const Vector2d den_w = dir;

  // Hessian blocks of den.
  const Matrix2d hdot_pp =
      (-(w * dir.transpose() + dir * w.transpose()) -
       hdot * (Matrix2d::Identity() - 3.0 * dir * dir.transpose())) /
      (n * n);
  const Matrix2d den_pp = spec.gamma_p * proj / n + hdot_pp;
  const Matrix2d den_pw = proj / n;

  BarrierEval out;
  out.h = h;
  out.value = 1.0 / den;

  Vector4d grad_den;
  grad_den << den_p, den_w;
  const double inv2 = 1.0 / (den * den);
  out.grad = -inv2 * grad_den;

  Matrix4d hess_den = Matrix4d::Zero();
  hess_den.topLeftCorner<2, 2>() = den_pp;
  hess_den.topRightCorner<2, 2>() = den_pw;
  hess_den.bottomLeftCorner<2, 2>() = den_pw;  // proj is symmetric
  out.hess = (2.0 / (den * den * den)) * grad_den * grad_den.transpose() -
             inv2 * hess_den;
  return out;
}

BarrierEval eval_velocity(const CanonicalState& z, const BarrierSpec& spec) {
  const Vector2d w = z.velocity();
  const double v = w.norm();
  const double sign = spec.kind == BarrierKind::kVelocityMax ? -1.0 : 1.0;
  const double h = sign * (v - spec.v_limit);
  if (h <= 0.0) {
    throw OutsideSafeSet("velocity barrier invalid: h = " + std::to_string(h));
  }

  BarrierEval out;
  out.h = h;
  out.value = 1.0 / h;
  out.grad = Vector4d::Zero();
  out.hess = Matrix4d::Zero();
  if (v < 1e-9) {
    // Speed gradient undefined at rest; only reachable for v-max barriers.
    return out;
  }
  const Vector2d dir = w / v;
  const Matrix2d proj = Matrix2d::Identity() - dir * dir.transpose();
  const Vector2d h_w = sign * dir;
  out.grad.tail<2>() = -h_w / (h * h);
  out.hess.bottomRightCorner<2, 2>() =
      (2.0 / (h * h * h)) * h_w * h_w.transpose() -
      sign * proj / (v * h * h);
  return out;
}

BarrierEval eval_barrier(const CanonicalState& z, const BarrierSpec& spec) {
  return spec.kind == BarrierKind::kObstacle ? eval_obstacle(z, spec)
                                             : eval_velocity(z, spec);
}

}  // namespace

double barrier_h(const CanonicalState& z, const BarrierSpec& spec) {
  switch (spec.kind) {
    case BarrierKind::kObstacle:
      return h_obstacle(z, spec.obstacle);
    case BarrierKind::kVelocityMax:
      return spec.v_limit - z.speed();
    case BarrierKind::kVelocityMin:
      return z.speed() - spec.v_limit;
  }
  return 0.0;
}

double barrier_value(const CanonicalState& z, const BarrierSpec& spec) {
  return eval_barrier(z, spec).value;
}

Vector4d barrier_gradient(const CanonicalState& z, const BarrierSpec& spec) {
  return eval_barrier(z, spec).grad;
}

Matrix4d barrier_hessian(const CanonicalState& z, const BarrierSpec& spec) {
  return eval_barrier(z, spec).hess;
}

CbfRow cbf_row(const CanonicalState& z, const BarrierSpec& spec,
               const PseudoControl& mu_d, const DiffusionMatrix& sigma) {
  const BarrierEval b = eval_barrier(z, spec);
  const Vector2d grad_p = b.grad.head<2>();
  const Vector2d grad_w = b.grad.tail<2>();
  // A0 x = [w; 0]; G mu_d lands on the velocity states.
  const double drift = grad_p.dot(z.velocity()) + grad_w.dot(mu_d);
  const double trace_term =
      0.5 * (sigma * sigma.transpose() * b.hess.bottomRightCorner<2, 2>())
                .trace();
  CbfRow row;
  row.phi0 = drift - spec.gamma / b.h + trace_term;
  row.phi1 = grad_w;
  return row;
}

}  // namespace balsa
