#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace balsa {

using Eigen::Matrix2d;
using Eigen::Matrix4d;
using Eigen::Vector2d;
using Eigen::Vector4d;
using Eigen::VectorXd;

// Pseudo-acceleration in the canonical double-integrator coordinates.
using PseudoControl = Eigen::Vector2d;
// 2x2 diffusion matrix acting on the velocity states.
using DiffusionMatrix = Eigen::Matrix2d;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Control gain g(z) is singular below the speed floor.
struct SingularGain : Error {
  using Error::Error;
};

struct NotHurwitz : Error {
  using Error::Error;
};

struct SolveFailed : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  using Error::Error;
};

// State left the region where a barrier is defined (denominator <= 0).
struct OutsideSafeSet : Error {
  using Error::Error;
};

// Vehicle exactly at an obstacle center; treated as already unsafe.
struct DegenerateCenter : OutsideSafeSet {
  using OutsideSafeSet::OutsideSafeSet;
};

// Canonical state z = [z1, z2, z3, z4]: planar position and its rates.
struct CanonicalState {
  double z1 = 0.0;  // position x [m]
  double z2 = 0.0;  // position y [m]
  double z3 = 0.0;  // velocity x [m/s]
  double z4 = 0.0;  // velocity y [m/s]

  Vector2d position() const { return {z1, z2}; }
  Vector2d velocity() const { return {z3, z4}; }
  Vector4d vec() const { return {z1, z2, z3, z4}; }

  double speed() const { return std::hypot(z3, z4); }
  // Heading; only meaningful when speed() > 0.
  double heading() const { return std::atan2(z4, z3); }

  static CanonicalState from_vec(const Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }

  bool all_finite() const {
    return std::isfinite(z1) && std::isfinite(z2) && std::isfinite(z3) &&
           std::isfinite(z4);
  }
};

// Physical controls: curvature c = tan(psi)/L and acceleration a.
struct VehicleControl {
  double c = 0.0;  // curvature [1/m]
  double a = 0.0;  // acceleration [m/s^2]

  Vector2d vec() const { return {c, a}; }
};

// Actuator box Hu <= b.
struct ControlLimits {
  double c_max = 2.5;   // |c| <= c_max, ~tan(50 deg)/0.48 m wheelbase
  double a_min = -4.0;  // [m/s^2]
  double a_max = 4.0;   // [m/s^2]

  VehicleControl clamp(const VehicleControl& u) const {
    return {std::clamp(u.c, -c_max, c_max), std::clamp(u.a, a_min, a_max)};
  }

  bool contains(const VehicleControl& u, double tol = 1e-9) const {
    return std::abs(u.c) <= c_max + tol && u.a >= a_min - tol &&
           u.a <= a_max + tol;
  }
};

}  // namespace balsa
