#pragma once

#include <memory>
#include <vector>

#include "balsa/controller.hpp"
#include "balsa/types.hpp"

namespace balsa {

// C2 reference generator; velocity and acceleration are analytic
// derivatives of the position parameterization.
class ReferenceTrajectory {
 public:
  virtual ~ReferenceTrajectory() = default;
  virtual ReferencePoint at(double t) const = 0;
};

// Lissajous figure-eight: p(t) = center + (sx sin(w t), sy sin(2 w t)).
class FigureEight : public ReferenceTrajectory {
 public:
  FigureEight(double period, double size_x, double size_y,
              const Vector2d& center = Vector2d::Zero());

  ReferencePoint at(double t) const override;
  double period() const { return period_; }

 private:
  double period_;
  double omega_;
  double size_x_;
  double size_y_;
  Vector2d center_;
};

// Closed periodic cubic spline through the waypoints, traversed at an
// approximately constant speed (uniform parameter rate; the requested
// speed fixes the loop period via the chordal path length).
class WaypointSpline : public ReferenceTrajectory {
 public:
  WaypointSpline(std::vector<Vector2d> points, double speed);

  ReferencePoint at(double t) const override;
  double period() const { return period_; }

 private:
  std::vector<Vector2d> points_;
  std::vector<Vector2d> m_;  // spline second derivatives at knots
  double period_;
  double u_rate_;  // du/dt
};

}  // namespace balsa
