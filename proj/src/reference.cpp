#include "balsa/reference.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace balsa {

FigureEight::FigureEight(double period, double size_x, double size_y,
                         const Vector2d& center)
    : period_(period),
      omega_(2.0 * std::numbers::pi / period),
      size_x_(size_x),
      size_y_(size_y),
      center_(center) {}

ReferencePoint FigureEight::at(double t) const {
  const double w = omega_;
  ReferencePoint r;
  r.x_rm[0] = center_[0] + size_x_ * std::sin(w * t);
  r.x_rm[1] = center_[1] + size_y_ * std::sin(2.0 * w * t);
  r.x_rm[2] = size_x_ * w * std::cos(w * t);
  r.x_rm[3] = 2.0 * size_y_ * w * std::cos(2.0 * w * t);
  r.mu_rm[0] = -size_x_ * w * w * std::sin(w * t);
  r.mu_rm[1] = -4.0 * size_y_ * w * w * std::sin(2.0 * w * t);
  return r;
}

WaypointSpline::WaypointSpline(std::vector<Vector2d> points, double speed)
    : points_(std::move(points)) {
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (n < 3) throw Error("waypoint spline needs at least 3 points");

  // Periodic natural cubic spline with uniform knots:
  // m_{i-1} + 4 m_i + m_{i+1} = 6 (p_{i-1} - 2 p_i + p_{i+1}).
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index prev = (i + n - 1) % n;
    const Eigen::Index next = (i + 1) % n;
    M(i, prev) += 1.0;
    M(i, i) += 4.0;
    M(i, next) += 1.0;
    rhs.row(i) = 6.0 * (points_[prev] - 2.0 * points_[i] + points_[next])
                     .transpose();
  }
  const Eigen::MatrixXd sol = M.partialPivLu().solve(rhs);
  m_.resize(points_.size());
  for (Eigen::Index i = 0; i < n; ++i) m_[i] = sol.row(i).transpose();

  double length = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    length += (points_[(i + 1) % n] - points_[i]).norm();
  }
  period_ = length / speed;
  u_rate_ = static_cast<double>(n) / period_;
}

ReferencePoint WaypointSpline::at(double t) const {
  const auto n = points_.size();
  double u = std::fmod(t, period_) * u_rate_;
  if (u < 0.0) u += static_cast<double>(n);
  const auto i = static_cast<std::size_t>(u) % n;
  const std::size_t j = (i + 1) % n;
  const double s = u - std::floor(u);

  const Vector2d b =
      (points_[j] - points_[i]) - (2.0 * m_[i] + m_[j]) / 6.0;
  const Vector2d c = m_[i] / 2.0;
  const Vector2d d = (m_[j] - m_[i]) / 6.0;

  const Vector2d pos = points_[i] + b * s + c * s * s + d * s * s * s;
  const Vector2d dp_du = b + 2.0 * c * s + 3.0 * d * s * s;
  const Vector2d d2p_du2 = 2.0 * c + 6.0 * d * s;

  ReferencePoint r;
  r.x_rm.head<2>() = pos;
  r.x_rm.tail<2>() = dp_du * u_rate_;
  r.mu_rm = d2p_du2 * u_rate_ * u_rate_;
  return r;
}

}  // namespace balsa
