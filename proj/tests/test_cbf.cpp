#include <doctest.h>

#include <random>

#include "balsa/cbf.hpp"
#include "oracles.hpp"

using namespace balsa;

namespace {

// Safe random states for a unit obstacle at the origin: outside the circle
// and with approach speed below gamma_p * h.
CanonicalState random_safe_state(std::mt19937_64& rng,
                                 const BarrierSpec& spec) {
  std::uniform_real_distribution<double> radius(spec.obstacle.r + 0.3, 8.0);
  std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  while (true) {
    const double rho = radius(rng);
    const double phi = angle(rng);
    CanonicalState z{spec.obstacle.center[0] + rho * std::cos(phi),
                     spec.obstacle.center[1] + rho * std::sin(phi), vel(rng),
                     vel(rng)};
    const double h = h_obstacle(z, spec.obstacle);
    if (spec.gamma_p * h + hdot_obstacle(z, spec.obstacle) > 0.2) return z;
  }
}

double barrier_at(const BarrierSpec& spec, const Eigen::VectorXd& x) {
  return barrier_value(CanonicalState{x[0], x[1], x[2], x[3]}, spec);
}

}  // namespace

TEST_CASE("obstacle level function") {
  Obstacle obs{Vector2d(0, 0), 1.0};
  CHECK(h_obstacle({3, 4, 0, 0}, obs) == doctest::Approx(4.0));
  CHECK(h_obstacle({0, 1, 0, 0}, obs) == doctest::Approx(0.0));
  CHECK(h_obstacle({0.3, 0.0, 0, 0}, obs) == doctest::Approx(-0.7));
}

TEST_CASE("obstacle level rate") {
  Obstacle obs{Vector2d(0, 0), 1.0};
  // Radially outward at speed 2.
  CHECK(hdot_obstacle({3, 0, 2, 0}, obs) == doctest::Approx(2.0));
  // Tangential velocity.
  CHECK(hdot_obstacle({3, 0, 0, 1.7}, obs) == doctest::Approx(0.0));
  CHECK_THROWS_AS(hdot_obstacle({0, 0, 1, 0}, obs), DegenerateCenter);
}

TEST_CASE("level rate matches finite differences along a path") {
  Obstacle obs{Vector2d(1.0, -0.5), 0.8};
  CanonicalState z{3.0, 2.0, -0.6, 0.4};
  const double dt = 1e-6;
  for (int i = 0; i < 50; ++i) {
    // Drift-only flow: positions advance by velocity.
    const CanonicalState next{z.z1 + z.z3 * dt, z.z2 + z.z4 * dt, z.z3, z.z4};
    const double fd = (h_obstacle(next, obs) - h_obstacle(z, obs)) / dt;
    const double analytic = hdot_obstacle(z, obs);
    CHECK(std::abs(fd - analytic) < 1e-5 * std::max(1.0, std::abs(analytic)));
    z = CanonicalState{z.z1 + z.z3 * 0.05, z.z2 + z.z4 * 0.05, z.z3, z.z4};
  }
}

TEST_CASE("barrier values") {
  SUBCASE("obstacle at rest") {
    const BarrierSpec spec =
        BarrierSpec::make_obstacle({Vector2d(0, 0), 1.0}, 1.0, 1.0);
    CHECK(barrier_value({3, 4, 0, 0}, spec) == doctest::Approx(0.25));
  }

  SUBCASE("velocity barrier") {
    const BarrierSpec spec = BarrierSpec::velocity_max(3.0);
    CHECK(barrier_value({0, 0, 1, 0}, spec) == doctest::Approx(0.5));
  }

  SUBCASE("reciprocal blowup near the boundary") {
    const BarrierSpec spec =
        BarrierSpec::make_obstacle({Vector2d(0, 0), 1.0}, 1.0, 1.0);
    // Approach so that gamma_p h + hdot -> 0+.
    const double h = 0.5;
    double prev = 0.0;
    for (const double gap : {0.2, 0.05, 0.01, 1e-4}) {
      const CanonicalState z{1.0 + h, 0.0, -(h - gap), 0.0};
      const double b = barrier_value(z, spec);
      CHECK(b > prev);
      prev = b;
    }
    CHECK(prev > 1e3);
  }

  SUBCASE("outside the valid region") {
    const BarrierSpec spec =
        BarrierSpec::make_obstacle({Vector2d(0, 0), 1.0}, 1.0, 1.0);
    // Inside the circle.
    CHECK_THROWS_AS(barrier_value({0.5, 0, 0, 0}, spec), OutsideSafeSet);
    // Fast approach: denominator negative.
    CHECK_THROWS_AS(barrier_value({2.0, 0, -5.0, 0}, spec), OutsideSafeSet);
    // Over the speed limit.
    CHECK_THROWS_AS(barrier_value({0, 0, 4.0, 0}, BarrierSpec::velocity_max(3.0)),
                    OutsideSafeSet);
    // At the obstacle center: degenerate, already unsafe.
    CHECK_THROWS_AS(barrier_value({0, 0, 1, 0}, spec), DegenerateCenter);
  }
}

TEST_CASE("barrier gradient matches finite differences") {
  std::mt19937_64 rng(31);
  const BarrierSpec spec =
      BarrierSpec::make_obstacle({Vector2d(0.5, -1.0), 1.0}, 1.3, 0.9);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CanonicalState z = random_safe_state(rng, spec);
    const Vector4d grad = barrier_gradient(z, spec);
    const Eigen::VectorXd fd = oracles::fd_gradient(
        [&](const Eigen::VectorXd& x) { return barrier_at(spec, x); },
        z.vec(), 1e-6);
    CHECK((grad - fd).norm() < 1e-5 * std::max(1.0, grad.norm()));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("barrier hessian matches finite differences of the gradient") {
  std::mt19937_64 rng(37);
  const BarrierSpec spec =
      BarrierSpec::make_obstacle({Vector2d(-0.2, 0.7), 0.6}, 1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const CanonicalState z = random_safe_state(rng, spec);
    const Matrix4d hess = barrier_hessian(z, spec);
    const Eigen::MatrixXd fd = oracles::fd_jacobian(
        [&](const Eigen::VectorXd& x) {
          return Eigen::VectorXd(
              barrier_gradient(CanonicalState{x[0], x[1], x[2], x[3]}, spec));
        },
        z.vec(), 1e-6);
    CHECK((hess - fd).norm() < 1e-4 * std::max(1.0, hess.norm()));
    CHECK((hess - hess.transpose()).norm() < 1e-9 * std::max(1.0, hess.norm()));
  }
}

TEST_CASE("velocity barrier derivatives match finite differences") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> vel(-1.5, 1.5);
  for (const BarrierSpec& spec :
       {BarrierSpec::velocity_max(3.0), BarrierSpec::velocity_min(0.2)}) {
    for (int trial = 0; trial < 200; ++trial) {
      CanonicalState z{0, 0, vel(rng), vel(rng)};
      if (spec.kind == BarrierKind::kVelocityMin && z.speed() < 0.4) continue;
      const Vector4d grad = barrier_gradient(z, spec);
      const Eigen::VectorXd fd = oracles::fd_gradient(
          [&](const Eigen::VectorXd& x) { return barrier_at(spec, x); },
          z.vec(), 1e-7);
      CHECK((grad - fd).norm() < 1e-5 * std::max(1.0, grad.norm()));

      const Matrix4d hess = barrier_hessian(z, spec);
      const Eigen::MatrixXd fd2 = oracles::fd_jacobian(
          [&](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(barrier_gradient(
                CanonicalState{x[0], x[1], x[2], x[3]}, spec));
          },
          z.vec(), 1e-6);
      CHECK((hess - fd2).norm() < 1e-4 * std::max(1.0, hess.norm()));
    }
  }
}

TEST_CASE("cbf row structure") {
  const BarrierSpec spec =
      BarrierSpec::make_obstacle({Vector2d(0, 0), 1.0}, 1.0, 1.0);

  SUBCASE("far away the constraint is inactive") {
    const CanonicalState z{300.0, 0.0, 0.1, 0.0};
    const CbfRow row = cbf_row(z, spec, Vector2d::Zero(), Matrix2d::Zero());
    const double h = h_obstacle(z, spec.obstacle);
    CHECK(row.phi0 < 0.0);
    CHECK(row.phi0 == doctest::Approx(-spec.gamma / h).epsilon(1e-3));
    CHECK(row.phi1.norm() < 1e-4);
  }

  SUBCASE("affine in mu_d through the gradient") {
    const CanonicalState z{2.0, 1.0, -0.3, 0.5};
    const Vector2d mu_a(0.4, -0.2), mu_b(-1.0, 0.9);
    const Matrix2d sigma = 0.3 * Matrix2d::Identity();
    const CbfRow ra = cbf_row(z, spec, mu_a, sigma);
    const CbfRow rb = cbf_row(z, spec, mu_b, sigma);
    CHECK(ra.phi1 == rb.phi1);  // phi1 independent of mu_d (and mu_qp)
    const Vector4d grad = barrier_gradient(z, spec);
    CHECK(ra.phi0 - rb.phi0 ==
          doctest::Approx(grad.tail<2>().dot(mu_a - mu_b)).epsilon(1e-12));
  }

  SUBCASE("trace term uses exactly the velocity block of the hessian") {
    const CanonicalState z{2.0, -1.5, 0.4, 0.6};
    Matrix2d sigma;
    sigma << 0.5, 0, 0, 0.7;
    const CbfRow with = cbf_row(z, spec, Vector2d::Zero(), sigma);
    const CbfRow without = cbf_row(z, spec, Vector2d::Zero(), Matrix2d::Zero());
    const Matrix4d hess = barrier_hessian(z, spec);
    const double expected =
        0.5 *
        (sigma * sigma.transpose() * hess.bottomRightCorner<2, 2>()).trace();
    CHECK(with.phi0 - without.phi0 == doctest::Approx(expected).epsilon(1e-12));

    // Same number from the full 4x4 product with explicit G.
    Eigen::Matrix<double, 4, 2> G = Eigen::Matrix<double, 4, 2>::Zero();
    G(2, 0) = 1.0;
    G(3, 1) = 1.0;
    const double full =
        0.5 *
        (G * sigma * sigma.transpose() * G.transpose() * hess).trace();
    CHECK(expected == doctest::Approx(full).epsilon(1e-13));
  }
}
