#pragma once

#include "balsa/types.hpp"

namespace balsa {

// Closed-loop error matrix [0 I; -Kp -Kd].  Throws NotHurwitz when any
// eigenvalue has nonnegative real part.
Matrix4d build_error_matrix(const Matrix2d& kp, const Matrix2d& kd);

// Unique SPD solution of A^T P + P A = -Q for Hurwitz A and SPD Q, via the
// vectorized system (I (x) A^T + A^T (x) I) vec(P) = -vec(Q).
Matrix4d solve_lyapunov(const Matrix4d& A, const Matrix4d& Q);

// Quadratic Lyapunov certificate for the tracking-error dynamics.
struct LyapunovCertificate {
  Matrix4d A;
  Matrix4d P;
  Matrix4d Q;
  double epsilon = 1.0;  // convergence-rate constant, > 0

  double value(const Vector4d& e) const { return 0.5 * e.dot(P * e); }

  static LyapunovCertificate make(const Matrix2d& kp, const Matrix2d& kd,
                                  const Matrix4d& Q, double epsilon);
};

// One stochastic CLF constraint row: psi0 + psi1 . mu_qp <= d1.
struct ClfRow {
  double psi0 = 0.0;
  Vector2d psi1 = Vector2d::Zero();
};

// psi0 = -1/2 e^T Q e + (1/eps) V(e) + 1/2 tr(G sigma sigma^T G^T P),
// psi1 = e^T P G, with V(e) = 1/2 e^T P e and G = [0; I].  The G structure
// reduces the trace term to tr(sigma sigma^T P22) with P22 the lower-right
// 2x2 block of P.
ClfRow clf_row(const Vector4d& e, const LyapunovCertificate& cert,
               const DiffusionMatrix& sigma);

}  // namespace balsa
