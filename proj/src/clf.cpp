#include "balsa/clf.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace balsa {

Matrix4d build_error_matrix(const Matrix2d& kp, const Matrix2d& kd) {
  Matrix4d A = Matrix4d::Zero();
  A.topRightCorner<2, 2>() = Matrix2d::Identity();
  A.bottomLeftCorner<2, 2>() = -kp;
  A.bottomRightCorner<2, 2>() = -kd;
  const auto eig = A.eigenvalues();
  for (int i = 0; i < eig.size(); ++i) {
    if (eig[i].real() >= -1e-12) {
      throw NotHurwitz("error matrix has eigenvalue with Re = " +
                       std::to_string(eig[i].real()));
    }
  }
  return A;
}

Matrix4d solve_lyapunov(const Matrix4d& A, const Matrix4d& Q) {
  const auto eig = A.eigenvalues();
  for (int i = 0; i < eig.size(); ++i) {
    if (eig[i].real() >= 0.0) {
      throw NotHurwitz("Lyapunov equation requires Hurwitz A");
    }
  }
  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P), column-major vec.
  Eigen::Matrix<double, 16, 16> M = Eigen::Matrix<double, 16, 16>::Zero();
  const Matrix4d At = A.transpose();
  const Matrix4d I = Matrix4d::Identity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      M.block<4, 4>(4 * i, 4 * j) = I(i, j) * At + At(i, j) * I;
    }
  }
  const Eigen::Matrix<double, 16, 1> q =
      Eigen::Map<const Eigen::Matrix<double, 16, 1>>(Q.data());
  Eigen::Matrix<double, 16, 1> p = M.colPivHouseholderQr().solve(-q);
  if (!p.allFinite()) {
    throw SolveFailed("Lyapunov solve produced non-finite entries");
  }
  Matrix4d P = Eigen::Map<Matrix4d>(p.data());
  P = 0.5 * (P + P.transpose());  // enforce exact symmetry
  return P;
}

LyapunovCertificate LyapunovCertificate::make(const Matrix2d& kp,
                                              const Matrix2d& kd,
                                              const Matrix4d& Q,
                                              double epsilon) {
  LyapunovCertificate cert;
  cert.A = build_error_matrix(kp, kd);
  cert.Q = Q;
  cert.P = solve_lyapunov(cert.A, Q);
  cert.epsilon = epsilon;
  Eigen::SelfAdjointEigenSolver<Matrix4d> es(cert.P);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw SolveFailed("Lyapunov solution is not positive definite");
  }
  return cert;
}

ClfRow clf_row(const Vector4d& e, const LyapunovCertificate& cert,
               const DiffusionMatrix& sigma) {
  ClfRow row;
  const Matrix2d p22 = cert.P.bottomRightCorner<2, 2>();
  const double trace_term = 0.5 * (sigma * sigma.transpose() * p22).trace();
  row.psi0 = -0.5 * e.dot(cert.Q * e) + cert.value(e) / cert.epsilon +
             trace_term;
  // e^T P G picks the last two entries of P e (P symmetric).
  row.psi1 = (cert.P * e).tail<2>();
  return row;
}

}  // namespace balsa
