#pragma once

#include <string>
#include <vector>

#include "balsa/cbf.hpp"
#include "balsa/clf.hpp"
#include "balsa/types.hpp"

namespace balsa {

// Relaxation penalties: objective mu^T mu + p1 d1^2 + p2 d2^2.
struct QpWeights {
  double p1 = 1.0;    // stability relaxation
  double p2 = 100.0;  // safety relaxation, penalized harder
};

// Dense convex QP over x with one-sided rows:
//   min 1/2 x^T P x + q^T x   s.t.  A x <= ub
// For the controller QP the decision vector is (mu1, mu2, d1, d2).
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd ub;

  int num_vars() const { return static_cast<int>(P.rows()); }
  int num_rows() const { return static_cast<int>(A.rows()); }
};

enum class QpStatus { kOptimal, kMaxIter, kInfeasible };

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;          // max violation of A x <= ub
  double complementarity = 0.0;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd dual;
  QpStatus status = QpStatus::kMaxIter;
  KktResiduals kkt;
  int iterations = 0;
  bool polished = false;

  PseudoControl mu_qp() const { return x.head<2>(); }
  double d1() const { return x[2]; }
  double d2() const { return x[3]; }
};

struct AdmmSettings {
  double rho = 0.1;
  double sigma = 1e-6;          // proximal regularization
  double alpha = 1.6;           // over-relaxation
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iterations = 4000;
  int check_interval = 25;
  bool adaptive_rho = true;
  bool polish = true;
  double kkt_tol = 1e-6;        // status = Optimal requires residuals below this
};

// Operator-splitting solver for small dense QPs; the x-update solves the
// condensed n x n system (P + sigma I + rho A^T A), which stays cheap for
// the 4-variable controller problems even with hundreds of rows.
class AdmmQpSolver {
 public:
  explicit AdmmQpSolver(const AdmmSettings& settings = {})
      : settings_(settings) {}

  QpSolution solve(const QpProblem& problem) const;

  const AdmmSettings& settings() const { return settings_; }

 private:
  AdmmSettings settings_;
};

// Hard actuator rows mapped exactly into mu_qp-space: with
// u = g^{-1}(mu_d + mu_qp - f_hat), the box H u <= b becomes
// H g^{-1} mu_qp <= b - H g^{-1} (mu_d - f_hat).
struct ControlRows {
  Eigen::Matrix<double, 4, 2> coeffs;
  Eigen::Vector4d bounds;
};

ControlRows control_rows(const CanonicalState& z, const PseudoControl& mu_d,
                         const Vector2d& f_hat_value,
                         const ControlLimits& limits);

// Stack the CLF row, the CBF rows (sharing one relaxation d2), and the hard
// control rows into the 4-variable QP.
QpProblem assemble(const ClfRow& clf, const std::vector<CbfRow>& cbf_rows,
                   const ControlRows& control, const QpWeights& weights);

// Human-readable dump of a problem and (optionally) its solution.
std::string dump(const QpProblem& problem, const QpSolution* solution = nullptr);

}  // namespace balsa
