#include "balsa/qp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "balsa/dynamics.hpp"

namespace balsa {

namespace {

KktResiduals compute_kkt(const QpProblem& p, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) {
  KktResiduals r;
  r.stationarity =
      (p.P * x + p.q + p.A.transpose() * y).lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd slack = p.A * x - p.ub;
  r.primal = p.num_rows() > 0 ? std::max(0.0, slack.maxCoeff()) : 0.0;
  r.complementarity = 0.0;
  for (int i = 0; i < p.num_rows(); ++i) {
    r.complementarity = std::max(r.complementarity, std::abs(y[i] * slack[i]));
  }
  return r;
}

double max_kkt(const KktResiduals& r) {
  return std::max({r.stationarity, r.primal, r.complementarity});
}

// Equality-constrained solve on the active set, with regularization and
// iterative refinement.  Returns false when the refined solution does not
// satisfy the KKT conditions of the full problem.
bool polish(const QpProblem& p, Eigen::VectorXd& x, Eigen::VectorXd& y,
            KktResiduals& kkt) {
  const int n = p.num_vars();
  const int m = p.num_rows();
  std::vector<int> active;
  const Eigen::VectorXd slack = p.A * x - p.ub;
  for (int i = 0; i < m; ++i) {
    if (y[i] > 1e-8 || slack[i] > -1e-8) active.push_back(i);
  }
  const int k = static_cast<int>(active.size());
  if (k > n) return false;  // degenerate active set, keep ADMM iterate

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
  K.topLeftCorner(n, n) = p.P;
  for (int i = 0; i < k; ++i) {
    K.block(n + i, 0, 1, n) = p.A.row(active[i]);
    K.block(0, n + i, n, 1) = p.A.row(active[i]).transpose();
  }
  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = -p.q;
  for (int i = 0; i < k; ++i) rhs[n + i] = p.ub[active[i]];

  constexpr double delta = 1e-9;
  Eigen::MatrixXd Kreg = K;
  Kreg.topLeftCorner(n, n).diagonal().array() += delta;
  Kreg.bottomRightCorner(k, k).diagonal().array() -= delta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Kreg);
  if (ldlt.info() != Eigen::Success) return false;

  Eigen::VectorXd t = Eigen::VectorXd::Zero(n + k);
  for (int pass = 0; pass < 3; ++pass) {
    t += ldlt.solve(rhs - K * t);
  }

  Eigen::VectorXd x_new = t.head(n);
  Eigen::VectorXd y_new = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < k; ++i) {
    // Dual feasibility requires nonnegative multipliers; allow roundoff.
    if (t[n + i] < -1e-9) return false;
    y_new[active[i]] = std::max(0.0, t[n + i]);
  }
  KktResiduals kkt_new = compute_kkt(p, x_new, y_new);
  if (max_kkt(kkt_new) >= max_kkt(kkt)) return false;
  x = std::move(x_new);
  y = std::move(y_new);
  kkt = kkt_new;
  return true;
}

}  // namespace

QpSolution AdmmQpSolver::solve(const QpProblem& p) const {
  const int n = p.num_vars();
  const int m = p.num_rows();
  QpSolution sol;

  if (m == 0) {
    sol.x = p.P.ldlt().solve(-p.q);
    sol.dual = Eigen::VectorXd::Zero(0);
    sol.kkt = compute_kkt(p, sol.x, sol.dual);
    sol.status = max_kkt(sol.kkt) < settings_.kkt_tol ? QpStatus::kOptimal
                                                      : QpStatus::kMaxIter;
    return sol;
  }

  // Row equilibration: exact reformulation, duals unscaled on exit.
  Eigen::VectorXd row_scale(m);
  for (int i = 0; i < m; ++i) {
    const double nrm = p.A.row(i).lpNorm<Eigen::Infinity>();
    row_scale[i] = nrm > 1e-12 ? 1.0 / nrm : 1.0;
  }
  const Eigen::MatrixXd A = row_scale.asDiagonal() * p.A;
  const Eigen::VectorXd ub = row_scale.asDiagonal() * p.ub;

  double rho = settings_.rho;
  const double sigma = settings_.sigma;
  const double alpha = settings_.alpha;

  Eigen::LDLT<Eigen::MatrixXd> kkt_factor(
      p.P + sigma * Eigen::MatrixXd::Identity(n, n) +
      rho * A.transpose() * A);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y_prev_check = y;

  Eigen::VectorXd best_x = x, best_y = y;
  double best_res = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iter = 0;

  while (iter < settings_.max_iterations) {
    ++iter;
    const Eigen::VectorXd rhs = sigma * x - p.q + A.transpose() * (rho * z - y);
    const Eigen::VectorXd x_tilde = kkt_factor.solve(rhs);
    const Eigen::VectorXd z_tilde = A * x_tilde;
    x = alpha * x_tilde + (1.0 - alpha) * x;
    const Eigen::VectorXd zq = alpha * z_tilde + (1.0 - alpha) * z + y / rho;
    z = zq.cwiseMin(ub);
    y = rho * (zq - z);

    if (iter % settings_.check_interval != 0 &&
        iter != settings_.max_iterations) {
      continue;
    }

    // Termination measured on the original (unscaled) problem.
    const Eigen::VectorXd y_orig = row_scale.asDiagonal() * y;
    const Eigen::VectorXd ax = p.A * x;
    const Eigen::VectorXd z_orig = z.cwiseQuotient(row_scale);
    const Eigen::VectorXd px = p.P * x;
    const Eigen::VectorXd aty = p.A.transpose() * y_orig;
    const double r_prim = (ax - z_orig).lpNorm<Eigen::Infinity>();
    const double r_dual = (px + p.q + aty).lpNorm<Eigen::Infinity>();
    const double eps_prim =
        settings_.eps_abs +
        settings_.eps_rel * std::max(ax.lpNorm<Eigen::Infinity>(),
                                     z_orig.lpNorm<Eigen::Infinity>());
    const double eps_dual =
        settings_.eps_abs +
        settings_.eps_rel * std::max({px.lpNorm<Eigen::Infinity>(),
                                      p.q.lpNorm<Eigen::Infinity>(),
                                      aty.lpNorm<Eigen::Infinity>()});
    if (std::max(r_prim - eps_prim, r_dual - eps_dual) < best_res) {
      best_res = std::max(r_prim - eps_prim, r_dual - eps_dual);
      best_x = x;
      best_y = y_orig;
    }
    if (r_prim <= eps_prim && r_dual <= eps_dual) {
      best_x = x;
      best_y = y_orig;
      converged = true;
      break;
    }

    // Primal infeasibility certificate from the dual direction.
    const Eigen::VectorXd dy = y - y_prev_check;
    const double dy_norm = dy.lpNorm<Eigen::Infinity>();
    if (dy_norm > 1e-12) {
      const double cert_tol = 1e-10 * dy_norm;
      if ((A.transpose() * dy).lpNorm<Eigen::Infinity>() <= cert_tol &&
          ub.dot(dy) < -cert_tol) {
        sol.x = x;
        sol.dual = row_scale.asDiagonal() * y;
        sol.status = QpStatus::kInfeasible;
        sol.kkt = compute_kkt(p, sol.x, sol.dual);
        sol.iterations = iter;
        return sol;
      }
    }
    y_prev_check = y;

    if (settings_.adaptive_rho && !converged) {
      const double denom_p = std::max(
          {ax.lpNorm<Eigen::Infinity>(), z_orig.lpNorm<Eigen::Infinity>(),
           1e-12});
      const double denom_d = std::max({px.lpNorm<Eigen::Infinity>(),
                                       p.q.lpNorm<Eigen::Infinity>(),
                                       aty.lpNorm<Eigen::Infinity>(), 1e-12});
      const double ratio =
          std::sqrt((r_prim / denom_p) / std::max(r_dual / denom_d, 1e-12));
      if (ratio > 5.0 || ratio < 0.2) {
        rho = std::clamp(rho * ratio, 1e-6, 1e6);
        kkt_factor.compute(p.P + sigma * Eigen::MatrixXd::Identity(n, n) +
                           rho * A.transpose() * A);
      }
    }
  }

  sol.x = best_x;
  sol.dual = best_y;
  sol.iterations = iter;
  sol.kkt = compute_kkt(p, sol.x, sol.dual);
  if (settings_.polish) {
    sol.polished = polish(p, sol.x, sol.dual, sol.kkt);
  }
  sol.status = max_kkt(sol.kkt) < settings_.kkt_tol
                   ? QpStatus::kOptimal
                   : QpStatus::kMaxIter;
  return sol;
}

ControlRows control_rows(const CanonicalState& z, const PseudoControl& mu_d,
                         const Vector2d& f_hat_value,
                         const ControlLimits& limits) {
  // H u <= b with H = [1 0; -1 0; 0 1; 0 -1], b = (c_max, c_max, a_max, -a_min).
  Eigen::Matrix<double, 4, 2> H;
  H << 1, 0, -1, 0, 0, 1, 0, -1;
  const Eigen::Vector4d b(limits.c_max, limits.c_max, limits.a_max,
                          -limits.a_min);
  const Matrix2d ginv = control_gain_inverse(z, true);
  ControlRows rows;
  rows.coeffs = H * ginv;
  rows.bounds = b - rows.coeffs * (mu_d - f_hat_value);
  return rows;
}

QpProblem assemble(const ClfRow& clf, const std::vector<CbfRow>& cbf_rows,
                   const ControlRows& control, const QpWeights& weights) {
  QpProblem p;
  p.P = Eigen::Matrix4d::Zero();
  p.P.diagonal() << 2.0, 2.0, 2.0 * weights.p1, 2.0 * weights.p2;
  p.q = Eigen::Vector4d::Zero();

  const int m = 1 + static_cast<int>(cbf_rows.size()) + 4;
  p.A.setZero(m, 4);
  p.ub.resize(m);

  p.A.row(0) << clf.psi1[0], clf.psi1[1], -1.0, 0.0;
  p.ub[0] = -clf.psi0;
  int r = 1;
  for (const CbfRow& row : cbf_rows) {
    p.A.row(r) << row.phi1[0], row.phi1[1], 0.0, -1.0;
    p.ub[r] = -row.phi0;
    ++r;
  }
  for (int i = 0; i < 4; ++i, ++r) {
    p.A.row(r) << control.coeffs(i, 0), control.coeffs(i, 1), 0.0, 0.0;
    p.ub[r] = control.bounds[i];
  }
  return p;
}

std::string dump(const QpProblem& problem, const QpSolution* solution) {
  std::ostringstream os;
  os << "qp: " << problem.num_vars() << " vars, " << problem.num_rows()
     << " rows\n";
  os << "P diag:";
  for (int i = 0; i < problem.num_vars(); ++i) os << ' ' << problem.P(i, i);
  os << "\nq:";
  for (int i = 0; i < problem.num_vars(); ++i) os << ' ' << problem.q[i];
  os << '\n';
  for (int i = 0; i < problem.num_rows(); ++i) {
    os << "row " << i << ":";
    for (int j = 0; j < problem.num_vars(); ++j) os << ' ' << problem.A(i, j);
    os << " <= " << problem.ub[i] << '\n';
  }
  if (solution != nullptr) {
    os << "x:";
    for (int i = 0; i < solution->x.size(); ++i) os << ' ' << solution->x[i];
    os << "\nstatus: " << static_cast<int>(solution->status)
       << " iters: " << solution->iterations
       << " kkt: " << solution->kkt.stationarity << ' '
       << solution->kkt.primal << ' ' << solution->kkt.complementarity
       << '\n';
  }
  return os.str();
}

}  // namespace balsa
