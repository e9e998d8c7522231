#include "balsa/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <memory>
#include <numbers>

#include "scaler.hpp"

namespace balsa {

namespace {

using Eigen::MatrixXd;

MatrixXd kernel_matrix(const MatrixXd& X, double lengthscale, double signal) {
  const auto n = X.rows();
  // ||xi - xj||^2 via the Gram expansion.
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                2.0 * X * X.transpose();
  const double s2 = signal * signal;
  const double inv2l2 = 0.5 / (lengthscale * lengthscale);
  return s2 * (-inv2l2 * d2.cwiseMax(0.0)).array().exp().matrix();
}

class GpModel : public ModelImpl {
 public:
  GpModel(MatrixXd X, Eigen::LLT<MatrixXd> chol, MatrixXd alpha,
          detail::Scaler scaler, GpHyper hyper)
      : X_(std::move(X)),
        chol_(std::move(chol)),
        alpha_(std::move(alpha)),
        scaler_(std::move(scaler)),
        hyper_(hyper) {}

  Vector2d mean(const VectorXd& x) const override {
    return (kernel_vector(x).transpose() * alpha_).transpose();
  }

  Vector2d sigma(const VectorXd& x) const override {
    const Eigen::VectorXd k = kernel_vector(x);
    const Eigen::VectorXd v = chol_.matrixL().solve(k);
    const double s2 = hyper_.signal * hyper_.signal;
    const double var =
        std::max(0.0, s2 - v.squaredNorm()) + hyper_.noise * hyper_.noise;
    return Vector2d::Constant(std::sqrt(var));
  }

 private:
  Eigen::VectorXd kernel_vector(const VectorXd& x) const {
    const Eigen::VectorXd xs = scaler_.apply(x);
    const double s2 = hyper_.signal * hyper_.signal;
    const double inv2l2 = 0.5 / (hyper_.lengthscale * hyper_.lengthscale);
    return (s2 *
            (-inv2l2 * (X_.rowwise() - xs.transpose()).rowwise().squaredNorm())
                .array()
                .exp())
        .matrix();
  }

  MatrixXd X_;
  Eigen::LLT<MatrixXd> chol_;
  MatrixXd alpha_;  // N x 2
  detail::Scaler scaler_;
  GpHyper hyper_;
};

struct FitResult {
  Eigen::LLT<MatrixXd> chol;
  MatrixXd alpha;
  double log_marginal = 0.0;
};

FitResult fit_once(const MatrixXd& X, const MatrixXd& Y, double lengthscale,
                   double signal, double noise) {
  const auto n = X.rows();
  MatrixXd K = kernel_matrix(X, lengthscale, signal);
  K.diagonal().array() += noise * noise;

  FitResult out;
  double jitter = 1e-10 * signal * signal;
  const double jitter_max = 1e-2 * signal * signal;
  while (true) {
    out.chol.compute(K);
    if (out.chol.info() == Eigen::Success) break;
    if (jitter > jitter_max) {
      throw IllConditioned("GP Gram solve failed after jitter escalation");
    }
    K.diagonal().array() += jitter;
    jitter *= 10.0;
  }
  out.alpha = out.chol.solve(Y);

  double log_det = 0.0;
  const auto& L = out.chol.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(L(i, i));
  for (int d = 0; d < Y.cols(); ++d) {
    out.log_marginal += -0.5 * Y.col(d).dot(out.alpha.col(d)) - log_det -
                        0.5 * static_cast<double>(n) *
                            std::log(2.0 * std::numbers::pi);
  }
  return out;
}

}  // namespace

GaussianBelief gp_fit(const std::vector<Sample>& data, const GpHyper& hyper) {
  if (data.empty()) {
    throw Error("gp_fit requires at least one sample");
  }
  const auto n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index dim = data.front().x.size();
  const detail::Scaler scaler = detail::Scaler::fit(data);

  MatrixXd X(n, dim);
  MatrixXd Y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) = scaler.apply(data[static_cast<std::size_t>(i)].x).transpose();
    Y.row(i) = data[static_cast<std::size_t>(i)].y.transpose();
  }

  GpHyper used = hyper;
  if (hyper.optimize) {
    double best = -std::numeric_limits<double>::infinity();
    for (const double l : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      for (const double s : {0.5, 1.0, 2.0}) {
        const double lml = fit_once(X, Y, l, s, hyper.noise).log_marginal;
        if (lml > best) {
          best = lml;
          used.lengthscale = l;
          used.signal = s;
        }
      }
    }
  }

  FitResult fit = fit_once(X, Y, used.lengthscale, used.signal, used.noise);
  auto model = std::make_shared<GpModel>(std::move(X), std::move(fit.chol),
                                         std::move(fit.alpha), scaler, used);
  return {std::move(model), hyper.sigma_floor, hyper.sigma_cap};
}

}  // namespace balsa
