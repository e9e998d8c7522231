#include "balsa/blr.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "scaler.hpp"

namespace balsa {

namespace {

using Eigen::MatrixXd;

class BlrModel : public ModelImpl {
 public:
  BlrModel(MatrixXd omega, Eigen::VectorXd phase, MatrixXd w_mean,
           Eigen::LDLT<MatrixXd> precision, detail::Scaler scaler,
           RffConfig cfg)
      : omega_(std::move(omega)),
        phase_(std::move(phase)),
        w_mean_(std::move(w_mean)),
        precision_(std::move(precision)),
        scaler_(std::move(scaler)),
        cfg_(cfg) {}

  Vector2d mean(const VectorXd& x) const override {
    return (features(x).transpose() * w_mean_).transpose();
  }

  Vector2d sigma(const VectorXd& x) const override {
    const Eigen::VectorXd phi = features(x);
    // phi^T S phi with S the posterior covariance, shared by both outputs.
    const double var = phi.dot(precision_.solve(phi)) + cfg_.noise * cfg_.noise;
    return Vector2d::Constant(std::sqrt(std::max(var, 0.0)));
  }

  Eigen::VectorXd features(const VectorXd& x) const {
    const Eigen::VectorXd xs = scaler_.apply(x);
    const double scale =
        cfg_.signal * std::sqrt(2.0 / static_cast<double>(cfg_.num_features));
    return scale * ((omega_.transpose() * xs + phase_).array().cos().matrix());
  }

 private:
  MatrixXd omega_;        // D x F frequency draws
  Eigen::VectorXd phase_;  // F
  MatrixXd w_mean_;       // F x 2
  Eigen::LDLT<MatrixXd> precision_;  // S^{-1} = lambda I + Phi^T Phi / noise^2
  detail::Scaler scaler_;
  RffConfig cfg_;
};

}  // namespace

GaussianBelief blr_fit(const std::vector<Sample>& data, const RffConfig& cfg) {
  if (data.empty()) {
    throw Error("blr_fit requires at least one sample");
  }
  const auto n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index dim = data.front().x.size();
  const Eigen::Index nf = cfg.num_features;
  const detail::Scaler scaler = detail::Scaler::fit(data);

  // Spectral draws for the squared-exponential kernel: omega ~ N(0, 1/l^2).
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0 / cfg.lengthscale);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  MatrixXd omega(dim, nf);
  for (Eigen::Index j = 0; j < nf; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) omega(i, j) = normal(rng);
  }
  Eigen::VectorXd phase(nf);
  for (Eigen::Index j = 0; j < nf; ++j) phase[j] = uniform(rng);

  const double scale =
      cfg.signal * std::sqrt(2.0 / static_cast<double>(cfg.num_features));
  MatrixXd phi(n, nf);
  MatrixXd Y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xs =
        scaler.apply(data[static_cast<std::size_t>(i)].x);
    phi.row(i) =
        (scale * ((omega.transpose() * xs + phase).array().cos()).matrix())
            .transpose();
    Y.row(i) = data[static_cast<std::size_t>(i)].y.transpose();
  }

  const double inv_noise2 = 1.0 / (cfg.noise * cfg.noise);
  MatrixXd s_inv = cfg.prior_precision * MatrixXd::Identity(nf, nf) +
                   inv_noise2 * phi.transpose() * phi;
  Eigen::LDLT<MatrixXd> precision(s_inv);
  MatrixXd w_mean = inv_noise2 * precision.solve(phi.transpose() * Y);

  auto model = std::make_shared<BlrModel>(std::move(omega), std::move(phase),
                                          std::move(w_mean),
                                          std::move(precision), scaler, cfg);
  return {std::move(model), cfg.sigma_floor, cfg.sigma_cap};
}

}  // namespace balsa
