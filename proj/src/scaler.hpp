#pragma once

#include <Eigen/Core>
#include <vector>

#include "balsa/dataset.hpp"

namespace balsa::detail {

// Per-dimension z-scoring with statistics of the training window.
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd inv_std;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return (x - mean).cwiseProduct(inv_std);
  }

  static Scaler fit(const std::vector<Sample>& data) {
    const auto n = static_cast<Eigen::Index>(data.size());
    const Eigen::Index d = data.front().x.size();
    Scaler s;
    s.mean = Eigen::VectorXd::Zero(d);
    for (const Sample& sample : data) s.mean += sample.x;
    s.mean /= static_cast<double>(n);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
    for (const Sample& sample : data) {
      var += (sample.x - s.mean).cwiseAbs2();
    }
    var /= static_cast<double>(n);
    s.inv_std = var.cwiseSqrt().cwiseMax(1e-8).cwiseInverse();
    return s;
  }
};

}  // namespace balsa::detail
