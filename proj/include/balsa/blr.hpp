#pragma once

#include <cstdint>
#include <vector>

#include "balsa/belief.hpp"
#include "balsa/dataset.hpp"

namespace balsa {

struct RffConfig {
  int num_features = 256;
  double lengthscale = 1.0;      // per z-scored input dimension
  double signal = 1.0;
  double noise = 0.1;
  double prior_precision = 1.0;  // Gaussian prior precision lambda
  std::uint64_t seed = 0;        // feature draw, fixed across retrains
  double sigma_floor = 1e-3;
  double sigma_cap = 1.0;
};

// Bayesian linear regression over random Fourier features approximating the
// squared-exponential kernel; per-output posteriors share the feature map.
// The regularized solve always succeeds.  Requires at least one sample.
GaussianBelief blr_fit(const std::vector<Sample>& data, const RffConfig& cfg);

}  // namespace balsa
