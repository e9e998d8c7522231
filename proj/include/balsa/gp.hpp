#pragma once

#include <vector>

#include "balsa/belief.hpp"
#include "balsa/dataset.hpp"

namespace balsa {

struct GpHyper {
  double lengthscale = 1.0;  // per z-scored input dimension
  double signal = 1.0;       // kernel amplitude s
  double noise = 0.1;        // observation noise std
  bool optimize = false;     // grid-search marginal-likelihood refit
  double sigma_floor = 1e-3;
  double sigma_cap = 1.0;
};

// Exact GP regression, one squared-exponential GP per output dimension with
// shared hyperparameters.  Inputs are z-scored with statistics of the given
// window.  Throws IllConditioned if the Gram solve fails after jitter
// escalation.  Requires at least one sample.
GaussianBelief gp_fit(const std::vector<Sample>& data, const GpHyper& hyper);

}  // namespace balsa
