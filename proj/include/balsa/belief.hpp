#pragma once

#include <memory>
#include <mutex>

#include "balsa/types.hpp"

namespace balsa {

// Backend of a published model: predictive mean and per-axis predictive
// standard deviation of the velocity-state model error.
class ModelImpl {
 public:
  virtual ~ModelImpl() = default;
  virtual Vector2d mean(const VectorXd& x) const = 0;
  virtual Vector2d sigma(const VectorXd& x) const = 0;
};

// Immutable snapshot of the model-error belief {m_i, sigma_i}.  The default
// belief (switching index 0, no data) has m = 0 and sigma = sigma0 * I.
// sigma entries are clamped to [sigma_floor, sigma_cap].
class GaussianBelief {
 public:
  GaussianBelief() = default;

  GaussianBelief(std::shared_ptr<const ModelImpl> impl, double sigma_floor,
                 double sigma_cap)
      : impl_(std::move(impl)),
        sigma_floor_(sigma_floor),
        sigma_cap_(sigma_cap),
        index_(-1) {}

  static GaussianBelief initial(double sigma0) {
    GaussianBelief b;
    b.sigma0_ = sigma0;
    return b;
  }

  Vector2d mean(const VectorXd& x) const {
    return impl_ ? impl_->mean(x) : Vector2d::Zero();
  }

  Vector2d sigma(const VectorXd& x) const {
    if (!impl_) return Vector2d::Constant(sigma0_);
    return impl_->sigma(x)
        .cwiseMax(sigma_floor_)
        .cwiseMin(sigma_cap_);
  }

  Matrix2d sigma_matrix(const VectorXd& x) const {
    return sigma(x).asDiagonal();
  }

  // Switching index: 0 before any publication, -1 on a fitted-but-not-yet
  // published belief, then the publication count.
  int index() const { return index_; }

 private:
  friend class ModelBus;
  std::shared_ptr<const ModelImpl> impl_;
  double sigma0_ = 1.0;
  double sigma_floor_ = 1e-3;
  double sigma_cap_ = 1.0;
  int index_ = 0;
};

// Publication point between the trainer and the control loop.  Snapshots
// are immutable; replacement is a single swap under a lock, so a reader
// never observes a torn model and in-flight copies stay valid.
class ModelBus {
 public:
  explicit ModelBus(double sigma0 = 1.0) {
    current_ = GaussianBelief::initial(sigma0);
  }

  GaussianBelief snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return current_;
  }

  // Stamps the next switching index and swaps the visible snapshot.
  GaussianBelief publish(GaussianBelief belief) {
    std::lock_guard<std::mutex> lock(mutex_);
    belief.index_ = current_.index_ + 1;
    current_ = std::move(belief);
    return current_;
  }

  int index() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return current_.index_;
  }

 private:
  mutable std::mutex mutex_;
  GaussianBelief current_;
};

}  // namespace balsa
