#pragma once

#include <deque>
#include <iosfwd>
#include <mutex>
#include <vector>

#include "balsa/dynamics.hpp"
#include "balsa/types.hpp"

namespace balsa {

// One regression sample: learner input, model-error target, timestamp.
struct Sample {
  VectorXd x;   // learner input
  Vector2d y;   // finite-difference model-error estimate [m/s^2]
  double t = 0.0;
};

// Default learner input: the canonical state plus the previous control.
VectorXd learner_input(const CanonicalState& z, const VehicleControl& u_prev);

// Finite-difference residual target
//   y = (x2(t+dt) - x2(t))/dt - (f_hat(z_t) + g(z_t) u_t)
// paired with the learner input at time t.
Sample make_sample(const CanonicalState& z_t, const CanonicalState& z_next,
                   const VehicleControl& u_t, const VehicleControl& u_prev,
                   double dt, const DriftModel& f_hat, double t);

// Sliding-window sample store.  Appends may race with snapshot(); both are
// serialized internally so a trainer can read a frozen copy while the
// control loop keeps appending.
class Dataset {
 public:
  explicit Dataset(std::size_t capacity) : capacity_(capacity) {}

  Dataset(Dataset&& other) noexcept {
    std::lock_guard<std::mutex> lock(other.mutex_);
    data_ = std::move(other.data_);
    capacity_ = other.capacity_;
  }

  void append(Sample s);
  std::vector<Sample> snapshot() const;
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

  void write_csv(std::ostream& os) const;
  static Dataset read_csv(std::istream& is, std::size_t capacity);

 private:
  mutable std::mutex mutex_;
  std::deque<Sample> data_;
  std::size_t capacity_;
};

}  // namespace balsa
