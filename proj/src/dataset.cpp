#include "balsa/dataset.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "balsa/csv.hpp"

namespace balsa {

VectorXd learner_input(const CanonicalState& z, const VehicleControl& u_prev) {
  VectorXd x(6);
  x << z.z1, z.z2, z.z3, z.z4, u_prev.c, u_prev.a;
  return x;
}

Sample make_sample(const CanonicalState& z_t, const CanonicalState& z_next,
                   const VehicleControl& u_t, const VehicleControl& u_prev,
                   double dt, const DriftModel& f_hat, double t) {
  Sample s;
  s.x = learner_input(z_t, u_prev);
  const Vector2d rate =
      (z_next.velocity() - z_t.velocity()) / dt;
  s.y = rate - (eval_drift(f_hat, z_t) + control_gain(z_t, true) * u_t.vec());
  s.t = t;
  return s;
}

void Dataset::append(Sample s) {
  std::lock_guard<std::mutex> lock(mutex_);
  data_.push_back(std::move(s));
  if (data_.size() > capacity_) data_.pop_front();
}

std::vector<Sample> Dataset::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return {data_.begin(), data_.end()};
}

std::size_t Dataset::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return data_.size();
}

void Dataset::write_csv(std::ostream& os) const {
  const std::vector<Sample> rows = snapshot();
  std::string line;
  line = "t";
  const Eigen::Index d = rows.empty() ? 0 : rows.front().x.size();
  for (Eigen::Index i = 0; i < d; ++i) {
    line += ",x" + std::to_string(i + 1);
  }
  line += ",y1,y2\n";
  os << line;
  for (const Sample& s : rows) {
    line.clear();
    append_number(line, s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      line += ',';
      append_number(line, s.x[i]);
    }
    line += ',';
    append_number(line, s.y[0]);
    line += ',';
    append_number(line, s.y[1]);
    line += '\n';
    os << line;
  }
}

Dataset Dataset::read_csv(std::istream& is, std::size_t capacity) {
  Dataset ds(capacity);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < 4) continue;
    Sample s;
    s.t = std::stod(cells[0]);
    const std::size_t d = cells.size() - 3;
    s.x.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      s.x[static_cast<Eigen::Index>(i)] = std::stod(cells[1 + i]);
    }
    s.y[0] = std::stod(cells[cells.size() - 2]);
    s.y[1] = std::stod(cells[cells.size() - 1]);
    ds.append(std::move(s));
  }
  return ds;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

}  // namespace balsa
