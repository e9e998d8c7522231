#include "balsa/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace balsa {

using nlohmann::json;

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kNone:
      return "none";
    case LearnerKind::kGp:
      return "gp";
    case LearnerKind::kBlr:
      return "blr";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(const std::string& name) {
  if (name == "none") return LearnerKind::kNone;
  if (name == "gp") return LearnerKind::kGp;
  if (name == "blr") return LearnerKind::kBlr;
  throw Error("unknown learner kind: " + name);
}

std::unique_ptr<ReferenceTrajectory> ReferenceSpec::build() const {
  if (kind == Kind::kFigureEight) {
    return std::make_unique<FigureEight>(period, size_x, size_y);
  }
  return std::make_unique<WaypointSpline>(points, speed);
}

std::vector<BarrierSpec> BarrierSetup::build() const {
  std::vector<BarrierSpec> specs;
  for (const Obstacle& obs : obstacles) {
    specs.push_back(BarrierSpec::make_obstacle(obs, gamma_p, gamma));
  }
  if (v_max > 0.0) specs.push_back(BarrierSpec::velocity_max(v_max, gamma));
  if (v_min > 0.0) specs.push_back(BarrierSpec::velocity_min(v_min, gamma));
  return specs;
}

CanonicalState Scenario::initial_state() const {
  if (start) {
    const Vector4d& s = *start;
    return bicycle_to_canonical(s[0], s[1], s[2], s[3]);
  }
  const auto traj = reference.build();
  return CanonicalState::from_vec(traj->at(0.0).x_rm);
}

namespace {

void parse_reference(const json& j, ReferenceSpec& ref) {
  const std::string kind = j.value("kind", "figure8");
  if (kind == "figure8") {
    ref.kind = ReferenceSpec::Kind::kFigureEight;
    ref.period = j.value("period", ref.period);
    ref.size_x = j.value("size_x", ref.size_x);
    ref.size_y = j.value("size_y", ref.size_y);
  } else if (kind == "waypoints") {
    ref.kind = ReferenceSpec::Kind::kWaypoints;
    ref.speed = j.value("speed", ref.speed);
    ref.points.clear();
    for (const auto& p : j.at("points")) {
      ref.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
  } else {
    throw Error("unknown reference kind: " + kind);
  }
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario s;
  s.name = j.value("name", s.name);
  s.duration = j.value("duration", s.duration);
  s.dt = j.value("dt", s.dt);
  s.seed = j.value("seed", s.seed);
  s.record_timing = j.value("record_timing", s.record_timing);

  if (j.contains("reference")) parse_reference(j.at("reference"), s.reference);

  if (j.contains("plant")) {
    const json& p = j.at("plant");
    s.plant.sigma = p.value("sigma", s.plant.sigma);
    s.plant.disturbance = p.value("disturbance", s.plant.disturbance);
  }

  if (j.contains("controller")) {
    const json& c = j.at("controller");
    s.controller = parse_controller_kind(c.value("kind", "balsa"));
    s.control.kp = c.value("kp", s.control.kp);
    s.control.kd = c.value("kd", s.control.kd);
    s.control.epsilon = c.value("epsilon", s.control.epsilon);
    s.control.weights.p1 = c.value("p1", s.control.weights.p1);
    s.control.weights.p2 = c.value("p2", s.control.weights.p2);
    s.control.sigma0 = c.value("sigma0", s.control.sigma0);
    s.control.sigma_robust = c.value("sigma_robust", s.control.sigma_robust);
    s.control.cull_radius = c.value("cull_radius", s.control.cull_radius);
    if (c.contains("limits")) {
      const json& l = c.at("limits");
      s.control.limits.c_max = l.value("c_max", s.control.limits.c_max);
      s.control.limits.a_min = l.value("a_min", s.control.limits.a_min);
      s.control.limits.a_max = l.value("a_max", s.control.limits.a_max);
    }
  }

  if (j.contains("learner")) {
    const json& l = j.at("learner");
    s.learner.kind = parse_learner_kind(l.value("kind", "none"));
    s.learner.retrain_every = l.value("retrain_every", s.learner.retrain_every);
    s.learner.warmup = l.value("warmup", s.learner.warmup);
    s.learner.publish_delay_steps =
        l.value("publish_delay_steps", s.learner.publish_delay_steps);
    s.learner.sample_stride = l.value("sample_stride", s.learner.sample_stride);
    s.learner.window = l.value(
        "window", s.learner.kind == LearnerKind::kBlr ? std::size_t{5000}
                                                      : std::size_t{500});
    s.learner.gp.optimize = l.value("gp_optimize", s.learner.gp.optimize);
    s.learner.blr.num_features =
        l.value("blr_features", s.learner.blr.num_features);
  } else {
    s.learner.window = 500;
  }

  if (j.contains("barriers")) {
    const json& b = j.at("barriers");
    s.barriers.gamma_p = b.value("gamma_p", s.barriers.gamma_p);
    s.barriers.gamma = b.value("gamma", s.barriers.gamma);
    s.barriers.v_max = b.value("v_max", s.barriers.v_max);
    s.barriers.v_min = b.value("v_min", s.barriers.v_min);
    if (b.contains("obstacles")) {
      for (const auto& o : b.at("obstacles")) {
        Obstacle obs;
        obs.center = Vector2d(o.at("x").get<double>(), o.at("y").get<double>());
        obs.r = o.at("r").get<double>();
        s.barriers.obstacles.push_back(obs);
      }
    }
  }

  if (j.contains("start")) {
    const json& st = j.at("start");
    s.start = Vector4d(st.at("x").get<double>(), st.at("y").get<double>(),
                       st.at("theta").get<double>(), st.at("v").get<double>());
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["duration"] = s.duration;
  j["dt"] = s.dt;
  j["seed"] = s.seed;
  j["record_timing"] = s.record_timing;

  json ref;
  if (s.reference.kind == ReferenceSpec::Kind::kFigureEight) {
    ref["kind"] = "figure8";
    ref["period"] = s.reference.period;
    ref["size_x"] = s.reference.size_x;
    ref["size_y"] = s.reference.size_y;
  } else {
    ref["kind"] = "waypoints";
    ref["speed"] = s.reference.speed;
    json pts = json::array();
    for (const Vector2d& p : s.reference.points) {
      pts.push_back({p[0], p[1]});
    }
    ref["points"] = pts;
  }
  j["reference"] = ref;

  j["plant"] = {{"sigma", s.plant.sigma}, {"disturbance", s.plant.disturbance}};

  json c;
  c["kind"] = to_string(s.controller);
  c["kp"] = s.control.kp;
  c["kd"] = s.control.kd;
  c["epsilon"] = s.control.epsilon;
  c["p1"] = s.control.weights.p1;
  c["p2"] = s.control.weights.p2;
  c["sigma0"] = s.control.sigma0;
  c["sigma_robust"] = s.control.sigma_robust;
  c["cull_radius"] = s.control.cull_radius;
  c["limits"] = {{"c_max", s.control.limits.c_max},
                 {"a_min", s.control.limits.a_min},
                 {"a_max", s.control.limits.a_max}};
  j["controller"] = c;

  j["learner"] = {{"kind", to_string(s.learner.kind)},
                  {"retrain_every", s.learner.retrain_every},
                  {"warmup", s.learner.warmup},
                  {"publish_delay_steps", s.learner.publish_delay_steps},
                  {"window", s.learner.window},
                  {"sample_stride", s.learner.sample_stride}};

  json b;
  b["gamma_p"] = s.barriers.gamma_p;
  b["gamma"] = s.barriers.gamma;
  b["v_max"] = s.barriers.v_max;
  b["v_min"] = s.barriers.v_min;
  json obs = json::array();
  for (const Obstacle& o : s.barriers.obstacles) {
    obs.push_back({{"x", o.center[0]}, {"y", o.center[1]}, {"r", o.r}});
  }
  b["obstacles"] = obs;
  j["barriers"] = b;

  if (s.start) {
    j["start"] = {{"x", (*s.start)[0]},
                  {"y", (*s.start)[1]},
                  {"theta", (*s.start)[2]},
                  {"v", (*s.start)[3]}};
  }
  return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file: " + path);
  out << scenario_to_json(scenario) << '\n';
}

}  // namespace balsa
