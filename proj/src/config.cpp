#include "cbfsim/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cbfsim {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : Error(path + ": " + message), path_(std::move(path)) {}

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can be
// reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, at(key));
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        throw ConfigError(at(key), "expected a nonnegative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Reader::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Interval interval(const json& v, const std::string& path) {
  const auto xs = number_list(v, path);
  if (xs.size() != 2) throw ConfigError(path, "expected [lower, upper]");
  if (xs[0] > xs[1]) throw ConfigError(path, "lower bound exceeds upper bound");
  return {xs[0], xs[1]};
}

template <typename E>
E enum_value(const json& v, const std::string& path, const std::map<std::string, E>& names) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const auto it = names.find(v.get<std::string>());
  if (it == names.end()) {
    std::string options;
    for (const auto& [k, _] : names) options += (options.empty() ? "" : ", ") + k;
    throw ConfigError(path, "unknown value '" + v.get<std::string>() + "' (expected one of: " + options + ")");
  }
  return it->second;
}

template <typename E>
std::string enum_name(E value, const std::map<std::string, E>& names) {
  for (const auto& [k, v] : names) {
    if (v == value) return k;
  }
  return "?";
}

const std::map<std::string, PlantKind> kPlantNames{{"pendulum", PlantKind::kPendulum}, {"truck", PlantKind::kTruck}};
const std::map<std::string, ControllerKind> kControllerNames{
    {"nominal", ControllerKind::kNominal}, {"cbf", ControllerKind::kCbf}, {"issf", ControllerKind::kIssf}};
const std::map<std::string, PendulumBarrierForm> kFormNames{{"elliptic", PendulumBarrierForm::kElliptic},
                                                            {"no-cross-term", PendulumBarrierForm::kNoCrossTerm}};
const std::map<std::string, DisturbanceSpec::Kind> kDisturbanceNames{
    {"zero", DisturbanceSpec::Kind::kZero},
    {"heaviside", DisturbanceSpec::Kind::kHeaviside},
    {"csv", DisturbanceSpec::Kind::kCsv},
    {"lag_residual", DisturbanceSpec::Kind::kLagResidual}};
const std::map<std::string, LeaderSpec::Kind> kLeaderNames{{"constant", LeaderSpec::Kind::kConstant},
                                                           {"hard_brake", LeaderSpec::Kind::kHardBrake},
                                                           {"csv", LeaderSpec::Kind::kCsv}};

void read_pendulum(const json& j, const std::string& path, Config& c) {
  Reader r(j, path);
  PendulumParams& p = c.pendulum;
  r.number("m", p.m);
  r.number("l", p.l);
  r.number("g", p.g);
  r.number("a", p.a);
  r.number("b", p.b);
  r.number("alpha_c", p.alpha_c);
  r.number("kp", p.kp);
  r.number("kd", p.kd);
  if (const json* v = r.get("barrier_form")) c.barrier_form = enum_value(*v, r.at("barrier_form"), kFormNames);
  r.finish();
}

void read_truck(const json& j, const std::string& path, TruckParams& p) {
  Reader r(j, path);
  r.number("c0", p.c0);
  r.number("c1", p.c1);
  r.number("c2", p.c2);
  r.number("c3", p.c3);
  r.number("c4", p.c4);
  r.number("c5", p.c5);
  r.number("alpha_c", p.alpha_c);
  r.number("A", p.A);
  r.number("B", p.B);
  r.number("kappa", p.kappa);
  r.number("d_st", p.d_st);
  r.number("d_go", p.d_go);
  r.number("v_bar_l", p.v_bar_l);
  r.number("a_bar_l", p.a_bar_l);
  r.number("a_under_l", p.a_under_l);
  r.number("delta", p.delta);
  r.number("eps0", p.eps0);
  r.number("lambda", p.lambda);
  r.finish();
}

ControllerConfig read_controller(const json& j, const std::string& path) {
  Reader r(j, path);
  ControllerConfig cc;
  const json* kind = r.get("kind");
  if (!kind) throw ConfigError(r.at("kind"), "required");
  cc.kind = enum_value(*kind, r.at("kind"), kControllerNames);
  if (cc.kind == ControllerKind::kIssf) {
    r.number("eps0", cc.eps0);
    r.number("lambda", cc.lambda);
  }
  r.string("label", cc.label);
  r.finish();
  return cc;
}

DisturbanceSpec read_disturbance(const json& j, const std::string& path) {
  Reader r(j, path);
  DisturbanceSpec d;
  const json* kind = r.get("kind");
  if (!kind) throw ConfigError(r.at("kind"), "required");
  d.kind = enum_value(*kind, r.at("kind"), kDisturbanceNames);
  switch (d.kind) {
    case DisturbanceSpec::Kind::kZero:
      break;
    case DisturbanceSpec::Kind::kHeaviside:
      r.number("amplitude", d.amplitude);
      break;
    case DisturbanceSpec::Kind::kCsv:
      r.string("path", d.path);
      break;
    case DisturbanceSpec::Kind::kLagResidual:
      r.number("time_constant", d.time_constant);
      r.number("reference_dt", d.reference_dt);
      break;
  }
  r.finish();
  return d;
}

LeaderSpec read_leader(const json& j, const std::string& path) {
  Reader r(j, path);
  LeaderSpec l;
  const json* kind = r.get("kind");
  if (!kind) throw ConfigError(r.at("kind"), "required");
  l.kind = enum_value(*kind, r.at("kind"), kLeaderNames);
  r.number("v0", l.v0);
  if (l.kind == LeaderSpec::Kind::kHardBrake) {
    r.number("t_brake", l.t_brake);
    r.number("a_peak", l.a_peak);
    r.number("duration", l.duration);
  }
  if (l.kind == LeaderSpec::Kind::kCsv) r.string("path", l.path);
  r.finish();
  return l;
}

void read_certify(const json& j, const std::string& path, CertifySpec& cs) {
  Reader r(j, path);
  if (const json* v = r.get("theta_range")) cs.theta_range = interval(*v, r.at("theta_range"));
  r.count("samples", cs.samples);
  if (const json* v = r.get("d_range")) cs.d_range = interval(*v, r.at("d_range"));
  if (const json* v = r.get("vl_range")) cs.vl_range = interval(*v, r.at("vl_range"));
  r.count("d_points", cs.d_points);
  r.count("vl_points", cs.vl_points);
  r.finish();
}

void read_sweep(const json& j, const std::string& path, SweepSpec& s) {
  Reader r(j, path);
  if (const json* v = r.get("points")) {
    if (!v->is_array()) throw ConfigError(r.at("points"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = r.at("points") + "[" + std::to_string(i) + "]";
      Reader pr((*v)[i], p);
      HStarPoint pt;
      pr.number("eps0", pt.eps0);
      pr.number("lambda", pt.lambda);
      pr.finish();
      s.points.push_back(pt);
    }
  }
  if (const json* v = r.get("eps0_grid")) s.eps0_grid = number_list(*v, r.at("eps0_grid"));
  if (const json* v = r.get("lambda_grid")) s.lambda_grid = number_list(*v, r.at("lambda_grid"));
  r.finish();
}

json interval_json(const Interval& i) { return json::array({i.lower, i.upper}); }

// Presets. Each is a complete scenario document.
const std::map<std::string, std::string>& preset_table() {
  static const std::map<std::string, std::string> presets{
      {"pendulum-fig2", R"({
  "name": "pendulum-fig2",
  "plant": "pendulum",
  "initial_state": [-0.1, 0.5],
  "controllers": [{"kind": "nominal"}, {"kind": "cbf"}],
  "disturbance": {"kind": "zero"},
  "horizon": 40, "dt": 0.01
})"},
      {"pendulum-fig5", R"({
  "name": "pendulum-fig5",
  "plant": "pendulum",
  "initial_state": [-0.1, 0.5],
  "controllers": [
    {"kind": "cbf"},
    {"kind": "issf", "eps0": 0.15, "lambda": 0, "label": "issf-black"},
    {"kind": "issf", "eps0": 0.5, "lambda": 12, "label": "issf-red"},
    {"kind": "issf", "eps0": 4, "lambda": 3, "label": "issf-green"}
  ],
  "disturbance": {"kind": "heaviside", "amplitude": 0.75},
  "delta": 0.75,
  "horizon": 40, "dt": 0.01
})"},
      {"pendulum-no-cross-term", R"({
  "name": "pendulum-no-cross-term",
  "plant": "pendulum",
  "pendulum": {"barrier_form": "no-cross-term"},
  "initial_state": [-0.1, 0.5],
  "controllers": [{"kind": "cbf"}],
  "certify": {"theta_range": [-1, 1], "samples": 2001}
})"},
      {"pendulum-table-1", R"({
  "name": "pendulum-table-1",
  "plant": "pendulum",
  "initial_state": [-0.1, 0.5],
  "controllers": [
    {"kind": "issf", "eps0": 0.15, "lambda": 0, "label": "issf-black"},
    {"kind": "issf", "eps0": 0.5, "lambda": 12, "label": "issf-red"},
    {"kind": "issf", "eps0": 4, "lambda": 3, "label": "issf-green"}
  ],
  "disturbance": {"kind": "heaviside", "amplitude": 0.75},
  "delta": 0.75,
  "sweep": {
    "points": [{"eps0": 0.15, "lambda": 0}, {"eps0": 0.5, "lambda": 12}, {"eps0": 4, "lambda": 3}],
    "eps0_grid": [0.15, 0.5, 1, 2, 4],
    "lambda_grid": [0, 1, 3, 6, 12]
  }
})"},
      {"paper-table-2", R"({
  "name": "paper-table-2",
  "plant": "truck",
  "initial_state": [27.4, 16, 16],
  "controllers": [{"kind": "nominal"}, {"kind": "cbf"}],
  "leader": {"kind": "hard_brake", "v0": 16, "t_brake": 15, "a_peak": -8, "duration": 2.5},
  "horizon": 60, "dt": 0.01,
  "certify": {"d_range": [0, 100], "vl_range": [0, 20], "d_points": 200, "vl_points": 200}
})"},
      {"truck-fig8", R"({
  "name": "truck-fig8",
  "plant": "truck",
  "initial_state": [27.4, 16, 16],
  "controllers": [{"kind": "nominal"}, {"kind": "cbf"}],
  "disturbance": {"kind": "zero"},
  "leader": {"kind": "hard_brake", "v0": 16, "t_brake": 15, "a_peak": -8, "duration": 2.5},
  "horizon": 60, "dt": 0.01
})"},
      {"truck-fig11", R"({
  "name": "truck-fig11",
  "plant": "truck",
  "initial_state": [27.4, 16, 16],
  "controllers": [
    {"kind": "nominal"},
    {"kind": "cbf"},
    {"kind": "issf", "eps0": 0.5, "lambda": 0.4, "label": "issf-A"}
  ],
  "disturbance": {"kind": "lag_residual", "time_constant": 0.6, "reference_dt": 0.01},
  "delta": 4.5,
  "leader": {"kind": "hard_brake", "v0": 16, "t_brake": 15, "a_peak": -8, "duration": 2.5},
  "horizon": 60, "dt": 0.01
})"},
      {"truck-table-3", R"({
  "name": "truck-table-3",
  "plant": "truck",
  "initial_state": [27.4, 16, 16],
  "controllers": [
    {"kind": "issf", "eps0": 0.5, "lambda": 0.4, "label": "issf-A"},
    {"kind": "issf", "eps0": 0.8, "lambda": 0, "label": "issf-B"},
    {"kind": "issf", "eps0": 3, "lambda": 0, "label": "issf-C"},
    {"kind": "issf", "eps0": 4, "lambda": 0, "label": "issf-D"},
    {"kind": "issf", "eps0": 5, "lambda": 0, "label": "issf-E"},
    {"kind": "issf", "eps0": 0.5, "lambda": 0.5, "label": "issf-F"},
    {"kind": "issf", "eps0": 0.8, "lambda": 0.25, "label": "issf-G"},
    {"kind": "issf", "eps0": 0.8, "lambda": 0.35, "label": "issf-H"},
    {"kind": "issf", "eps0": 1, "lambda": 0.25, "label": "issf-I"}
  ],
  "disturbance": {"kind": "lag_residual", "time_constant": 0.6, "reference_dt": 0.01},
  "delta": 4.5,
  "leader": {"kind": "hard_brake", "v0": 16, "t_brake": 15, "a_peak": -8, "duration": 2.5},
  "horizon": 60, "dt": 0.01,
  "sweep": {
    "points": [
      {"eps0": 0.8, "lambda": 0}, {"eps0": 3, "lambda": 0}, {"eps0": 4, "lambda": 0},
      {"eps0": 5, "lambda": 0}, {"eps0": 0.5, "lambda": 0.4}, {"eps0": 0.5, "lambda": 0.5},
      {"eps0": 0.8, "lambda": 0.25}, {"eps0": 0.8, "lambda": 0.35}, {"eps0": 1, "lambda": 0.25}
    ],
    "eps0_grid": [0.5, 0.8, 1, 3, 4, 5],
    "lambda_grid": [0, 0.25, 0.35, 0.4, 0.5]
  }
})"},
      {"truck-steady-state", R"({
  "name": "truck-steady-state",
  "plant": "truck",
  "initial_state": [27.4, 16, 16],
  "controllers": [{"kind": "nominal"}],
  "leader": {"kind": "constant", "v0": 16},
  "horizon": 120, "dt": 0.01
})"},
  };
  return presets;
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  Reader r(j, "$");
  Config c;
  r.string("name", c.name);
  if (const json* v = r.get("plant")) c.plant = enum_value(*v, "$.plant", kPlantNames);
  if (const json* v = r.get("pendulum")) read_pendulum(*v, "$.pendulum", c);
  if (const json* v = r.get("truck")) read_truck(*v, "$.truck", c.truck);
  if (const json* v = r.get("initial_state")) c.initial_state = number_list(*v, "$.initial_state");
  if (const json* v = r.get("controllers")) {
    if (!v->is_array()) throw ConfigError("$.controllers", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.controllers.push_back(read_controller((*v)[i], "$.controllers[" + std::to_string(i) + "]"));
    }
  }
  if (const json* v = r.get("disturbance")) c.disturbance = read_disturbance(*v, "$.disturbance");
  if (const json* v = r.get("delta")) {
    if (!v->is_null()) c.delta = Reader::as_number(*v, "$.delta");
  }
  if (const json* v = r.get("leader")) c.leader = read_leader(*v, "$.leader");
  r.number("horizon", c.horizon);
  r.number("dt", c.dt);
  r.number("hold_period", c.hold_period);
  r.string("output_dir", c.output_dir);
  if (const json* v = r.get("certify")) read_certify(*v, "$.certify", c.certify);
  if (const json* v = r.get("sweep")) read_sweep(*v, "$.sweep", c.sweep);
  r.finish();
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Config c = parse_config(ss.str());
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (std::string* file : {&c.disturbance.path, &c.leader.path}) {
    if (!file->empty() && std::filesystem::path(*file).is_relative()) *file = (base / *file).string();
  }
  return c;
}

std::string dump_config(const Config& c) {
  const PendulumParams& p = c.pendulum;
  const TruckParams& t = c.truck;
  json j;
  j["name"] = c.name;
  j["plant"] = enum_name(c.plant, kPlantNames);
  j["pendulum"] = {{"m", p.m},   {"l", p.l},   {"g", p.g},   {"a", p.a},
                   {"b", p.b},   {"alpha_c", p.alpha_c},     {"kp", p.kp},
                   {"kd", p.kd}, {"barrier_form", enum_name(c.barrier_form, kFormNames)}};
  j["truck"] = {{"c0", t.c0},           {"c1", t.c1},          {"c2", t.c2},
                {"c3", t.c3},           {"c4", t.c4},          {"c5", t.c5},
                {"alpha_c", t.alpha_c}, {"A", t.A},            {"B", t.B},
                {"kappa", t.kappa},     {"d_st", t.d_st},      {"d_go", t.d_go},
                {"v_bar_l", t.v_bar_l}, {"a_bar_l", t.a_bar_l}, {"a_under_l", t.a_under_l},
                {"delta", t.delta},     {"eps0", t.eps0},      {"lambda", t.lambda}};
  j["initial_state"] = c.initial_state;
  j["controllers"] = json::array();
  for (const auto& cc : c.controllers) {
    json e = {{"kind", enum_name(cc.kind, kControllerNames)}};
    if (cc.kind == ControllerKind::kIssf) {
      e["eps0"] = cc.eps0;
      e["lambda"] = cc.lambda;
    }
    if (!cc.label.empty()) e["label"] = cc.label;
    j["controllers"].push_back(e);
  }
  json d = {{"kind", enum_name(c.disturbance.kind, kDisturbanceNames)}};
  switch (c.disturbance.kind) {
    case DisturbanceSpec::Kind::kZero:
      break;
    case DisturbanceSpec::Kind::kHeaviside:
      d["amplitude"] = c.disturbance.amplitude;
      break;
    case DisturbanceSpec::Kind::kCsv:
      d["path"] = c.disturbance.path;
      break;
    case DisturbanceSpec::Kind::kLagResidual:
      d["time_constant"] = c.disturbance.time_constant;
      d["reference_dt"] = c.disturbance.reference_dt;
      break;
  }
  j["disturbance"] = d;
  j["delta"] = c.delta ? json(*c.delta) : json(nullptr);
  json l = {{"kind", enum_name(c.leader.kind, kLeaderNames)}, {"v0", c.leader.v0}};
  if (c.leader.kind == LeaderSpec::Kind::kHardBrake) {
    l["t_brake"] = c.leader.t_brake;
    l["a_peak"] = c.leader.a_peak;
    l["duration"] = c.leader.duration;
  }
  if (c.leader.kind == LeaderSpec::Kind::kCsv) l["path"] = c.leader.path;
  j["leader"] = l;
  j["horizon"] = c.horizon;
  j["dt"] = c.dt;
  j["hold_period"] = c.hold_period;
  j["output_dir"] = c.output_dir;
  j["certify"] = {{"theta_range", interval_json(c.certify.theta_range)},
                  {"samples", c.certify.samples},
                  {"d_range", interval_json(c.certify.d_range)},
                  {"vl_range", interval_json(c.certify.vl_range)},
                  {"d_points", c.certify.d_points},
                  {"vl_points", c.certify.vl_points}};
  json pts = json::array();
  for (const auto& pt : c.sweep.points) pts.push_back({{"eps0", pt.eps0}, {"lambda", pt.lambda}});
  j["sweep"] = {{"points", pts}, {"eps0_grid", c.sweep.eps0_grid}, {"lambda_grid", c.sweep.lambda_grid}};
  return j.dump(2);
}

void Config::validate() const {
  const auto wrap = [](const std::string& path, const auto& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(path, e.what());
    }
  };
  if (name.empty()) throw ConfigError("$.name", "must not be empty");
  if (plant == PlantKind::kPendulum) {
    wrap("$.pendulum", [&] { pendulum.validate(); });
  } else {
    wrap("$.truck", [&] { truck.validate(); });
  }
  const std::size_t n = plant == PlantKind::kPendulum ? 2 : 3;
  if (initial_state.size() != n) {
    throw ConfigError("$.initial_state", "expected " + std::to_string(n) + " entries for " + to_string(plant));
  }
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    const auto& cc = controllers[i];
    const std::string p = "$.controllers[" + std::to_string(i) + "]";
    if (cc.kind == ControllerKind::kIssf) {
      if (!(cc.eps0 > 0.0)) throw ConfigError(p + ".eps0", "must be > 0");
      if (!(cc.lambda >= 0.0)) throw ConfigError(p + ".lambda", "must be >= 0");
    }
  }
  switch (disturbance.kind) {
    case DisturbanceSpec::Kind::kHeaviside:
      if (!(disturbance.amplitude >= 0.0)) throw ConfigError("$.disturbance.amplitude", "must be >= 0");
      break;
    case DisturbanceSpec::Kind::kCsv:
      if (disturbance.path.empty()) throw ConfigError("$.disturbance.path", "required");
      break;
    case DisturbanceSpec::Kind::kLagResidual:
      if (plant != PlantKind::kTruck) throw ConfigError("$.disturbance.kind", "lag_residual needs the truck plant");
      if (!(disturbance.time_constant > 0.0)) throw ConfigError("$.disturbance.time_constant", "must be > 0");
      if (!(disturbance.reference_dt > 0.0)) throw ConfigError("$.disturbance.reference_dt", "must be > 0");
      break;
    case DisturbanceSpec::Kind::kZero:
      break;
  }
  if (delta && !(*delta >= 0.0)) throw ConfigError("$.delta", "must be >= 0");
  if (plant == PlantKind::kTruck) {
    if (!(leader.v0 >= 0.0) || leader.v0 > truck.v_bar_l) throw ConfigError("$.leader.v0", "must lie in [0, v_bar_l]");
    if (leader.kind == LeaderSpec::Kind::kHardBrake) {
      wrap("$.leader", [&] { hard_brake_profile(truck, leader.v0, leader.t_brake, leader.a_peak, leader.duration); });
    }
    if (leader.kind == LeaderSpec::Kind::kCsv && leader.path.empty()) throw ConfigError("$.leader.path", "required");
  }
  if (!(dt > 0.0)) throw ConfigError("$.dt", "must be > 0");
  if (!(horizon >= dt)) throw ConfigError("$.horizon", "must be >= dt");
  if (hold_period < 0.0) throw ConfigError("$.hold_period", "must be >= 0");
  if (certify.samples < 2) throw ConfigError("$.certify.samples", "must be >= 2");
  if (certify.d_points < 2) throw ConfigError("$.certify.d_points", "must be >= 2");
  if (certify.vl_points < 2) throw ConfigError("$.certify.vl_points", "must be >= 2");
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    const std::string p = "$.sweep.points[" + std::to_string(i) + "]";
    if (!(sweep.points[i].eps0 > 0.0)) throw ConfigError(p + ".eps0", "must be > 0");
    if (!(sweep.points[i].lambda >= 0.0)) throw ConfigError(p + ".lambda", "must be >= 0");
  }
  for (std::size_t i = 0; i < sweep.eps0_grid.size(); ++i) {
    if (!(sweep.eps0_grid[i] > 0.0)) throw ConfigError("$.sweep.eps0_grid[" + std::to_string(i) + "]", "must be > 0");
  }
  for (std::size_t i = 0; i < sweep.lambda_grid.size(); ++i) {
    if (!(sweep.lambda_grid[i] >= 0.0)) {
      throw ConfigError("$.sweep.lambda_grid[" + std::to_string(i) + "]", "must be >= 0");
    }
  }
}

double Config::effective_delta() const {
  if (delta) return *delta;
  if (plant == PlantKind::kTruck) return truck.delta;
  return disturbance.kind == DisturbanceSpec::Kind::kHeaviside ? disturbance.amplitude : 0.0;
}

double Config::alpha_c() const { return plant == PlantKind::kPendulum ? pendulum.alpha_c : truck.alpha_c; }

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, _] : preset_table()) names.push_back(k);
  return names;
}

Config preset(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("--preset", "unknown preset '" + name + "'");
  return parse_config(it->second);
}

std::vector<Scenario> build_scenarios(const Config& c) {
  c.validate();
  Scenario base;
  base.name = c.name;
  base.plant = c.plant;
  base.pendulum = c.pendulum;
  base.pendulum_barrier_form = c.barrier_form;
  base.truck = c.truck;
  base.initial_state = SystemState(Eigen::Map<const Vector>(c.initial_state.data(),
                                                            static_cast<Eigen::Index>(c.initial_state.size())));
  base.horizon = c.horizon;
  base.dt = c.dt;
  base.hold_period = c.hold_period;
  base.delta = c.delta;
  if (c.plant == PlantKind::kTruck) {
    switch (c.leader.kind) {
      case LeaderSpec::Kind::kConstant:
        base.leader = LeaderProfile::constant(c.leader.v0);
        break;
      case LeaderSpec::Kind::kHardBrake:
        base.leader = hard_brake_profile(c.truck, c.leader.v0, c.leader.t_brake, c.leader.a_peak, c.leader.duration);
        break;
      case LeaderSpec::Kind::kCsv:
        base.leader = LeaderProfile::from_samples(c.leader.v0, load_sampled_csv(c.leader.path, "a_L"));
        break;
    }
    base.leader.check_limits(c.truck);
  }
  switch (c.disturbance.kind) {
    case DisturbanceSpec::Kind::kZero:
      break;
    case DisturbanceSpec::Kind::kHeaviside:
      base.disturbance = DisturbanceSignal::heaviside_pulse(c.disturbance.amplitude);
      break;
    case DisturbanceSpec::Kind::kCsv:
      base.disturbance = load_disturbance_csv(c.disturbance.path);
      break;
    case DisturbanceSpec::Kind::kLagResidual: {
      Scenario ref = base;
      ref.dt = c.disturbance.reference_dt;
      base.disturbance = reference_lag_residual(ref, c.disturbance.time_constant);
      break;
    }
  }

  std::vector<Scenario> out;
  for (const auto& cc : c.controllers) {
    Scenario s = base;
    s.controller = ControllerSpec{cc.kind, cc.eps0, cc.lambda, cc.label.empty() ? to_string(cc.kind) : cc.label};
    s.name = c.name + "_" + s.controller.label;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cbfsim
