#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbfsim/sim.hpp"
#include "cbfsim/verification.hpp"

namespace cbfsim {

/// Invalid configuration; `path()` is a JSON-path-like key location such as
/// `$.controllers[1].eps0`.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct DisturbanceSpec {
  enum class Kind { kZero, kHeaviside, kCsv, kLagResidual };
  Kind kind = Kind::kZero;
  double amplitude = 0.0;       ///< heaviside
  std::string path;             ///< csv
  double time_constant = 0.6;   ///< lag residual
  double reference_dt = 0.01;   ///< lag residual: grid of the reference run
  bool operator==(const DisturbanceSpec&) const = default;
};

struct LeaderSpec {
  enum class Kind { kConstant, kHardBrake, kCsv };
  Kind kind = Kind::kConstant;
  double v0 = 16.0;
  double t_brake = 15.0;
  double a_peak = -8.0;
  double duration = 2.5;
  std::string path;
  bool operator==(const LeaderSpec&) const = default;
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kNominal;
  double eps0 = 1.0;
  double lambda = 0.0;
  std::string label;
  bool operator==(const ControllerConfig&) const = default;
};

struct CertifySpec {
  Interval theta_range{-1.0, 1.0};
  std::size_t samples = 2001;
  Interval d_range{0.0, 100.0};
  Interval vl_range{0.0, 20.0};
  std::size_t d_points = 200;
  std::size_t vl_points = 200;
  bool operator==(const CertifySpec&) const = default;
};

struct HStarPoint {
  double eps0 = 1.0;
  double lambda = 0.0;
  bool operator==(const HStarPoint&) const = default;
};

struct SweepSpec {
  std::vector<HStarPoint> points;  ///< `hstar` rows
  std::vector<double> eps0_grid;   ///< `sweep` grid
  std::vector<double> lambda_grid;
  bool operator==(const SweepSpec&) const = default;
};

struct Config {
  std::string name = "scenario";
  PlantKind plant = PlantKind::kPendulum;
  PendulumParams pendulum;
  PendulumBarrierForm barrier_form = PendulumBarrierForm::kElliptic;
  TruckParams truck;
  std::vector<double> initial_state;
  std::vector<ControllerConfig> controllers;
  DisturbanceSpec disturbance;
  std::optional<double> delta;
  LeaderSpec leader;
  double horizon = 40.0;
  double dt = 0.01;
  double hold_period = 0.0;
  std::string output_dir = "out";
  CertifySpec certify;
  SweepSpec sweep;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  /// Disturbance bound for h*: `delta` if set, else the truck's delta or the pendulum pulse amplitude.
  double effective_delta() const;
  double alpha_c() const;
  bool operator==(const Config&) const = default;
};

/// Strict parse: unknown keys and wrong types are rejected with their key path.
Config parse_config(const std::string& json_text);
/// Relative CSV paths inside the file resolve against its directory.
Config load_config(const std::string& path);
std::string dump_config(const Config& c);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
Config preset(const std::string& name);

/// One Scenario per configured controller. Lag-residual disturbances are
/// generated once from the undisturbed CBF run on the reference grid.
std::vector<Scenario> build_scenarios(const Config& c);

}  // namespace cbfsim
