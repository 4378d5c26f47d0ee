#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbfsim/core.hpp"
#include "cbfsim/disturbance.hpp"
#include "cbfsim/plants.hpp"

namespace cbfsim {

// ---------------------------------------------------------------------------
// Leader acceleration profile (truck scenarios)
// ---------------------------------------------------------------------------

/// Piecewise-linear leader acceleration a_L(t) plus the leader's initial speed.
/// Parametric profiles are defined for all t >= 0 (a_L = 0 outside the
/// segments); file profiles only on [t_0, t_N].
class LeaderProfile {
 public:
  struct Segment {
    double t0;
    double t1;
    double a0;  ///< a_L at t0
    double a1;  ///< a_L approaching t1
  };

  LeaderProfile() = default;

  static LeaderProfile constant(double v0);
  /// Zero-order hold between samples of a_L.
  static LeaderProfile from_samples(double v0, const SampledSignal& accel);
  static LeaderProfile from_segments(double v0, std::vector<Segment> segments);

  double initial_speed() const { return v0_; }
  double acceleration(double t) const;
  double operator()(double t) const { return acceleration(t); }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Rejects any a_L outside [-a_under_l, a_bar_l].
  void check_limits(const TruckParams& p) const;

 private:
  double v0_ = 0.0;
  std::vector<Segment> segments_;
  bool bounded_domain_ = false;
  double final_value_ = 0.0;  ///< a_L at t_N for sampled profiles
};

/// Constant v0 until t_brake, then a trapezoidal deceleration with peak
/// a_peak < 0 lasting `duration` seconds that brings the leader to rest.
/// Requires v0/|a_peak| <= duration <= 2 v0/|a_peak| so the ramps are
/// nonnegative; the ramp length is duration - v0/|a_peak|.
LeaderProfile hard_brake_profile(const TruckParams& p, double v0, double t_brake, double a_peak,
                                 double duration);

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

enum class PlantKind { kPendulum, kTruck };
enum class ControllerKind { kNominal, kCbf, kIssf };

std::string to_string(PlantKind kind);
std::string to_string(ControllerKind kind);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::kNominal;
  double eps0 = 1.0;    ///< ISSf only
  double lambda = 0.0;  ///< ISSf only
  std::string label;    ///< output name; defaults to the kind
};

struct Scenario {
  std::string name;
  PlantKind plant = PlantKind::kPendulum;
  PendulumParams pendulum;
  PendulumBarrierForm pendulum_barrier_form = PendulumBarrierForm::kElliptic;
  TruckParams truck;
  SystemState initial_state;
  ControllerSpec controller;
  DisturbanceSignal disturbance;
  /// Disturbance bound used for h*; defaults to disturbance.bound().
  std::optional<double> delta;
  LeaderProfile leader;
  double horizon = 40.0;
  double dt = 0.01;
  /// Zero-order-hold controller period; 0 evaluates the controller in every RK4 stage.
  double hold_period = 0.0;

  void validate() const;
  std::vector<std::string> state_names() const;
};

struct ClampEvent {
  double t;
  std::string component;
  bool operator==(const ClampEvent&) const = default;
};

struct ScenarioResult {
  std::string name;
  std::vector<std::string> state_names;
  std::vector<double> t;
  std::vector<Vector> states;
  std::vector<double> u_nominal;
  std::vector<double> u_filtered;
  std::vector<double> d;
  std::vector<double> h;

  double h_min = 0.0;
  std::optional<double> h_star;
  std::optional<double> d_ss_tilde;
  std::vector<ClampEvent> clamp_events;
  std::vector<std::string> warnings;

  std::size_t size() const { return t.size(); }
  bool operator==(const ScenarioResult& other) const;
};

/// Integration failure; carries the time, the offending state and, when raised
/// by run_scenario, the trajectory logged so far.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t, Vector state);
  double time() const { return time_; }
  const Vector& state() const { return state_; }
  const std::shared_ptr<const ScenarioResult>& partial() const { return partial_; }
  void attach_partial(ScenarioResult partial);

 private:
  double time_;
  Vector state_;
  std::shared_ptr<const ScenarioResult> partial_;
};

/// Classical RK4 step of x' = f(x) + g(x)(k(t, x) + d(t)). The controller is
/// evaluated at every stage. The first and last stage times are moved inside
/// [t, t + dt] by 1e-7 dt so that piecewise signals are read on this step's
/// side of any breakpoint that coincides with a grid point.
SystemState rk4_step(const ControlAffineDynamics& dynamics, const Controller& controller,
                     const DisturbanceSignal& disturbance, const SystemState& x, double t, double dt);

ScenarioResult run_scenario(const Scenario& s);

/// Runs independent scenarios concurrently; results keep the input order.
std::vector<ScenarioResult> run_batch(const std::vector<Scenario>& scenarios);

/// Mean D over the last 5 s of the first window of at least 10 s with
/// |v_L - v*| <= 0.01, minus V^{-1}(v*).
double steady_state_shift(const ScenarioResult& result, const TruckParams& p, double v_star);

/// The undisturbed CBF-filtered run of `base` pushed through a first-order lag:
/// the residual (lagged minus commanded) on the scenario's time grid.
DisturbanceSignal reference_lag_residual(const Scenario& base, double time_constant);

/// Commanded and lagged ("measured") acceleration from a hard braking run,
/// used to exercise the empirical bound estimate.
std::pair<SampledSignal, SampledSignal> synthetic_truck_accel_trace();

/// CSV log with header `t,<state columns>,u_nom,u_filt,d,h`, 9 significant digits.
void write_result_csv(std::ostream& out, const ScenarioResult& result);

}  // namespace cbfsim
