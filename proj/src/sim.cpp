#include "cbfsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>

#include "cbfsim/cbf_filter.hpp"
#include "cbfsim/issf_filter.hpp"

namespace cbfsim {

namespace {

constexpr double kStageNudge = 1e-7;
constexpr double kLimitSlack = 1e-12;

bool close_vectors(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
  }
  return true;
}

std::size_t step_count(double horizon, double dt) {
  return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
}

}  // namespace

// ---------------------------------------------------------------------------
// LeaderProfile
// ---------------------------------------------------------------------------

LeaderProfile LeaderProfile::constant(double v0) { return from_segments(v0, {}); }

LeaderProfile LeaderProfile::from_segments(double v0, std::vector<Segment> segments) {
  if (!std::isfinite(v0) || v0 < 0.0) throw DomainError("leader profile: initial speed must be >= 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!std::isfinite(s.t0) || !std::isfinite(s.t1) || !std::isfinite(s.a0) || !std::isfinite(s.a1) ||
        !(s.t1 > s.t0)) {
      throw DomainError("leader profile: segment " + std::to_string(i) + " is malformed");
    }
    if (i > 0 && s.t0 < segments[i - 1].t1) throw DomainError("leader profile: segments overlap");
  }
  LeaderProfile lp;
  lp.v0_ = v0;
  lp.segments_ = std::move(segments);
  return lp;
}

LeaderProfile LeaderProfile::from_samples(double v0, const SampledSignal& accel) {
  accel.validate();
  if (accel.t.size() < 2) throw DomainError("leader profile: need at least two samples");
  std::vector<Segment> segs;
  for (std::size_t k = 0; k + 1 < accel.t.size(); ++k) {
    segs.push_back({accel.t[k], accel.t[k + 1], accel.values[k], accel.values[k]});
  }
  LeaderProfile lp = from_segments(v0, std::move(segs));
  lp.bounded_domain_ = true;
  lp.final_value_ = accel.values.back();
  return lp;
}

double LeaderProfile::acceleration(double t) const {
  if (std::isnan(t)) throw SignalDomainError("leader profile queried at NaN", t);
  if (bounded_domain_ && (t < segments_.front().t0 || t > segments_.back().t1)) {
    throw SignalDomainError("leader profile queried outside its domain", t);
  }
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double v, const Segment& s) { return v < s.t0; });
  if (it == segments_.begin()) return 0.0;
  const Segment& s = *(it - 1);
  if (t >= s.t1) {
    // Closed right end for sampled profiles: hold the last value at t_N.
    return bounded_domain_ && &s == &segments_.back() && t == s.t1 ? final_value_ : 0.0;
  }
  return s.a0 + (s.a1 - s.a0) * (t - s.t0) / (s.t1 - s.t0);
}

void LeaderProfile::check_limits(const TruckParams& p) const {
  if (v0_ > p.v_bar_l + kLimitSlack) throw DomainError("leader profile: initial speed exceeds v_bar_L");
  for (const auto& s : segments_) {
    for (double a : {s.a0, s.a1, final_value_}) {
      if (a < -p.a_under_l - kLimitSlack || a > p.a_bar_l + kLimitSlack) {
        throw DomainError("leader profile: a_L = " + std::to_string(a) + " outside [-" +
                          std::to_string(p.a_under_l) + ", " + std::to_string(p.a_bar_l) + "]");
      }
    }
  }
}

LeaderProfile hard_brake_profile(const TruckParams& p, double v0, double t_brake, double a_peak,
                                 double duration) {
  if (!(v0 > 0.0) || v0 > p.v_bar_l) throw DomainError("hard_brake_profile: v0 must lie in (0, v_bar_L]");
  if (!(t_brake >= 0.0) || !std::isfinite(t_brake)) throw DomainError("hard_brake_profile: t_brake must be >= 0");
  if (!(a_peak < 0.0)) throw DomainError("hard_brake_profile: a_peak must be negative");
  if (-a_peak > p.a_under_l) {
    throw DomainError("hard_brake_profile: |a_peak| exceeds the deceleration limit " +
                      std::to_string(p.a_under_l));
  }
  const double a = -a_peak;
  const double t_min = v0 / a;
  const double t_max = 2.0 * v0 / a;
  if (!(duration >= t_min - 1e-12 && duration <= t_max + 1e-12)) {
    throw DomainError("hard_brake_profile: duration must lie in [v0/|a|, 2 v0/|a|]");
  }
  const double ramp = std::max(0.0, duration - t_min);
  const double plateau = std::max(0.0, duration - 2.0 * ramp);
  std::vector<LeaderProfile::Segment> segs;
  double t = t_brake;
  if (ramp > 0.0) {
    segs.push_back({t, t + ramp, 0.0, a_peak});
    t += ramp;
  }
  if (plateau > 0.0) {
    segs.push_back({t, t + plateau, a_peak, a_peak});
    t += plateau;
  }
  if (ramp > 0.0) segs.push_back({t, t + ramp, a_peak, 0.0});
  LeaderProfile lp = LeaderProfile::from_segments(v0, std::move(segs));
  lp.check_limits(p);
  return lp;
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

std::string to_string(PlantKind kind) { return kind == PlantKind::kPendulum ? "pendulum" : "truck"; }

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kNominal:
      return "nominal";
    case ControllerKind::kCbf:
      return "cbf";
    case ControllerKind::kIssf:
      return "issf";
  }
  return "?";
}

void Scenario::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("scenario: dt must be > 0");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw DomainError("scenario: horizon must be >= dt");
  if (hold_period < 0.0 || !std::isfinite(hold_period)) throw DomainError("scenario: hold_period must be >= 0");
  if (hold_period > 0.0) {
    const double ratio = std::round(hold_period / dt);
    if (ratio < 1.0 || std::abs(ratio * dt - hold_period) > 1e-9 * hold_period) {
      throw DomainError("scenario: hold_period must be a positive multiple of dt");
    }
  }
  const std::size_t n = plant == PlantKind::kPendulum ? 2 : 3;
  if (initial_state.size() != n) throw DimensionError("scenario initial state", n, initial_state.size());
  if (plant == PlantKind::kPendulum) {
    pendulum.validate();
  } else {
    truck.validate();
    leader.check_limits(truck);
  }
  if (controller.kind == ControllerKind::kIssf) {
    EpsilonFunction::exponential(controller.eps0, controller.lambda);
  }
  if (delta && (!(*delta >= 0.0) || !std::isfinite(*delta))) throw DomainError("scenario: delta must be >= 0");
}

std::vector<std::string> Scenario::state_names() const {
  if (plant == PlantKind::kPendulum) return {"theta", "theta_dot"};
  return {"D", "v", "v_L"};
}

bool ScenarioResult::operator==(const ScenarioResult& o) const {
  return name == o.name && state_names == o.state_names && t == o.t && close_vectors(states, o.states) &&
         u_nominal == o.u_nominal && u_filtered == o.u_filtered && d == o.d && h == o.h &&
         h_min == o.h_min && h_star == o.h_star && d_ss_tilde == o.d_ss_tilde &&
         clamp_events == o.clamp_events && warnings == o.warnings;
}

IntegrationError::IntegrationError(const std::string& what, double t, Vector state)
    : Error(what + " at t = " + std::to_string(t)), time_(t), state_(std::move(state)) {}

void IntegrationError::attach_partial(ScenarioResult partial) {
  partial_ = std::make_shared<const ScenarioResult>(std::move(partial));
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

SystemState rk4_step(const ControlAffineDynamics& dynamics, const Controller& controller,
                     const DisturbanceSignal& disturbance, const SystemState& x, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be > 0");
  if (x.size() != dynamics.state_dim) throw DimensionError("rk4_step state", dynamics.state_dim, x.size());
  const bool disturbed = disturbance.kind() != DisturbanceSignal::Kind::kZero;
  if (disturbed && dynamics.input_dim != 1) {
    throw DimensionError("rk4_step: scalar disturbance needs a single input", 1, dynamics.input_dim);
  }

  const auto deriv = [&](double ts, const Vector& xs) {
    Vector u = controller(ts, xs);
    if (disturbed) u(0) += disturbance(ts);
    Vector dx = dynamics.evaluate(ts, xs, u);
    if (!all_finite(dx)) throw IntegrationError("non-finite derivative", ts, xs);
    return dx;
  };

  const double nudge = kStageNudge * dt;
  const Vector& x0 = x.values();
  const Vector k1 = deriv(t + nudge, x0);
  const Vector k2 = deriv(t + 0.5 * dt, x0 + 0.5 * dt * k1);
  const Vector k3 = deriv(t + 0.5 * dt, x0 + 0.5 * dt * k2);
  const Vector k4 = deriv(t + dt - nudge, x0 + dt * k3);
  Vector next = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(next)) throw IntegrationError("non-finite state", t + dt, x0);
  return SystemState(std::move(next));
}

namespace {

struct ClosedLoop {
  ControlAffineDynamics dynamics;
  Barrier barrier;
  Controller nominal;
  Controller active;
};

ClosedLoop build_closed_loop(const Scenario& s) {
  ClosedLoop cl;
  if (s.plant == PlantKind::kPendulum) {
    const PendulumParams& p = s.pendulum;
    cl.dynamics = pendulum_dynamics(p);
    cl.barrier = pendulum_barrier(p, s.pendulum_barrier_form);
    cl.nominal = pendulum_nominal(p);
    const ClassKappaE alpha = linear_class_kappa(p.alpha_c);
    switch (s.controller.kind) {
      case ControllerKind::kNominal:
        cl.active = cl.nominal;
        break;
      case ControllerKind::kCbf:
        cl.active = CbfFilter(cl.barrier, alpha, cl.nominal).as_controller();
        break;
      case ControllerKind::kIssf:
        cl.active = IssfFilter(cl.barrier, alpha, cl.nominal,
                               EpsilonFunction::exponential(s.controller.eps0, s.controller.lambda))
                        .as_controller();
        break;
    }
    return cl;
  }

  const TruckParams p = s.truck;
  const LeaderProfile leader = s.leader;
  const LeaderAccel accel = [leader](double t) { return leader.acceleration(t); };
  cl.dynamics = truck_dynamics(p, accel);
  cl.barrier = truck_barrier(p, accel);
  cl.nominal = truck_nominal_controller(p);
  const auto scalar = [](double u) { return Vector::Constant(1, u); };
  switch (s.controller.kind) {
    case ControllerKind::kNominal:
      cl.active = cl.nominal;
      break;
    case ControllerKind::kCbf:
      cl.active = [p, accel, scalar](double t, const Vector& x) {
        return scalar(truck_safe_filter(p, x(0), x(1), x(2), accel(t)));
      };
      break;
    case ControllerKind::kIssf: {
      const EpsilonFunction eps = EpsilonFunction::exponential(s.controller.eps0, s.controller.lambda);
      cl.active = [p, eps, accel, scalar](double t, const Vector& x) {
        return scalar(truck_robust_filter(p, eps, x(0), x(1), x(2), accel(t)));
      };
      break;
    }
  }
  return cl;
}

void finish_metrics(ScenarioResult& r) {
  r.h_min = r.h.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(r.h.begin(), r.h.end());
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s) {
  s.validate();
  const ClosedLoop cl = build_closed_loop(s);
  const std::size_t n = step_count(s.horizon, s.dt);

  ScenarioResult r;
  r.name = s.name;
  r.state_names = s.state_names();
  r.t.reserve(n + 1);
  r.states.reserve(n + 1);

  const double h0 = cl.barrier.value(s.initial_state.values());
  if (h0 < 0.0) r.warnings.push_back("initial state outside the safe set (h = " + std::to_string(h0) + ")");
  if (s.controller.kind == ControllerKind::kIssf) {
    const double delta = s.delta.value_or(s.disturbance.bound());
    const double alpha_c = s.plant == PlantKind::kPendulum ? s.pendulum.alpha_c : s.truck.alpha_c;
    r.h_star = solve_h_star(linear_class_kappa(alpha_c),
                            EpsilonFunction::exponential(s.controller.eps0, s.controller.lambda), delta);
  }

  const std::size_t hold_ratio =
      s.hold_period > 0.0 ? static_cast<std::size_t>(std::llround(s.hold_period / s.dt)) : 0;
  Vector held;
  Controller stepping = cl.active;
  bool clamped[3] = {false, false, false};

  SystemState x = s.initial_state;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * s.dt;
    if (hold_ratio > 0 && i % hold_ratio == 0) {
      held = cl.active(t, x.values());
      stepping = [held](double, const Vector&) { return held; };
    }
    r.t.push_back(t);
    r.states.push_back(x.values());
    r.u_nominal.push_back(cl.nominal(t, x.values())(0));
    r.u_filtered.push_back(hold_ratio > 0 ? held(0) : cl.active(t, x.values())(0));
    r.d.push_back(s.disturbance(t));
    r.h.push_back(cl.barrier.value(x.values()));
    if (i == n) break;

    try {
      x = rk4_step(cl.dynamics, stepping, s.disturbance, x, t, s.dt);
    } catch (IntegrationError& e) {
      finish_metrics(r);
      e.attach_partial(r);
      throw;
    } catch (const SignalDomainError& e) {
      IntegrationError err(e.what(), t, x.values());
      finish_metrics(r);
      err.attach_partial(r);
      throw err;
    }

    if (s.plant == PlantKind::kTruck) {
      Vector v = x.values();
      const double upper[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                               s.truck.v_bar_l};
      for (int c = 1; c < 3; ++c) {
        const double clipped = std::clamp(v(c), 0.0, upper[c]);
        const bool active = clipped != v(c);
        if (active && !clamped[c]) r.clamp_events.push_back({t + s.dt, r.state_names[static_cast<std::size_t>(c)]});
        clamped[c] = active;
        v(c) = clipped;
      }
      x = SystemState(std::move(v));
    }
  }

  finish_metrics(r);
  if (s.plant == PlantKind::kTruck) {
    const double v_star = s.leader.initial_speed();
    if (v_star > 0.0 && v_star < s.truck.v_bar_l) {
      try {
        r.d_ss_tilde = steady_state_shift(r, s.truck, v_star);
      } catch (const DomainError&) {
        r.d_ss_tilde.reset();
      }
    }
  }
  return r;
}

std::vector<ScenarioResult> run_batch(const std::vector<Scenario>& scenarios) {
  std::vector<std::future<ScenarioResult>> jobs;
  jobs.reserve(scenarios.size());
  for (const auto& s : scenarios) jobs.push_back(std::async(std::launch::async, run_scenario, std::cref(s)));
  std::vector<ScenarioResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

double steady_state_shift(const ScenarioResult& result, const TruckParams& p, double v_star) {
  const auto it = std::find(result.state_names.begin(), result.state_names.end(), "v_L");
  if (it == result.state_names.end()) throw DomainError("steady_state_shift: result has no v_L column");
  const Eigen::Index vl = it - result.state_names.begin();
  const double d_star = range_policy_inverse(p, v_star);

  std::size_t start = 0;
  bool inside = false;
  for (std::size_t k = 0; k <= result.size(); ++k) {
    const bool ok = k < result.size() && std::abs(result.states[k](vl) - v_star) <= 0.01;
    if (ok && !inside) {
      start = k;
      inside = true;
    } else if (!ok && inside) {
      inside = false;
      const std::size_t last = k - 1;
      if (result.t[last] - result.t[start] < 10.0 - 1e-9) continue;
      const double from = result.t[last] - 5.0 - 1e-9;
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t j = start; j <= last; ++j) {
        if (result.t[j] >= from) {
          sum += result.states[j](0);
          ++count;
        }
      }
      return sum / static_cast<double>(count) - d_star;
    }
  }
  throw DomainError("steady_state_shift: no constant-speed window of at least 10 s");
}

DisturbanceSignal reference_lag_residual(const Scenario& base, double time_constant) {
  Scenario s = base;
  s.controller = ControllerSpec{ControllerKind::kCbf, 1.0, 0.0, "cbf"};
  s.disturbance = DisturbanceSignal::zero();
  s.hold_period = 0.0;
  const ScenarioResult r = run_scenario(s);
  return lag_residual(SampledSignal{r.t, r.u_filtered}, time_constant);
}

std::pair<SampledSignal, SampledSignal> synthetic_truck_accel_trace() {
  Scenario s;
  s.name = "synthetic-accel-trace";
  s.plant = PlantKind::kTruck;
  s.initial_state = SystemState{27.4, 16.0, 16.0};
  s.controller = ControllerSpec{ControllerKind::kCbf, 1.0, 0.0, "cbf"};
  s.leader = hard_brake_profile(s.truck, 16.0, 15.0, -8.0, 2.0);
  s.horizon = 30.0;
  s.dt = 0.01;
  const ScenarioResult r = run_scenario(s);
  SampledSignal commanded{r.t, r.u_filtered};
  const DisturbanceSignal residual = lag_residual(commanded, 0.6);
  SampledSignal measured = commanded;
  for (std::size_t k = 0; k < measured.values.size(); ++k) measured.values[k] += residual.samples().values[k];
  return {commanded, measured};
}

void write_result_csv(std::ostream& out, const ScenarioResult& result) {
  out << "t";
  for (const auto& n : result.state_names) out << ',' << n;
  out << ",u_nom,u_filt,d,h\n";
  char buf[32];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < result.size(); ++k) {
    put(result.t[k]);
    for (Eigen::Index i = 0; i < result.states[k].size(); ++i) {
      out << ',';
      put(result.states[k](i));
    }
    for (double v : {result.u_nominal[k], result.u_filtered[k], result.d[k], result.h[k]}) {
      out << ',';
      put(v);
    }
    out << '\n';
  }
}

}  // namespace cbfsim
