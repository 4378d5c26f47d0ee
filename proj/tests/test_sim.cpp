#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cbfsim/sim.hpp"
#include "cbfsim/issf_filter.hpp"

using namespace cbfsim;

namespace {

ControlAffineDynamics scalar_dynamics(double drift) {
  ControlAffineDynamics dyn;
  dyn.state_dim = 1;
  dyn.input_dim = 1;
  dyn.drift = [drift](double, const Vector&) { return Vector::Constant(1, drift); };
  dyn.actuation = [](double, const Vector&) { return Matrix::Zero(1, 1); };
  return dyn;
}

Controller zero_controller() {
  return [](double, const Vector&) { return Vector::Zero(1); };
}

Scenario pendulum_scenario(ControllerKind kind) {
  Scenario s;
  s.name = "p";
  s.plant = PlantKind::kPendulum;
  s.initial_state = SystemState{-0.1, 0.5};
  s.controller.kind = kind;
  s.horizon = 40.0;
  s.dt = 0.01;
  return s;
}

Scenario truck_scenario(ControllerKind kind) {
  Scenario s;
  s.name = "t";
  s.plant = PlantKind::kTruck;
  s.initial_state = SystemState{27.4, 16.0, 16.0};
  s.controller.kind = kind;
  s.leader = hard_brake_profile(s.truck, 16.0, 15.0, -8.0, 2.5);
  s.horizon = 60.0;
  s.dt = 0.01;
  return s;
}

}  // namespace

TEST_CASE("rk4 trivial cases") {
  const SystemState x{1.5};
  CHECK(rk4_step(scalar_dynamics(0.0), zero_controller(), DisturbanceSignal::zero(), x, 0.0, 0.1) == x);
  CHECK(rk4_step(scalar_dynamics(1.0), zero_controller(), DisturbanceSignal::zero(), x, 0.0, 0.1)[0] == 1.5 + 0.1);
  CHECK_THROWS_AS(rk4_step(scalar_dynamics(1.0), zero_controller(), DisturbanceSignal::zero(), x, 0.0, 0.0),
                  DomainError);
}

TEST_CASE("rk4 matches the matrix exponential on the linear pendulum closed loop") {
  const PendulumParams p;
  Matrix a(2, 2);
  a << 0.0, 1.0, -p.kp, -p.kd;
  const Matrix phi = (a * 0.01).exp();
  const ControlAffineDynamics dyn = pendulum_dynamics(p);
  const Controller k = pendulum_nominal(p);
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int i = 0; i < 50; ++i) {
    const SystemState x{U(rng), U(rng)};
    const SystemState next = rk4_step(dyn, k, DisturbanceSignal::zero(), x, 0.0, 0.01);
    CHECK((next.values() - phi * x.values()).norm() <= 1e-10);
  }
}

TEST_CASE("rk4 reports non-finite derivatives with the state") {
  ControlAffineDynamics dyn = scalar_dynamics(0.0);
  dyn.drift = [](double, const Vector& x) { return Vector::Constant(1, 1.0 / (x(0) - 1.0)); };
  try {
    rk4_step(dyn, zero_controller(), DisturbanceSignal::zero(), SystemState{1.0}, 2.0, 0.1);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.state()(0) == 1.0);
    CHECK(e.time() >= 2.0);
  }
}

TEST_CASE("a scalar disturbance needs a single-input plant") {
  ControlAffineDynamics dyn = scalar_dynamics(0.0);
  dyn.input_dim = 2;
  dyn.actuation = [](double, const Vector&) { return Matrix::Zero(1, 2); };
  const Controller k = [](double, const Vector&) { return Vector::Zero(2); };
  CHECK_THROWS_AS(rk4_step(dyn, k, DisturbanceSignal::heaviside_pulse(1.0), SystemState{0.0}, 0.0, 0.1), DimensionError);
}

TEST_CASE("leader profiles") {
  const TruckParams p;
  const LeaderProfile lp = hard_brake_profile(p, 16.0, 10.0, -8.0, 2.5);
  CHECK(lp.initial_speed() == 16.0);
  CHECK(lp(5.0) == 0.0);
  CHECK(lp(10.25) == doctest::Approx(-4.0));
  CHECK(lp(11.0) == -8.0);
  CHECK(lp(12.25) == doctest::Approx(-4.0));
  CHECK(lp(13.0) == 0.0);
  CHECK(lp(100.0) == 0.0);
  // The area under a_L equals the initial speed.
  double dv = 0.0;
  for (int i = 0; i < 100000; ++i) dv += lp(10.0 + (i + 0.5) * 3e-5) * 3e-5;
  CHECK(dv == doctest::Approx(-16.0).epsilon(1e-9));

  CHECK_THROWS_AS(hard_brake_profile(p, 16.0, 10.0, -12.0, 2.5), DomainError);
  CHECK_THROWS_AS(hard_brake_profile(p, 16.0, 10.0, -8.0, 1.0), DomainError);
  CHECK_THROWS_AS(hard_brake_profile(p, 16.0, 10.0, -8.0, 5.0), DomainError);
  CHECK_THROWS_AS(hard_brake_profile(p, 25.0, 10.0, -8.0, 3.5), DomainError);
  CHECK_THROWS_AS(hard_brake_profile(p, 0.0, 10.0, -8.0, 2.5), DomainError);

  const LeaderProfile sampled = LeaderProfile::from_samples(10.0, SampledSignal{{0.0, 1.0, 2.0}, {1.0, -2.0, 0.0}});
  CHECK(sampled(0.5) == 1.0);
  CHECK(sampled(1.0) == -2.0);
  CHECK(sampled(2.0) == 0.0);
  CHECK_THROWS_AS(sampled(2.5), SignalDomainError);
  const LeaderProfile too_hard = LeaderProfile::from_samples(10.0, SampledSignal{{0.0, 1.0}, {-11.0, 0.0}});
  CHECK_THROWS_AS(too_hard.check_limits(p), DomainError);
}

TEST_CASE("leader brake reaches standstill and stays there") {
  Scenario s = truck_scenario(ControllerKind::kCbf);
  s.leader = hard_brake_profile(s.truck, 16.0, 10.0, -8.0, 2.5);
  const ScenarioResult r = run_scenario(s);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r.t[k] >= 12.5 + 1e-9) CHECK(std::abs(r.states[k](2)) <= 1e-9);
  }
}

TEST_CASE("brake beyond the horizon leaves a constant-speed leader") {
  Scenario s = truck_scenario(ControllerKind::kNominal);
  s.leader = hard_brake_profile(s.truck, 16.0, 100.0, -8.0, 2.5);
  s.horizon = 20.0;
  const ScenarioResult r = run_scenario(s);
  for (const auto& x : r.states) CHECK(x(2) == 16.0);
}

TEST_CASE("scenario log shape and recomputable h") {
  const ScenarioResult r = run_scenario(pendulum_scenario(ControllerKind::kCbf));
  CHECK(r.size() == 4001);
  CHECK(r.t.back() == doctest::Approx(40.0));
  CHECK(r.state_names == std::vector<std::string>{"theta", "theta_dot"});
  const Barrier bar = pendulum_barrier(PendulumParams{});
  for (std::size_t k = 0; k < r.size(); k += 37) CHECK(r.h[k] == bar.value(r.states[k]));
  CHECK(r.h_min == *std::min_element(r.h.begin(), r.h.end()));
  CHECK_FALSE(r.h_star.has_value());

  Scenario odd = pendulum_scenario(ControllerKind::kCbf);
  odd.horizon = 1.0;
  odd.dt = 0.3;
  CHECK(run_scenario(odd).size() == 4);
}

TEST_CASE("pendulum scenarios") {
  CHECK(run_scenario(pendulum_scenario(ControllerKind::kNominal)).h_min < 0.0);
  CHECK(run_scenario(pendulum_scenario(ControllerKind::kCbf)).h_min >= -1e-3);

  Scenario disturbed = pendulum_scenario(ControllerKind::kCbf);
  disturbed.disturbance = DisturbanceSignal::heaviside_pulse(0.75);
  CHECK(run_scenario(disturbed).h_min < 0.0);

  Scenario black = disturbed;
  black.controller = ControllerSpec{ControllerKind::kIssf, 0.15, 0.0, "black"};
  const ScenarioResult rb = run_scenario(black);
  REQUIRE(rb.h_star.has_value());
  CHECK(rb.h_min >= *rb.h_star - 1e-3);
  CHECK(rb.h_min >= -0.1 - 1e-3);
}

TEST_CASE("truck scenarios") {
  CHECK(run_scenario(truck_scenario(ControllerKind::kNominal)).h_min < 0.0);
  const ScenarioResult cbf = run_scenario(truck_scenario(ControllerKind::kCbf));
  CHECK(cbf.h_min >= -1e-3);
  REQUIRE(cbf.d_ss_tilde.has_value());
}

TEST_CASE("truck with zero input and zero leader acceleration coasts") {
  Scenario s = truck_scenario(ControllerKind::kNominal);
  s.leader = LeaderProfile::constant(12.0);
  s.initial_state = SystemState{30.0, 10.0, 12.0};
  s.horizon = 10.0;
  s.hold_period = 0.0;
  // Replace the nominal controller by u = 0 through a disturbance cancelling nothing: drive rk4 directly.
  const ControlAffineDynamics dyn = truck_dynamics(s.truck, [](double) { return 0.0; });
  SystemState x = s.initial_state;
  for (int i = 0; i < 1000; ++i) x = rk4_step(dyn, zero_controller(), DisturbanceSignal::zero(), x, i * 0.01, 0.01);
  CHECK(x[1] == 10.0);
  CHECK(x[2] == 12.0);
  CHECK(x[0] == doctest::Approx(30.0 + 2.0 * 10.0).epsilon(1e-12));
}

TEST_CASE("determinism and batch order") {
  const Scenario s = truck_scenario(ControllerKind::kIssf);
  const ScenarioResult a = run_scenario(s);
  const ScenarioResult b = run_scenario(s);
  CHECK(a == b);
  const auto batch = run_batch({pendulum_scenario(ControllerKind::kCbf), s, pendulum_scenario(ControllerKind::kNominal)});
  REQUIRE(batch.size() == 3);
  CHECK(batch[1] == a);
  CHECK(batch[0] == run_scenario(pendulum_scenario(ControllerKind::kCbf)));
}

TEST_CASE("steady-state shift") {
  const TruckParams p;
  CHECK(range_policy_inverse(p, 16.0) == 25.0);
  Scenario s = truck_scenario(ControllerKind::kNominal);
  s.leader = LeaderProfile::constant(16.0);
  s.horizon = 120.0;
  const ScenarioResult r = run_scenario(s);
  CHECK(std::abs(r.states.back()(0) - 25.0) <= 0.05);
  CHECK(std::abs(steady_state_shift(r, p, 16.0)) <= 0.05);

  const ScenarioResult braking = run_scenario(truck_scenario(ControllerKind::kNominal));
  CHECK_THROWS_AS(steady_state_shift(braking, p, 10.0), DomainError);
}

TEST_CASE("clamping keeps speeds nonnegative and is logged") {
  const ScenarioResult r = run_scenario(truck_scenario(ControllerKind::kNominal));
  for (const auto& x : r.states) {
    CHECK(x(1) >= 0.0);
    CHECK(x(2) >= 0.0);
  }
  CHECK_FALSE(r.clamp_events.empty());
}

TEST_CASE("invalid scenarios are rejected") {
  Scenario s = pendulum_scenario(ControllerKind::kCbf);
  s.dt = 0.0;
  CHECK_THROWS_AS(run_scenario(s), DomainError);
  s = pendulum_scenario(ControllerKind::kCbf);
  s.horizon = 0.001;
  CHECK_THROWS_AS(run_scenario(s), DomainError);
  s = pendulum_scenario(ControllerKind::kCbf);
  s.initial_state = SystemState{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(run_scenario(s), DimensionError);
  s = pendulum_scenario(ControllerKind::kCbf);
  s.hold_period = 0.015;
  CHECK_THROWS_AS(run_scenario(s), DomainError);
}

TEST_CASE("initial state outside the safe set is flagged") {
  Scenario s = pendulum_scenario(ControllerKind::kCbf);
  s.initial_state = SystemState{0.3, 0.0};
  s.horizon = 1.0;
  CHECK(run_scenario(s).warnings.size() == 1);
}

TEST_CASE("zero-order-hold controller mode") {
  Scenario s = pendulum_scenario(ControllerKind::kCbf);
  s.hold_period = 0.05;
  const ScenarioResult coarse = run_scenario(s);
  for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
    if ((k + 1) % 5 != 0) CHECK(coarse.u_filtered[k + 1] == coarse.u_filtered[k]);
  }
  s.hold_period = 0.01;
  const ScenarioResult fine = run_scenario(s);
  const double continuous = run_scenario(pendulum_scenario(ControllerKind::kCbf)).h_min;
  CHECK(std::abs(fine.h_min - continuous) < std::abs(coarse.h_min - continuous));
}

TEST_CASE("disturbance outside its domain surfaces as an integration error with a partial log") {
  Scenario s = pendulum_scenario(ControllerKind::kCbf);
  s.disturbance = DisturbanceSignal::sampled(SampledSignal{{0.0, 1.0}, {0.1, 0.1}});
  s.horizon = 2.0;
  try {
    run_scenario(s);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    REQUIRE(e.partial());
    CHECK(e.partial()->size() == 101);
    CHECK(e.time() == doctest::Approx(1.0));
  }
}

TEST_CASE("result CSV format") {
  Scenario s = pendulum_scenario(ControllerKind::kNominal);
  s.horizon = 0.02;
  std::ostringstream os;
  write_result_csv(os, run_scenario(s));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,theta,theta_dot,u_nom,u_filt,d,h");
  std::getline(is, line);
  CHECK(line.rfind("0,-0.1,0.5,1.51666833,1.51666833,0,0.24", 0) == 0);
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("reference lag residual and the synthetic acceleration trace") {
  const DisturbanceSignal d = reference_lag_residual(truck_scenario(ControllerKind::kNominal), 0.6);
  CHECK(d.kind() == DisturbanceSignal::Kind::kLagResidual);
  CHECK(d.bound() <= 4.5);
  CHECK(d.bound() > 1.0);
  const auto [commanded, measured] = synthetic_truck_accel_trace();
  const double sup = estimate_sup_norm(commanded, measured);
  CHECK(sup == doctest::Approx(4.0).epsilon(0.05));
  CHECK(sup <= 4.5);
}

TEST_CASE("robust closed loop stays above h* for random piecewise-constant disturbances") {
  const double delta = 0.75;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(-delta, delta);
  std::uniform_real_distribution<double> hold(0.2, 3.0);
  for (int trial = 0; trial < 8; ++trial) {
    SampledSignal samples;
    double t = 0.0;
    while (t < 20.0) {
      samples.t.push_back(t);
      samples.values.push_back(amp(rng));
      t += hold(rng);
    }
    samples.t.push_back(20.0);
    samples.values.push_back(samples.values.back());
    for (const auto& [eps0, lambda] : {std::pair{0.15, 0.0}, std::pair{0.5, 12.0}, std::pair{4.0, 3.0}}) {
      Scenario s = pendulum_scenario(ControllerKind::kIssf);
      s.controller = ControllerSpec{ControllerKind::kIssf, eps0, lambda, "issf"};
      s.disturbance = DisturbanceSignal::sampled(samples);
      s.delta = delta;
      s.horizon = 20.0;
      const ScenarioResult r = run_scenario(s);
      CHECK(r.h_min >= *r.h_star - 1e-3);
    }
  }
}
