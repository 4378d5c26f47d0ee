#pragma once

#include <functional>

#include "cbfsim/core.hpp"
#include "cbfsim/issf_filter.hpp"

namespace cbfsim {

// ---------------------------------------------------------------------------
// Inverted pendulum, state (theta, theta_dot), input torque [N m].
// ---------------------------------------------------------------------------

struct PendulumParams {
  double m = 2.0;        // [kg]
  double l = 1.0;        // [m]
  double g = 10.0;       // [m/s^2]
  double a = 0.25;       // angle semi-axis [rad]
  double b = 0.5;        // rate semi-axis [rad/s]
  double alpha_c = 0.2;  // [1/s]
  double kp = 0.6;       // [1/s^2]
  double kd = 0.6;       // [1/s]

  /// Throws DomainError unless every field is positive and finite.
  void validate() const;
  bool operator==(const PendulumParams&) const = default;
};

/// Which safe-set function to use for the pendulum.
enum class PendulumBarrierForm {
  kElliptic,     ///< 1 - th^2/a^2 - thd^2/b^2 - th*thd/(ab)
  kNoCrossTerm,  ///< 1 - th^2/a^2 - thd^2/b^2 (not a CBF for this plant)
};

ControlAffineDynamics pendulum_dynamics(const PendulumParams& p);
Barrier pendulum_barrier(const PendulumParams& p,
                         PendulumBarrierForm form = PendulumBarrierForm::kElliptic);
/// Feedback-linearizing PD law; the closed loop is theta'' = -kp theta - kd theta'.
Controller pendulum_nominal(const PendulumParams& p);

// ---------------------------------------------------------------------------
// Connected truck, state (D, v, v_L), input commanded acceleration [m/s^2].
// ---------------------------------------------------------------------------

/// Controller design values. eps0 is in s^3/m, lambda in 1/m.
struct TruckParams {
  double c0 = 2.0;     // [m]
  double c1 = 1.1;     // [s]
  double c2 = 0.6;     // [s]
  double c3 = 0.03;    // [s^2/m]
  double c4 = -0.03;   // [s^2/m]
  double c5 = -0.03;   // [s^2/m]
  double alpha_c = 0.1;
  double A = 0.4;
  double B = 0.5;
  double kappa = 0.8;
  double d_st = 5.0;
  double d_go = 30.0;
  double v_bar_l = 20.0;
  double a_bar_l = 5.0;    // max leader acceleration
  double a_under_l = 10.0; // max leader deceleration (magnitude)
  double delta = 4.5;
  double eps0 = 0.5;
  double lambda = 0.4;

  /// Positivity checks plus d_go = v_bar_l / kappa + d_st (to 1e-9).
  void validate() const;
  bool operator==(const TruckParams&) const = default;
};

/// Leader acceleration as a function of time.
using LeaderAccel = std::function<double(double t)>;

ControlAffineDynamics truck_dynamics(const TruckParams& p, LeaderAccel leader_accel);

/// Minimum safe distance rho(v, v_L).
double truck_headway(const TruckParams& p, double v, double v_l);

/// (h, L_f h, L_g h) with h = D - rho(v, v_L) and the measured leader acceleration a_l.
BarrierEvaluation truck_barrier_at(const TruckParams& p, const Vector& x, double a_l);
Barrier truck_barrier(const TruckParams& p, double a_l);
Barrier truck_barrier(const TruckParams& p, LeaderAccel leader_accel);

/// Range policy V(D).
double range_policy(const TruckParams& p, double d);
/// V^{-1}(v) on the ramp; DomainError unless 0 < v < v_bar_l.
double range_policy_inverse(const TruckParams& p, double v);
/// Speed policy W(v_L).
double speed_policy(const TruckParams& p, double v_l);

/// Connected cruise controller k_n = A(V(D) - v) + B(W(v_L) - v).
double truck_nominal(const TruckParams& p, double d, double v, double v_l);
Controller truck_nominal_controller(const TruckParams& p);

/// min{k_n, k_s}; falls back to the general closed form when L_g h >= 0.
double truck_safe_filter(const TruckParams& p, double d, double v, double v_l, double a_l);
/// min{k_n, k_s + L_g h / eps(h)} with the given eps; general closed form when L_g h >= 0.
double truck_robust_filter(const TruckParams& p, const EpsilonFunction& epsilon, double d,
                           double v, double v_l, double a_l);
/// Same, with eps built from p.eps0 and p.lambda.
double truck_robust_filter(const TruckParams& p, double d, double v, double v_l, double a_l);

}  // namespace cbfsim
