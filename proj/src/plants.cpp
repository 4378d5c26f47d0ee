#include "cbfsim/plants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbfsim/cbf_filter.hpp"

namespace cbfsim {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw DomainError(std::string(name) + " must be finite");
}

Vector scalar(double u) {
  Vector out(1);
  out(0) = u;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pendulum
// ---------------------------------------------------------------------------

void PendulumParams::validate() const {
  require_positive(m, "pendulum m");
  require_positive(l, "pendulum l");
  require_positive(g, "pendulum g");
  require_positive(a, "pendulum a");
  require_positive(b, "pendulum b");
  require_positive(alpha_c, "pendulum alpha_c");
  require_positive(kp, "pendulum kp");
  require_positive(kd, "pendulum kd");
}

ControlAffineDynamics pendulum_dynamics(const PendulumParams& p) {
  p.validate();
  ControlAffineDynamics dyn;
  dyn.state_dim = 2;
  dyn.input_dim = 1;
  dyn.drift = [p](double, const Vector& x) {
    Vector f(2);
    f << x(1), (p.g / p.l) * std::sin(x(0));
    return f;
  };
  dyn.actuation = [p](double, const Vector&) {
    Matrix g(2, 1);
    g << 0.0, 1.0 / (p.m * p.l * p.l);
    return g;
  };
  return dyn;
}

Barrier pendulum_barrier(const PendulumParams& p, PendulumBarrierForm form) {
  p.validate();
  const double a = p.a;
  const double b = p.b;
  const double cross = form == PendulumBarrierForm::kElliptic ? 1.0 / (a * b) : 0.0;
  const double inertia = p.m * p.l * p.l;

  Barrier barrier;
  barrier.value = [=](const Vector& x) {
    const double th = x(0);
    const double thd = x(1);
    return 1.0 - th * th / (a * a) - thd * thd / (b * b) - cross * th * thd;
  };
  barrier.evaluate = [=, value = barrier.value](double, const Vector& x) {
    const double th = x(0);
    const double thd = x(1);
    const double dh_dth = -2.0 * th / (a * a) - cross * thd;
    const double dh_dthd = -2.0 * thd / (b * b) - cross * th;
    BarrierEvaluation be;
    be.h = value(x);
    be.lf_h = dh_dth * thd + dh_dthd * (p.g / p.l) * std::sin(th);
    be.lg_h = RowVector::Constant(1, dh_dthd / inertia);
    return be;
  };
  return barrier;
}

Controller pendulum_nominal(const PendulumParams& p) {
  p.validate();
  return [p](double, const Vector& x) {
    const double th = x(0);
    const double thd = x(1);
    return scalar(p.m * p.l * p.l * (-(p.g / p.l) * std::sin(th) - p.kp * th - p.kd * thd));
  };
}

// ---------------------------------------------------------------------------
// Truck
// ---------------------------------------------------------------------------

void TruckParams::validate() const {
  for (double c : {c0, c1, c2, c3, c4, c5}) require_finite(c, "truck headway coefficient");
  require_positive(alpha_c, "truck alpha_c");
  require_positive(A, "truck A");
  require_positive(B, "truck B");
  require_positive(kappa, "truck kappa");
  require_positive(d_st, "truck d_st");
  require_positive(d_go, "truck d_go");
  require_positive(v_bar_l, "truck v_bar_l");
  require_positive(a_bar_l, "truck a_bar_l");
  require_positive(a_under_l, "truck a_under_l");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("truck delta must be >= 0");
  require_positive(eps0, "truck eps0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("truck lambda must be >= 0");
  if (std::abs(d_go - (v_bar_l / kappa + d_st)) > 1e-9) {
    throw DomainError("truck d_go must equal v_bar_l / kappa + d_st");
  }
}

ControlAffineDynamics truck_dynamics(const TruckParams& p, LeaderAccel leader_accel) {
  p.validate();
  if (!leader_accel) throw DomainError("truck_dynamics needs a leader acceleration signal");
  ControlAffineDynamics dyn;
  dyn.state_dim = 3;
  dyn.input_dim = 1;
  dyn.drift = [leader_accel = std::move(leader_accel)](double t, const Vector& x) {
    Vector f(3);
    f << x(2) - x(1), 0.0, leader_accel(t);
    return f;
  };
  dyn.actuation = [](double, const Vector&) {
    Matrix g(3, 1);
    g << 0.0, 1.0, 0.0;
    return g;
  };
  return dyn;
}

double truck_headway(const TruckParams& p, double v, double v_l) {
  return p.c0 + p.c1 * v + p.c2 * v_l + p.c3 * v * v + p.c4 * v * v_l + p.c5 * v_l * v_l;
}

BarrierEvaluation truck_barrier_at(const TruckParams& p, const Vector& x, double a_l) {
  const double d = x(0);
  const double v = x(1);
  const double v_l = x(2);
  BarrierEvaluation be;
  be.h = d - truck_headway(p, v, v_l);
  be.lf_h = v_l - v - a_l * (p.c2 + p.c4 * v + 2.0 * p.c5 * v_l);
  be.lg_h = RowVector::Constant(1, -p.c1 - 2.0 * p.c3 * v - p.c4 * v_l);
  return be;
}

Barrier truck_barrier(const TruckParams& p, double a_l) {
  return truck_barrier(p, [a_l](double) { return a_l; });
}

Barrier truck_barrier(const TruckParams& p, LeaderAccel leader_accel) {
  Barrier barrier;
  barrier.value = [p](const Vector& x) { return x(0) - truck_headway(p, x(1), x(2)); };
  barrier.evaluate = [p, leader_accel = std::move(leader_accel)](double t, const Vector& x) {
    return truck_barrier_at(p, x, leader_accel(t));
  };
  return barrier;
}

double range_policy(const TruckParams& p, double d) {
  if (d < p.d_st) return 0.0;
  if (d > p.d_go) return p.v_bar_l;
  return p.kappa * (d - p.d_st);
}

double range_policy_inverse(const TruckParams& p, double v) {
  if (!(v > 0.0 && v < p.v_bar_l)) {
    throw DomainError("range policy is invertible only for 0 < v < v_bar_l");
  }
  return v / p.kappa + p.d_st;
}

double speed_policy(const TruckParams& p, double v_l) { return std::min(v_l, p.v_bar_l); }

double truck_nominal(const TruckParams& p, double d, double v, double v_l) {
  return p.A * (range_policy(p, d) - v) + p.B * (speed_policy(p, v_l) - v);
}

Controller truck_nominal_controller(const TruckParams& p) {
  return [p](double, const Vector& x) { return scalar(truck_nominal(p, x(0), x(1), x(2))); };
}

namespace {

double truck_filter_impl(const TruckParams& p, double robust_gain_inv, double d, double v,
                         double v_l, double a_l) {
  Vector x(3);
  x << d, v, v_l;
  const BarrierEvaluation be = truck_barrier_at(p, x, a_l);
  const double k_n = truck_nominal(p, d, v, v_l);
  const double lg = be.lg_h(0);
  const double alpha_h = p.alpha_c * be.h;
  if (lg < -kLgZeroTolerance) {
    const double k_s = -(be.lf_h + alpha_h) / lg + lg * robust_gain_inv;
    return std::min(k_n, k_s);
  }
  // Outside the domain of interest: general closed form.
  if (lg_is_zero(be.lg_h)) return k_n;
  const double eta = qp_multiplier(be, alpha_h, scalar(k_n)) + robust_gain_inv;
  return apply_correction(scalar(k_n), eta, be.lg_h)(0);
}

}  // namespace

double truck_safe_filter(const TruckParams& p, double d, double v, double v_l, double a_l) {
  return truck_filter_impl(p, 0.0, d, v, v_l, a_l);
}

double truck_robust_filter(const TruckParams& p, const EpsilonFunction& epsilon, double d,
                           double v, double v_l, double a_l) {
  const double h = d - truck_headway(p, v, v_l);
  return truck_filter_impl(p, epsilon.reciprocal(h), d, v, v_l, a_l);
}

double truck_robust_filter(const TruckParams& p, double d, double v, double v_l, double a_l) {
  return truck_robust_filter(p, EpsilonFunction::exponential(p.eps0, p.lambda), d, v, v_l, a_l);
}

}  // namespace cbfsim
