#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbfsim/core.hpp"
#include "cbfsim/plants.hpp"

namespace cbfsim {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const Interval&) const = default;
};

/// One evaluated axis of a certification grid.
struct GridAxis {
  std::string name;
  Interval range;
  std::size_t points = 0;
};

/// Result of checking L_g h = 0  =>  L_f h + alpha(h) > 0 on sampled states.
/// A grid check is evidence on the grid, not a global proof.
struct CertificationReport {
  bool passed = false;
  double min_margin = 0.0;
  Vector witness;              ///< state attaining min_margin
  std::vector<GridAxis> grid;  ///< evaluated grid
  std::string method;
  std::string note;            ///< e.g. "passed on grid"
};

/// Pendulum check along the line theta_dot = -(b / 2a) theta (elliptic form) or
/// theta_dot = 0 (no-cross-term form), using the closed-form margin.
/// The elliptic form passes iff alpha_c <= b/a and every sampled margin is > 0.
CertificationReport certify_pendulum(double a, double b, double alpha_c, Interval theta_range,
                                     PendulumBarrierForm form = PendulumBarrierForm::kElliptic,
                                     std::size_t samples = 2001);

/// Closed-form pendulum margin on the L_g h = 0 line, as a function of theta_0.
double pendulum_line_margin(double a, double b, double alpha_c, double theta0,
                            PendulumBarrierForm form = PendulumBarrierForm::kElliptic);

/// Truck margin at (D, v_L) with v implied by c1 + 2 c3 v + c4 v_L = 0, for one value of a_L.
double truck_line_margin(const TruckParams& p, double alpha_c, double d, double v_l, double a_l);

/// Grid check over (D, v_L), worst case over the two endpoints of a_l_bounds.
CertificationReport certify_truck_grid(const TruckParams& p, double alpha_c, Interval d_range,
                                       Interval vl_range, std::size_t d_points,
                                       std::size_t vl_points, Interval a_l_bounds);

/// Max relative error (unit floor) between analytic (L_f h, L_g h) and central
/// finite differences of h along f and g at state x.
double gradient_consistency(const ControlAffineDynamics& plant, const Barrier& barrier,
                            const Vector& x, double step, double t = 0.0);

}  // namespace cbfsim
