#include "cbfsim/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbfsim {

namespace {

double grid_point(const Interval& range, std::size_t i, std::size_t n) {
  if (n == 1) return range.lower;
  return range.lower + (range.upper - range.lower) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void require_range(const Interval& r, const char* name) {
  if (!std::isfinite(r.lower) || !std::isfinite(r.upper) || r.lower > r.upper) {
    throw DomainError(std::string(name) + ": range must be finite with lower <= upper");
  }
}

}  // namespace

double pendulum_line_margin(double a, double b, double alpha_c, double theta0, PendulumBarrierForm form) {
  if (form == PendulumBarrierForm::kElliptic) {
    return alpha_c + 3.0 / (4.0 * a * a) * (b / a - alpha_c) * theta0 * theta0;
  }
  return alpha_c * (1.0 - theta0 * theta0 / (a * a));
}

CertificationReport certify_pendulum(double a, double b, double alpha_c, Interval theta_range,
                                     PendulumBarrierForm form, std::size_t samples) {
  if (!(a > 0.0) || !(b > 0.0) || !(alpha_c > 0.0)) {
    throw DomainError("certify_pendulum: a, b, alpha_c must be positive");
  }
  require_range(theta_range, "certify_pendulum theta range");
  if (samples < 2) throw DomainError("certify_pendulum: need at least 2 samples");

  const double slope = form == PendulumBarrierForm::kElliptic ? -b / (2.0 * a) : 0.0;
  CertificationReport report;
  report.method = form == PendulumBarrierForm::kElliptic ? "pendulum-line/elliptic" : "pendulum-line/no-cross-term";
  report.grid.push_back({"theta0", theta_range, samples});
  report.min_margin = std::numeric_limits<double>::infinity();
  report.witness = Vector::Zero(2);
  for (std::size_t i = 0; i < samples; ++i) {
    const double th = grid_point(theta_range, i, samples);
    const double margin = pendulum_line_margin(a, b, alpha_c, th, form);
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.witness << th, slope * th;
    }
  }
  const bool sufficient = form != PendulumBarrierForm::kElliptic || alpha_c <= b / a;
  report.passed = sufficient && report.min_margin > 0.0;
  report.note = report.passed ? "passed on grid" : "failed on grid";
  return report;
}

double truck_line_margin(const TruckParams& p, double alpha_c, double d, double v_l, double a_l) {
  const double v0 = (-p.c1 - p.c4 * v_l) / (2.0 * p.c3);
  return v_l - v0 - a_l * (p.c2 + p.c4 * v0 + 2.0 * p.c5 * v_l) +
         alpha_c * (d - truck_headway(p, v0, v_l));
}

CertificationReport certify_truck_grid(const TruckParams& p, double alpha_c, Interval d_range,
                                       Interval vl_range, std::size_t d_points,
                                       std::size_t vl_points, Interval a_l_bounds) {
  if (p.c3 == 0.0) throw DomainError("certify_truck_grid: c3 = 0, L_g h = 0 line has no v solution");
  if (d_points < 2 || vl_points < 2) throw DomainError("certify_truck_grid: need >= 2 points per axis");
  if (!(alpha_c >= 0.0)) throw DomainError("certify_truck_grid: alpha_c must be >= 0");
  require_range(d_range, "certify_truck_grid D range");
  require_range(vl_range, "certify_truck_grid v_L range");
  require_range(a_l_bounds, "certify_truck_grid a_L bounds");

  CertificationReport report;
  report.method = "truck-grid";
  report.grid = {{"D", d_range, d_points}, {"v_L", vl_range, vl_points}};
  report.min_margin = std::numeric_limits<double>::infinity();
  report.witness = Vector::Zero(3);
  for (std::size_t i = 0; i < d_points; ++i) {
    const double d = grid_point(d_range, i, d_points);
    for (std::size_t j = 0; j < vl_points; ++j) {
      const double v_l = grid_point(vl_range, j, vl_points);
      // The margin is affine in a_L, so its minimum sits at an endpoint.
      const double margin = std::min(truck_line_margin(p, alpha_c, d, v_l, a_l_bounds.lower),
                                     truck_line_margin(p, alpha_c, d, v_l, a_l_bounds.upper));
      if (margin < report.min_margin) {
        report.min_margin = margin;
        report.witness << d, (-p.c1 - p.c4 * v_l) / (2.0 * p.c3), v_l;
      }
    }
  }
  report.passed = report.min_margin > 0.0;
  report.note = report.passed ? "passed on grid" : "failed on grid";
  return report;
}

double gradient_consistency(const ControlAffineDynamics& plant, const Barrier& barrier,
                            const Vector& x, double step, double t) {
  if (!(step > 0.0)) throw DomainError("gradient_consistency: step must be > 0");
  const Eigen::Index n = x.size();
  RowVector grad(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector xp = x;
    Vector xm = x;
    xp(i) += step;
    xm(i) -= step;
    grad(i) = (barrier.value(xp) - barrier.value(xm)) / (2.0 * step);
  }
  const double lf_fd = grad.dot(plant.drift(t, x).transpose());
  const RowVector lg_fd = grad * plant.actuation(t, x);
  const BarrierEvaluation be = barrier.evaluate(t, x);

  const auto rel = [](double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
  };
  double worst = rel(be.lf_h, lf_fd);
  for (Eigen::Index j = 0; j < lg_fd.size(); ++j) worst = std::max(worst, rel(be.lg_h(j), lg_fd(j)));
  return worst;
}

}  // namespace cbfsim
