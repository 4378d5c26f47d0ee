#include "cbfsim/cbf_filter.hpp"

#include <algorithm>

namespace cbfsim {

bool lg_is_zero(const RowVector& lg_h) { return lg_h.norm() <= kLgZeroTolerance; }

double qp_multiplier(const BarrierEvaluation& be, double alpha_of_h, const Vector& nominal) {
  if (lg_is_zero(be.lg_h)) return 0.0;
  const double psi = evaluate_hdot(be, nominal) + alpha_of_h;
  return -psi / be.lg_h.squaredNorm();
}

Vector apply_correction(const Vector& nominal, double eta, const RowVector& lg_h) {
  if (nominal.size() != lg_h.size()) {
    throw DimensionError("apply_correction", static_cast<std::size_t>(lg_h.size()),
                         static_cast<std::size_t>(nominal.size()));
  }
  return nominal + std::max(0.0, eta) * lg_h.transpose();
}

double switched_single_input(const BarrierEvaluation& be, double alpha_of_h, double nominal,
                             double robust_term) {
  if (be.lg_h.size() != 1) {
    throw DimensionError("single-input switching form", 1, static_cast<std::size_t>(be.lg_h.size()));
  }
  const double lg = be.lg_h(0);
  if (std::abs(lg) <= kLgZeroTolerance) return nominal;
  const double safe = -(be.lf_h + alpha_of_h) / lg + robust_term;
  return lg > 0.0 ? std::max(nominal, safe) : std::min(nominal, safe);
}

CbfFilter::CbfFilter(Barrier barrier, ClassKappaE alpha, Controller nominal)
    : barrier_(std::move(barrier)), alpha_(std::move(alpha)), nominal_(std::move(nominal)) {
  if (!barrier_.evaluate || !nominal_) throw DomainError("CbfFilter needs a barrier and a nominal controller");
}

bool CbfFilter::in_admissible_set(const Vector& x, const Vector& u, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  return evaluate_hdot(be, u) >= -alpha_(be.h);
}

double CbfFilter::eta(const Vector& x, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  return qp_multiplier(be, alpha_(be.h), nominal_(t, x));
}

Vector CbfFilter::filter(const Vector& x, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  const Vector k_n = nominal_(t, x);
  return apply_correction(k_n, qp_multiplier(be, alpha_(be.h), k_n), be.lg_h);
}

double CbfFilter::filter_switching_single_input(const Vector& x, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  const Vector k_n = nominal_(t, x);
  if (k_n.size() != 1) throw DimensionError("single-input switching form", 1, static_cast<std::size_t>(k_n.size()));
  return switched_single_input(be, alpha_(be.h), k_n(0));
}

Controller CbfFilter::as_controller() const {
  return [self = *this](double t, const Vector& x) { return self.filter(x, t); };
}

}  // namespace cbfsim
