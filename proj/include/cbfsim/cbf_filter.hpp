#pragma once

#include "cbfsim/core.hpp"

namespace cbfsim {

// Pointwise building blocks shared by the CBF and ISSf filters. They work on a
// single BarrierEvaluation so plant-specific code (the truck) can reuse them.

/// eta = -(L_f h + L_g h k_n + alpha(h)) / ||L_g h||^2, or 0 when L_g h = 0.
double qp_multiplier(const BarrierEvaluation& be, double alpha_of_h, const Vector& nominal);

/// k_n + max{0, eta} L_g h^T.
Vector apply_correction(const Vector& nominal, double eta, const RowVector& lg_h);

/// Sign-switched single-input form. `robust_term` is the extra L_g h / eps(h)
/// added by the ISSf variant (0 for plain CBF filtering).
double switched_single_input(const BarrierEvaluation& be, double alpha_of_h, double nominal,
                             double robust_term = 0.0);

bool lg_is_zero(const RowVector& lg_h);

/// Minimum-norm modification of a nominal controller subject to
/// h' >= -alpha(h). Immutable; safe to share between threads.
class CbfFilter {
 public:
  CbfFilter(Barrier barrier, ClassKappaE alpha, Controller nominal);

  /// h'(x, u) >= -alpha(h(x)), non-strict.
  bool in_admissible_set(const Vector& x, const Vector& u, double t = 0.0) const;

  double eta(const Vector& x, double t = 0.0) const;

  /// Closed-form QP solution.
  Vector filter(const Vector& x, double t = 0.0) const;

  /// max/min form for m = 1; throws DimensionError otherwise.
  double filter_switching_single_input(const Vector& x, double t = 0.0) const;

  const Barrier& barrier() const { return barrier_; }
  const ClassKappaE& alpha() const { return alpha_; }
  const Controller& nominal() const { return nominal_; }

  /// The filter as a closed-loop controller.
  Controller as_controller() const;

 private:
  Barrier barrier_;
  ClassKappaE alpha_;
  Controller nominal_;
};

}  // namespace cbfsim
