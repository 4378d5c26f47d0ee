#pragma once

#include "cbfsim/core.hpp"

namespace cbfsim {

/// Robustness gain eps(r) = eps0 * exp(lambda * r), eps0 > 0, lambda >= 0.
/// The constant kind is lambda = 0. `unbounded()` is eps = +inf, i.e. no
/// robustness term, which collapses the ISSf filter onto the plain CBF filter.
class EpsilonFunction {
 public:
  enum class Kind { kConstant, kExponential, kUnbounded };

  static EpsilonFunction constant(double eps0);
  static EpsilonFunction exponential(double eps0, double lambda);
  static EpsilonFunction unbounded();

  double operator()(double r) const;
  /// 1 / eps(r), evaluated without overflow for the unbounded kind.
  double reciprocal(double r) const;
  double derivative(double r) const;

  Kind kind() const { return kind_; }
  double eps0() const { return eps0_; }
  double lambda() const { return lambda_; }

 private:
  EpsilonFunction(Kind kind, double eps0, double lambda) : kind_(kind), eps0_(eps0), lambda_(lambda) {}

  Kind kind_;
  double eps0_;
  double lambda_;
};

/// gamma(h, delta) = -alpha^{-1}(-eps(h) delta^2 / 4). Nonnegative; zero iff delta = 0.
double gamma(const ClassKappaE& alpha, const EpsilonFunction& epsilon, double h_val, double delta);

/// Thrown when h + gamma(h, delta) has no sign change on the search bracket.
class RootNotBracketed : public Error {
 public:
  RootNotBracketed(double lower, double upper, double g_lower, double g_upper);
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

inline constexpr double kHStarLowerBracket = -1e6;
inline constexpr double kHStarTolerance = 1e-8;

/// Root h* <= 0 of h + gamma(h, delta) = 0, by bisection on [-1e6, 0].
double solve_h_star(const ClassKappaE& alpha, const EpsilonFunction& epsilon, double delta);

/// h + gamma(h, delta) >= 0.
bool in_c_delta(const ClassKappaE& alpha, const EpsilonFunction& epsilon, double h_val, double delta);

/// QP filter with the tightened constraint
///   h'(x, u) >= -alpha(h) + ||L_g h||^2 / eps(h).
class IssfFilter {
 public:
  IssfFilter(Barrier barrier, ClassKappaE alpha, Controller nominal, EpsilonFunction epsilon);

  /// Membership in the ISSf admissible input set (non-strict).
  bool in_admissible_set(const Vector& x, const Vector& u, double t = 0.0) const;

  double eta_bar(const Vector& x, double t = 0.0) const;
  Vector robust_filter(const Vector& x, double t = 0.0) const;
  double robust_filter_switching_single_input(const Vector& x, double t = 0.0) const;

  const Barrier& barrier() const { return barrier_; }
  const ClassKappaE& alpha() const { return alpha_; }
  const Controller& nominal() const { return nominal_; }
  const EpsilonFunction& epsilon() const { return epsilon_; }

  Controller as_controller() const;

 private:
  Barrier barrier_;
  ClassKappaE alpha_;
  Controller nominal_;
  EpsilonFunction epsilon_;
};

}  // namespace cbfsim
