#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cbfsim {

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes that do not agree (e.g. input length != m).
class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t actual);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// A parameter outside its admissible range, rejected at construction.
class DomainError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Plant state vector. Every entry is finite; the dimension is fixed by the
/// plant (pendulum: theta, theta_dot; truck: D, v, v_L).
class SystemState {
 public:
  SystemState() = default;
  explicit SystemState(Vector values);
  SystemState(std::initializer_list<double> values);

  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

  bool operator==(const SystemState& other) const;

 private:
  Vector values_;
};

bool all_finite(const Vector& v);

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

/// x' = f(t, x) + g(t, x) u. Time enters only through exogenous signals
/// (the leader acceleration for the truck); both maps must be pure.
struct ControlAffineDynamics {
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::function<Vector(double t, const Vector& x)> drift;
  std::function<Matrix(double t, const Vector& x)> actuation;

  Vector evaluate(double t, const Vector& x, const Vector& u) const;
};

/// State feedback u = k(t, x).
using Controller = std::function<Vector(double t, const Vector& x)>;

// ---------------------------------------------------------------------------
// Class-K-infinity-extended functions
// ---------------------------------------------------------------------------

/// A strictly increasing function through the origin together with its
/// inverse. Only the linear family is shipped; `custom` accepts any pair.
class ClassKappaE {
 public:
  static ClassKappaE linear(double alpha_c);
  static ClassKappaE custom(std::function<double(double)> forward,
                            std::function<double(double)> inverse, std::string tag);

  double operator()(double r) const { return forward_(r); }
  double forward(double r) const { return forward_(r); }
  double inverse(double s) const { return inverse_(s); }
  const std::string& tag() const { return tag_; }
  /// Slope of the linear member; NaN for custom instances.
  double linear_coefficient() const { return coefficient_; }

 private:
  ClassKappaE(std::function<double(double)> forward, std::function<double(double)> inverse,
              std::string tag, double coefficient);

  std::function<double(double)> forward_;
  std::function<double(double)> inverse_;
  std::string tag_;
  double coefficient_;
};

/// Shorthand for ClassKappaE::linear.
ClassKappaE linear_class_kappa(double alpha_c);

// ---------------------------------------------------------------------------
// Barrier evaluations
// ---------------------------------------------------------------------------

/// (h, L_f h, L_g h) at one state: everything a safety filter needs.
struct BarrierEvaluation {
  double h = 0.0;
  double lf_h = 0.0;
  RowVector lg_h;

  std::size_t input_dim() const { return static_cast<std::size_t>(lg_h.size()); }
};

/// h'(x, u) = L_f h + L_g h u.
double evaluate_hdot(const BarrierEvaluation& be, const Vector& u);

/// A barrier h together with its analytic Lie derivatives. `value` is h alone
/// (used for finite-difference checks); `evaluate` adds L_f h and L_g h, which
/// may depend on time through exogenous signals.
struct Barrier {
  std::function<double(const Vector& x)> value;
  std::function<BarrierEvaluation(double t, const Vector& x)> evaluate;
};

/// ||L_g h||_2 at or below this is treated as zero by every filter.
inline constexpr double kLgZeroTolerance = 1e-12;

}  // namespace cbfsim
