#include "cbfsim/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cbfsim {

namespace {

std::string dimension_message(const std::string& what, std::size_t expected, std::size_t actual) {
  std::ostringstream os;
  os << what << ": expected dimension " << expected << ", got " << actual;
  return os.str();
}

}  // namespace

DimensionError::DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
    : Error(dimension_message(what, expected, actual)), expected_(expected), actual_(actual) {}

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) return false;
  }
  return true;
}

SystemState::SystemState(Vector values) : values_(std::move(values)) {
  if (!all_finite(values_)) throw DomainError("SystemState: non-finite entry");
}

SystemState::SystemState(std::initializer_list<double> values)
    : SystemState(Vector::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

bool SystemState::operator==(const SystemState& other) const {
  return values_.size() == other.values_.size() && values_ == other.values_;
}

Vector ControlAffineDynamics::evaluate(double t, const Vector& x, const Vector& u) const {
  if (static_cast<std::size_t>(x.size()) != state_dim) {
    throw DimensionError("ControlAffineDynamics state", state_dim, static_cast<std::size_t>(x.size()));
  }
  if (static_cast<std::size_t>(u.size()) != input_dim) {
    throw DimensionError("ControlAffineDynamics input", input_dim, static_cast<std::size_t>(u.size()));
  }
  return drift(t, x) + actuation(t, x) * u;
}

ClassKappaE::ClassKappaE(std::function<double(double)> forward,
                         std::function<double(double)> inverse, std::string tag,
                         double coefficient)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      tag_(std::move(tag)),
      coefficient_(coefficient) {}

ClassKappaE ClassKappaE::linear(double alpha_c) {
  if (!(alpha_c > 0.0) || !std::isfinite(alpha_c)) {
    throw DomainError("linear class-K function needs alpha_c > 0");
  }
  return ClassKappaE([alpha_c](double r) { return alpha_c * r; },
                     [alpha_c](double s) { return s / alpha_c; }, "linear", alpha_c);
}

ClassKappaE ClassKappaE::custom(std::function<double(double)> forward,
                                std::function<double(double)> inverse, std::string tag) {
  if (!forward || !inverse) throw DomainError("class-K function needs forward and inverse maps");
  return ClassKappaE(std::move(forward), std::move(inverse), std::move(tag),
                     std::numeric_limits<double>::quiet_NaN());
}

ClassKappaE linear_class_kappa(double alpha_c) { return ClassKappaE::linear(alpha_c); }

double evaluate_hdot(const BarrierEvaluation& be, const Vector& u) {
  if (be.lg_h.size() != u.size()) {
    throw DimensionError("evaluate_hdot input", static_cast<std::size_t>(be.lg_h.size()),
                         static_cast<std::size_t>(u.size()));
  }
  return be.lf_h + be.lg_h.dot(u.transpose());
}

}  // namespace cbfsim
