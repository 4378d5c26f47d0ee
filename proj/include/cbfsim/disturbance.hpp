#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cbfsim/core.hpp"

namespace cbfsim {

/// Query outside a signal's time domain.
class SignalDomainError : public Error {
 public:
  SignalDomainError(const std::string& what, double t);
  double time() const { return time_; }

 private:
  double time_;
};

/// Samples (t_k, y_k) with strictly increasing t_k.
struct SampledSignal {
  std::vector<double> t;
  std::vector<double> values;

  void validate() const;
  bool empty() const { return t.empty(); }
  double front_time() const { return t.front(); }
  double back_time() const { return t.back(); }
  /// Linear interpolation; throws SignalDomainError outside [t_0, t_N].
  double interpolate(double time) const;
  /// Zero-order hold: y_k for t_k <= time < t_{k+1}.
  double hold(double time) const;
};

/// Scalar input disturbance d(t), piecewise continuous on its domain.
class DisturbanceSignal {
 public:
  enum class Kind { kZero, kHeavisidePulse, kSampled, kLagResidual };

  DisturbanceSignal();  // zero

  static DisturbanceSignal zero();
  /// M on [0,5), 0 on [5,10), -M on [10,15), 0 afterwards.
  static DisturbanceSignal heaviside_pulse(double m_amp);
  /// Zero-order hold between samples; domain [t_0, t_N].
  static DisturbanceSignal sampled(SampledSignal samples);

  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }

  Kind kind() const { return kind_; }
  /// Declared sup-norm bound; exact for every shipped kind.
  double bound() const { return bound_; }
  double domain_start() const { return domain_start_; }
  double domain_end() const { return domain_end_; }
  double amplitude() const { return amplitude_; }
  const SampledSignal& samples() const { return samples_; }

 private:
  friend DisturbanceSignal lag_residual(const SampledSignal& commanded, double time_constant);

  Kind kind_;
  double amplitude_ = 0.0;
  SampledSignal samples_;
  double bound_ = 0.0;
  double domain_start_;
  double domain_end_;
};

/// Two-column CSV `t,d`, header required, strictly increasing t.
SampledSignal read_sampled_csv(std::istream& in, const std::string& value_column);
SampledSignal load_sampled_csv(const std::string& path, const std::string& value_column);
DisturbanceSignal load_disturbance_csv(const std::string& path);

/// max_t |measured(t) - commanded(t)| on the union of both sample grids inside
/// their overlap, with linear interpolation. No smoothing is applied.
double estimate_sup_norm(const SampledSignal& commanded, const SampledSignal& measured);

/// d = u_lag - u where tau u_lag' = u - u_lag, u_lag(t_0) = u(t_0), u held
/// constant between samples. Returned as a zero-order-hold signal on the
/// commanded grid.
DisturbanceSignal lag_residual(const SampledSignal& commanded, double time_constant);

}  // namespace cbfsim
