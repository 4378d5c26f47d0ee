#include "cbfsim/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cbfsim {

namespace {

std::string time_message(const std::string& what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (t = " << t << ")";
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double max_abs(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

SignalDomainError::SignalDomainError(const std::string& what, double t)
    : Error(time_message(what, t)), time_(t) {}

void SampledSignal::validate() const {
  if (t.empty()) throw DomainError("sampled signal has no samples");
  if (t.size() != values.size()) throw DomainError("sampled signal: time and value counts differ");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(values[i])) throw DomainError("sampled signal: non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("sampled signal: times must be strictly increasing");
  }
}

double SampledSignal::interpolate(double time) const {
  if (empty() || time < t.front() || time > t.back()) {
    throw SignalDomainError("sampled signal queried outside its domain", time);
  }
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  if (it == t.end()) return values.back();
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  if (k == 0) return values.front();
  const double w = (time - t[k - 1]) / (t[k] - t[k - 1]);
  return values[k - 1] + w * (values[k] - values[k - 1]);
}

double SampledSignal::hold(double time) const {
  if (empty() || time < t.front() || time > t.back()) {
    throw SignalDomainError("sampled signal queried outside its domain", time);
  }
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  return values[static_cast<std::size_t>(it - t.begin()) - 1];
}

DisturbanceSignal::DisturbanceSignal()
    : kind_(Kind::kZero), domain_start_(0.0), domain_end_(std::numeric_limits<double>::infinity()) {}

DisturbanceSignal DisturbanceSignal::zero() { return DisturbanceSignal(); }

DisturbanceSignal DisturbanceSignal::heaviside_pulse(double m_amp) {
  if (!(m_amp >= 0.0) || !std::isfinite(m_amp)) throw DomainError("heaviside pulse amplitude must be >= 0");
  DisturbanceSignal d;
  d.kind_ = Kind::kHeavisidePulse;
  d.amplitude_ = m_amp;
  d.bound_ = m_amp;
  return d;
}

DisturbanceSignal DisturbanceSignal::sampled(SampledSignal samples) {
  samples.validate();
  DisturbanceSignal d;
  d.kind_ = Kind::kSampled;
  d.bound_ = max_abs(samples.values);
  d.domain_start_ = samples.front_time();
  d.domain_end_ = samples.back_time();
  d.samples_ = std::move(samples);
  return d;
}

double DisturbanceSignal::evaluate(double t) const {
  if (t < domain_start_ || t > domain_end_ || std::isnan(t)) {
    throw SignalDomainError("disturbance queried outside its domain", t);
  }
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kHeavisidePulse: {
      // M (1 - s(t-5) - s(t-10) + s(t-15)) with s(0) = 1.
      const auto s = [](double tau) { return tau >= 0.0 ? 1.0 : 0.0; };
      return amplitude_ * (1.0 - s(t - 5.0) - s(t - 10.0) + s(t - 15.0));
    }
    case Kind::kSampled:
    case Kind::kLagResidual:
      return samples_.hold(t);
  }
  return 0.0;
}

SampledSignal read_sampled_csv(std::istream& in, const std::string& value_column) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("CSV: missing header");
  const std::string expected = "t," + value_column;
  std::string header = trim(line);
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  if (header != expected) throw DomainError("CSV: expected header '" + expected + "', got '" + trim(line) + "'");

  SampledSignal out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw DomainError("CSV line " + std::to_string(line_no) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      const std::string a = trim(row.substr(0, comma));
      const std::string b = trim(row.substr(comma + 1));
      const double t = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument("t");
      const double v = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument("value");
      out.t.push_back(t);
      out.values.push_back(v);
    } catch (const std::logic_error&) {
      throw DomainError("CSV line " + std::to_string(line_no) + ": not a number");
    }
  }
  out.validate();
  return out;
}

SampledSignal load_sampled_csv(const std::string& path, const std::string& value_column) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return read_sampled_csv(in, value_column);
}

DisturbanceSignal load_disturbance_csv(const std::string& path) {
  return DisturbanceSignal::sampled(load_sampled_csv(path, "d"));
}

double estimate_sup_norm(const SampledSignal& commanded, const SampledSignal& measured) {
  commanded.validate();
  measured.validate();
  const double lo = std::max(commanded.front_time(), measured.front_time());
  const double hi = std::min(commanded.back_time(), measured.back_time());
  if (!(lo <= hi)) throw DomainError("estimate_sup_norm: signals do not overlap in time");

  std::vector<double> grid;
  for (const auto* s : {&commanded, &measured}) {
    for (double t : s->t) {
      if (t >= lo && t <= hi) grid.push_back(t);
    }
  }
  grid.push_back(lo);
  grid.push_back(hi);
  double sup = 0.0;
  for (double t : grid) sup = std::max(sup, std::abs(measured.interpolate(t) - commanded.interpolate(t)));
  return sup;
}

DisturbanceSignal lag_residual(const SampledSignal& commanded, double time_constant) {
  commanded.validate();
  if (!(time_constant > 0.0) || !std::isfinite(time_constant)) {
    throw DomainError("lag_residual: time constant must be > 0");
  }
  const auto& u = commanded.values;
  SampledSignal residual;
  residual.t = commanded.t;
  residual.values.resize(u.size());
  double lagged = u.front();
  residual.values[0] = 0.0;
  for (std::size_t k = 1; k < u.size(); ++k) {
    // Exact response to the input held at u[k-1] over [t_{k-1}, t_k).
    const double decay = std::exp(-(commanded.t[k] - commanded.t[k - 1]) / time_constant);
    lagged = u[k - 1] + (lagged - u[k - 1]) * decay;
    residual.values[k] = lagged - u[k];
  }
  DisturbanceSignal d = DisturbanceSignal::sampled(std::move(residual));
  d.kind_ = DisturbanceSignal::Kind::kLagResidual;
  return d;
}

}  // namespace cbfsim
