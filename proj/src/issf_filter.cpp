#include "cbfsim/issf_filter.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cbfsim/cbf_filter.hpp"

namespace cbfsim {

EpsilonFunction EpsilonFunction::constant(double eps0) { return exponential(eps0, 0.0); }

EpsilonFunction EpsilonFunction::exponential(double eps0, double lambda) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw DomainError("epsilon: eps0 must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("epsilon: lambda must be >= 0 (eps must be nondecreasing)");
  }
  return EpsilonFunction(lambda == 0.0 ? Kind::kConstant : Kind::kExponential, eps0, lambda);
}

EpsilonFunction EpsilonFunction::unbounded() {
  return EpsilonFunction(Kind::kUnbounded, std::numeric_limits<double>::infinity(), 0.0);
}

double EpsilonFunction::operator()(double r) const {
  if (kind_ == Kind::kUnbounded) return std::numeric_limits<double>::infinity();
  return eps0_ * std::exp(lambda_ * r);
}

double EpsilonFunction::reciprocal(double r) const {
  if (kind_ == Kind::kUnbounded) return 0.0;
  return std::exp(-lambda_ * r) / eps0_;
}

double EpsilonFunction::derivative(double r) const {
  if (kind_ == Kind::kUnbounded) return 0.0;
  return eps0_ * lambda_ * std::exp(lambda_ * r);
}

double gamma(const ClassKappaE& alpha, const EpsilonFunction& epsilon, double h_val, double delta) {
  if (!(delta >= 0.0)) throw DomainError("gamma: delta must be >= 0");
  if (delta == 0.0) return 0.0;
  return -alpha.inverse(-epsilon(h_val) * delta * delta / 4.0);
}

namespace {

std::string bracket_message(double lower, double upper, double g_lower, double g_upper) {
  std::ostringstream os;
  os << "h* root not bracketed on [" << lower << ", " << upper << "]: g(lower) = " << g_lower
     << ", g(upper) = " << g_upper;
  return os.str();
}

}  // namespace

RootNotBracketed::RootNotBracketed(double lower, double upper, double g_lower, double g_upper)
    : Error(bracket_message(lower, upper, g_lower, g_upper)), lower_(lower), upper_(upper) {}

double solve_h_star(const ClassKappaE& alpha, const EpsilonFunction& epsilon, double delta) {
  if (!(delta >= 0.0)) throw DomainError("solve_h_star: delta must be >= 0");
  if (delta == 0.0) return 0.0;

  const auto g = [&](double h) { return h + gamma(alpha, epsilon, h, delta); };
  double lo = kHStarLowerBracket;
  double hi = 0.0;
  double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_hi == 0.0) return hi;
  if (!(g_lo < 0.0 && g_hi > 0.0)) throw RootNotBracketed(lo, hi, g_lo, g_hi);

  // Bisect down to adjacent doubles; the |g| tolerance is checked afterwards.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    if (g_mid < 0.0) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  const double root = std::abs(g_lo) <= std::abs(g(hi)) ? lo : hi;
  const double residual = g(root);
  if (!(std::abs(residual) <= kHStarTolerance)) {
    throw RootNotBracketed(lo, hi, g_lo, g(hi));
  }
  return root;
}

bool in_c_delta(const ClassKappaE& alpha, const EpsilonFunction& epsilon, double h_val, double delta) {
  return h_val + gamma(alpha, epsilon, h_val, delta) >= 0.0;
}

IssfFilter::IssfFilter(Barrier barrier, ClassKappaE alpha, Controller nominal, EpsilonFunction epsilon)
    : barrier_(std::move(barrier)),
      alpha_(std::move(alpha)),
      nominal_(std::move(nominal)),
      epsilon_(epsilon) {
  if (!barrier_.evaluate || !nominal_) throw DomainError("IssfFilter needs a barrier and a nominal controller");
}

bool IssfFilter::in_admissible_set(const Vector& x, const Vector& u, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  return evaluate_hdot(be, u) >= -alpha_(be.h) + be.lg_h.squaredNorm() * epsilon_.reciprocal(be.h);
}

double IssfFilter::eta_bar(const Vector& x, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  if (lg_is_zero(be.lg_h)) return 0.0;
  return qp_multiplier(be, alpha_(be.h), nominal_(t, x)) + epsilon_.reciprocal(be.h);
}

Vector IssfFilter::robust_filter(const Vector& x, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  const Vector k_n = nominal_(t, x);
  double eta = 0.0;
  if (!lg_is_zero(be.lg_h)) eta = qp_multiplier(be, alpha_(be.h), k_n) + epsilon_.reciprocal(be.h);
  return apply_correction(k_n, eta, be.lg_h);
}

double IssfFilter::robust_filter_switching_single_input(const Vector& x, double t) const {
  const BarrierEvaluation be = barrier_.evaluate(t, x);
  const Vector k_n = nominal_(t, x);
  if (k_n.size() != 1) throw DimensionError("single-input switching form", 1, static_cast<std::size_t>(k_n.size()));
  if (be.lg_h.size() != 1) throw DimensionError("single-input switching form", 1, be.input_dim());
  return switched_single_input(be, alpha_(be.h), k_n(0), be.lg_h(0) * epsilon_.reciprocal(be.h));
}

Controller IssfFilter::as_controller() const {
  return [self = *this](double t, const Vector& x) { return self.robust_filter(x, t); };
}

}  // namespace cbfsim
