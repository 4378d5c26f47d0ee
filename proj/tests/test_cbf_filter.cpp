#include "doctest.h"

#include <cmath>
#include <random>

#include "cbfsim/cbf_filter.hpp"
#include "cbfsim/plants.hpp"
#include "oracles.hpp"

using namespace cbfsim;

namespace {

CbfFilter pendulum_filter(PendulumBarrierForm form = PendulumBarrierForm::kElliptic) {
  const PendulumParams p;
  return CbfFilter(pendulum_barrier(p, form), linear_class_kappa(p.alpha_c), pendulum_nominal(p));
}

// Two inputs acting on a planar single integrator; h = 1 - |x|^2.
CbfFilter planar_filter(Vector k_n) {
  Barrier bar;
  bar.value = [](const Vector& x) { return 1.0 - x.squaredNorm(); };
  bar.evaluate = [](double, const Vector& x) {
    BarrierEvaluation be;
    be.h = 1.0 - x.squaredNorm();
    be.lf_h = -2.0 * x(0) * x(1);  // drift f = (x1, 0)
    be.lg_h = -2.0 * x.transpose();
    return be;
  };
  return CbfFilter(bar, linear_class_kappa(0.5), [k_n](double, const Vector&) { return k_n; });
}

}  // namespace

TEST_CASE("admissible set membership") {
  const CbfFilter f = pendulum_filter();
  CHECK(f.in_admissible_set(Vector::Zero(2), Vector::Zero(1)));

  // x = (0.25, 0.5): h = -3, L_g h = -2.5 / 2, so a large positive torque drives hdot down.
  Vector x(2);
  x << 0.25, 0.5;
  CHECK_FALSE(f.in_admissible_set(x, Vector::Constant(1, 100.0)));
  CHECK_THROWS_AS(f.in_admissible_set(x, Vector::Zero(2)), DimensionError);
}

TEST_CASE("admissible set boundary is included") {
  // Lf = 1, Lg = 2, alpha(h) = 0.5 h with h = 2: hdot = -1 at u = -1.
  Barrier bar;
  bar.value = [](const Vector&) { return 2.0; };
  bar.evaluate = [](double, const Vector&) { return BarrierEvaluation{2.0, 1.0, RowVector::Constant(1, 2.0)}; };
  const CbfFilter f(bar, linear_class_kappa(0.5), [](double, const Vector&) { return Vector::Zero(1); });
  CHECK(f.in_admissible_set(Vector::Zero(1), Vector::Constant(1, -1.0)));
  CHECK_FALSE(f.in_admissible_set(Vector::Zero(1), Vector::Constant(1, -1.0 - 1e-9)));
}

TEST_CASE("eta is zero when L_g h vanishes") {
  // On theta_dot = -(b / 2a) theta the elliptic pendulum barrier has L_g h = 0.
  const CbfFilter f = pendulum_filter();
  Vector x(2);
  x << 0.1, -0.1;
  CHECK(f.eta(x) == 0.0);
  CHECK(f.filter(x)(0) == doctest::Approx(f.nominal()(0.0, x)(0)));
}

TEST_CASE("eta at the pendulum initial state") {
  const CbfFilter f = pendulum_filter();
  Vector x(2);
  x << -0.1, 0.5;
  const auto hand = oracle::pendulum_hand(-0.1, 0.5);
  CHECK(hand.h == doctest::Approx(0.24));
  CHECK(hand.lg == doctest::Approx(-1.6));
  CHECK(hand.kn == doctest::Approx(1.516668).epsilon(1e-6));

  const double psi = hand.lf + hand.lg * hand.kn + 0.2 * hand.h;
  CHECK(psi > 0.0);
  CHECK(f.eta(x) == doctest::Approx(-psi / (hand.lg * hand.lg)).epsilon(1e-12));
  CHECK(f.eta(x) < 0.0);

  const double mu = oracle::kkt_multiplier(Vector::Constant(1, hand.kn), RowVector::Constant(1, hand.lg),
                                           -hand.lf - 0.2 * hand.h);
  CHECK(std::max(0.0, f.eta(x)) == doctest::Approx(mu).epsilon(1e-12));
  CHECK(f.filter(x)(0) == doctest::Approx(hand.kn).epsilon(1e-14));
}

TEST_CASE("eta matches the KKT multiplier where the constraint binds") {
  const CbfFilter f = pendulum_filter();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(-0.4, 0.4), thd(-1.0, 1.0);
  int active = 0;
  for (int k = 0; k < 2000; ++k) {
    Vector x(2);
    x << th(rng), thd(rng);
    const auto hd = oracle::pendulum_hand(x(0), x(1));
    const double mu = oracle::kkt_multiplier(Vector::Constant(1, hd.kn), RowVector::Constant(1, hd.lg),
                                             -hd.lf - 0.2 * hd.h);
    if (mu > 0.0) ++active;
    CHECK(std::max(0.0, f.eta(x)) == doctest::Approx(mu).epsilon(1e-9));
  }
  CHECK(active > 100);
}

TEST_CASE("filter leaves an admissible nominal untouched and otherwise lands on the boundary") {
  const CbfFilter f = pendulum_filter();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(-0.4, 0.4), thd(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    Vector x(2);
    x << th(rng), thd(rng);
    const Vector kn = f.nominal()(0.0, x);
    const Vector u = f.filter(x);
    const BarrierEvaluation be0 = f.barrier().evaluate(0.0, x);
    CHECK(evaluate_hdot(be0, u) + 0.2 * be0.h >= -1e-9);
    if (f.in_admissible_set(x, kn)) {
      CHECK(u(0) == kn(0));
    } else {
      const BarrierEvaluation be = f.barrier().evaluate(0.0, x);
      CHECK(evaluate_hdot(be, u) == doctest::Approx(-0.2 * be.h).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("switching form equals the closed form for one input") {
  const CbfFilter f = pendulum_filter();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(-0.5, 0.5), thd(-1.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    Vector x(2);
    x << th(rng), thd(rng);
    const double a = f.filter(x)(0);
    const double b = f.filter_switching_single_input(x);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("switching form rejects multi-input plants") {
  const CbfFilter f = planar_filter(Vector::Zero(2));
  CHECK_THROWS_AS(f.filter_switching_single_input(Vector::Constant(2, 0.3)), DimensionError);
}

TEST_CASE("multi-input filter is the Euclidean projection onto the half-space") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    Vector kn(2);
    kn << U(rng), U(rng);
    const CbfFilter f = planar_filter(kn);
    Vector x(2);
    x << 0.5 * U(rng), 0.5 * U(rng);
    const BarrierEvaluation be = f.barrier().evaluate(0.0, x);
    const Vector expect = oracle::kkt_projection(kn, be.lg_h, -be.lf_h - 0.5 * be.h);
    CHECK((f.filter(x) - expect).norm() <= 1e-10);
  }
}

TEST_CASE("as_controller forwards time and state") {
  const CbfFilter f = pendulum_filter();
  const Controller k = f.as_controller();
  Vector x(2);
  x << 0.2, 0.3;
  CHECK(k(1.5, x)(0) == f.filter(x, 1.5)(0));
}

TEST_CASE("construction needs a barrier and a nominal controller") {
  CHECK_THROWS_AS(CbfFilter(Barrier{}, linear_class_kappa(1.0), pendulum_nominal(PendulumParams{})), DomainError);
}
