#include "doctest.h"

#include <cmath>

#include "opsplit/baselines.hpp"
#include "opsplit/errors.hpp"

using namespace opsplit;

namespace {

QpInstance two_dim() {
  QpInstance inst;
  inst.Q = Matrix::Identity(2, 2);
  inst.k.resize(2);
  inst.k << 1.0, -1.0;
  return inst;
}

}  // namespace

TEST_CASE("parameter settings") {
  const auto inst = generate_instance(20, true, 8);
  const auto tos = tos_config(inst);
  CHECK(tos.gamma == doctest::Approx(1.99 * tos.beta));
  CHECK(tos.beta == doctest::Approx(estimate_eta(inst.Q)));
  CHECK(tos.lambda == 1.0);
  const auto rf = rfdrs_config(inst);
  CHECK(rf.gamma == doctest::Approx(1.99 * rf.beta));
  CHECK(rf.beta == doctest::Approx(estimate_beta_V(inst.Q, inst.k)));
  // Restricting Q to a hyperplane cannot raise its norm.
  CHECK(rf.beta >= tos.beta * (1.0 - 1e-9));
  QpInstance zero = inst;
  zero.Q.setZero();
  CHECK_THROWS_AS(tos_config(zero), InputError);
}

TEST_CASE("one hand iteration from the origin") {
  const auto inst = two_dim();
  const BaselineConfig cfg{0.7, 1.0, 0.7 / 1.99};
  SUBCASE("three-operator splitting") {
    const Point z = tos_iterate(Point::Zero(2), inst, cfg);
    CHECK(z[0] == doctest::Approx(-0.7));
    CHECK(z[1] == doctest::Approx(-0.7));
    // (-0.7, -0.7) is a fixed point: x_B = 0 and x_A = P_M(0.7 - 0.7) = 0.
    CHECK((tos_iterate(z, inst, cfg) - z).norm() < 1e-15);
  }
  SUBCASE("relaxed forward Douglas-Rachford") {
    // x = 0, P_M(e) = e, P_X(-gamma e) = 0, so the origin is fixed.
    const Point z = rfdrs_iterate(Point::Zero(2), inst, cfg);
    CHECK(z.norm() == 0.0);
  }
  SUBCASE("dimension check") {
    CHECK_THROWS_AS(tos_iterate(Point::Zero(3), inst, cfg), InputError);
    CHECK_THROWS_AS(rfdrs_iterate(Point::Zero(3), inst, cfg), InputError);
  }
}

TEST_CASE("converged baselines match the reference on n = 10") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = generate_instance(10, true, seed);
    const Point xs = reference_solution(inst);
    const Point z0 = initial_point(inst);
    const auto tos = run_baseline(Baseline::kTos, inst, tos_config(inst), z0, 1e-10);
    CHECK((tos.solution - xs).norm() <= 1e-6);
    const auto rf = run_baseline(Baseline::kRfdrs, inst, rfdrs_config(inst), z0, 1e-10);
    CHECK((rf.solution - xs).norm() <= 1e-5);
    CHECK(tos.iterations == static_cast<long>(tos.residuals.size()));
    CHECK(tos.final_residual <= 1e-10);
  }
}

TEST_CASE("fixed-point residuals are eventually nonincreasing") {
  for (std::uint64_t seed = 31; seed <= 36; ++seed) {
    const auto inst = generate_instance(25, true, seed);
    Point z = initial_point(inst);
    for (Baseline algo : {Baseline::kTos, Baseline::kRfdrs}) {
      const auto cfg = algo == Baseline::kTos ? tos_config(inst) : rfdrs_config(inst);
      // Run past the tolerance so the tail is long enough to inspect.
      Point w = z;
      std::vector<double> r;
      for (int it = 0; it < 200; ++it) {
        const Point next = algo == Baseline::kTos ? tos_iterate(w, inst, cfg) : rfdrs_iterate(w, inst, cfg);
        r.push_back((next - w).norm());
        w = next;
      }
      for (std::size_t i = 51; i < r.size(); ++i) CHECK(r[i] <= r[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("budget and tolerance errors") {
  const auto inst = generate_instance(30, true, 2);
  const Point z0 = initial_point(inst);
  CHECK_THROWS_AS(run_baseline(Baseline::kTos, inst, tos_config(inst), z0, 1e-14, 2), BudgetError);
  CHECK_THROWS_AS(run_baseline(Baseline::kTos, inst, tos_config(inst), z0, 0.0), InputError);
}

TEST_CASE("solution read-outs") {
  const auto inst = two_dim();
  Point z(2);
  z << 12.0, -3.0;
  CHECK(tos_solution(z, inst) == Point((Point(2) << 10.0, 0.0).finished()));
  const Point p = rfdrs_solution(z, inst);
  CHECK(std::abs(inst.k.dot(p)) < 1e-14);
}
