#include "doctest.h"

#include <cmath>

#include "opsplit/errors.hpp"
#include "opsplit/inexact_drs.hpp"

using namespace opsplit;

namespace {

Point scalar(double x) { return Point::Constant(1, x); }

// A = normal cone of {0} in R (resolvent is the zero map), B = identity.
struct OneDim {
  BoxNormalCone a{scalar(0.0), scalar(0.0)};
  AffineOperator b{Matrix::Identity(1, 1), Point::Zero(1)};
};

DrsConfig one_dim_cfg() {
  DrsConfig cfg;
  cfg.gamma = 1.0;
  cfg.sigma = 0.5;
  cfg.tau0 = 1.0;
  return cfg;
}

// Returns x = z_prev, b = 0 and spends the whole budget on eps_b: feasible
// for the tau test but never good enough for the sigma test when A's
// resolvent maps everything to z_prev.
BSolver lazy_bsolver() {
  return [](const Point& z_prev, double tau, double gamma) -> BSolverOutput {
    return {z_prev, Point::Zero(z_prev.size()), tau / (2.0 * gamma), 0};
  };
}

}  // namespace

TEST_CASE("config validation") {
  DrsConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = [](auto mutate) {
    DrsConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](DrsConfig& c) { c.gamma = 0.0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](DrsConfig& c) { c.sigma = 1.0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](DrsConfig& c) { c.theta = 0.0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](DrsConfig& c) { c.tau0 = -1.0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](DrsConfig& c) { c.rho_tol = 0.0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](DrsConfig& c) { c.max_iter = 0; }).validate(), InputError);
}

TEST_CASE("one-dimensional hand-iterated run") {
  OneDim p;
  const DrsConfig cfg = one_dim_cfg();
  DrsState s = make_drs_state(scalar(2.0), cfg);
  const BSolver exact = exact_bsolver(p.b);
  const double expected[] = {1.0, 0.5, 0.25, 0.125};
  for (double z_expected : expected) {
    const double z_prev = s.z[0];
    CHECK(drs_iterate(s, cfg, exact, p.a) == StepType::kExtragradient);
    CHECK(s.last.x[0] == doctest::Approx(z_prev / 2.0));
    CHECK(s.last.b[0] == doctest::Approx(z_prev / 2.0));
    CHECK(s.last.y[0] == 0.0);
    CHECK(s.last.a[0] == doctest::Approx(0.0));
    CHECK(s.z[0] == doctest::Approx(z_expected));
    CHECK(s.tau == cfg.tau0);
    if (s.k == 1) {
      const auto c = embed_hpe(s, cfg);
      CHECK(c.z_tilde[0] == doctest::Approx(1.0));
      CHECK(c.v[0] == doctest::Approx(1.0));
      CHECK(c.eps == 0.0);
      CHECK(c.z_prev[0] == 2.0);
      CHECK(hpe_inequality_sides(c).lhs == doctest::Approx(0.0));
      CHECK(verify_hpe_inequality(c));
    }
    if (s.k == 2) {
      CHECK((s.last.x - s.last.y).norm() == doctest::Approx(0.5));
    }
    if (s.k == 3) {
      CHECK((s.last.x - s.last.y).norm() == doctest::Approx(0.25));
      CHECK_FALSE(check_termination(s.last.x, s.last.y, s.last.a, s.last.b, 0.0, s.last.eps_b, cfg));
    }
  }
  CHECK(s.beta == 0);
  CHECK(s.extragradient_history.size() == 4);
}

TEST_CASE("exact resolvents reproduce exact Douglas-Rachford") {
  // A = normal cone of the nullspace of (1, -1, 1), B = affine monotone map.
  Matrix m(3, 3);
  m << 2, 1, 0, 1, 3, -1, 0, -1, 1;
  const AffineOperator b(m, Point::Ones(3));
  Point k(3);
  k << 1, -1, 1;
  const NullspaceNormalCone a(k);
  DrsConfig cfg;
  cfg.gamma = 0.4;
  cfg.sigma = 0.3;
  Point z0(3);
  z0 << 1.0, -4.0, 2.5;
  DrsState s = make_drs_state(z0, cfg);
  Point z = z0;
  const BSolver exact = exact_bsolver(b);
  for (int it = 0; it < 25; ++it) {
    CHECK(drs_iterate(s, cfg, exact, a) == StepType::kExtragradient);
    const Point x = b.resolvent(cfg.gamma, z).x;
    const Point y = a.resolvent(cfg.gamma, 2.0 * x - z).x;
    z = z + y - x;
    CHECK((s.z - z).norm() <= 1e-12 * (1.0 + z.norm()));
    CHECK_NOTHROW(certify_extragradient(s, cfg));
    CHECK(hpe_inequality_sides(embed_hpe(s, cfg)).lhs <= 1e-20);
  }
}

TEST_CASE("lazy solver triggers only null steps and tau decays geometrically") {
  OneDim p;
  DrsConfig cfg = one_dim_cfg();
  cfg.theta = 0.1;
  cfg.tau0 = 4.0;
  DrsState s = make_drs_state(scalar(0.0), cfg);
  for (int it = 1; it <= 6; ++it) {
    const double tau_before = s.tau;
    CHECK(drs_iterate(s, cfg, lazy_bsolver(), p.a) == StepType::kNull);
    CHECK(s.last_tau_used == tau_before);
    CHECK(s.z[0] == 0.0);
    CHECK(s.beta == it);
    CHECK(s.tau == doctest::Approx(std::pow(0.1, it) * 4.0));
  }
  CHECK(s.extragradient_history.empty());
  CHECK_THROWS_AS(embed_hpe(s, cfg), StateError);
  CHECK_THROWS_AS(drs_ergodic(s), StateError);
}

TEST_CASE("contract and budget errors") {
  OneDim p;
  SUBCASE("tau inequality violated") {
    const DrsConfig cfg = one_dim_cfg();
    DrsState s = make_drs_state(scalar(1.0), cfg);
    const BSolver greedy = [](const Point& z, double tau, double gamma) -> BSolverOutput {
      return {z, Point::Zero(1), tau / gamma, 0};
    };
    CHECK_THROWS_AS(drs_iterate(s, cfg, greedy, p.a), ContractError);
  }
  SUBCASE("negative eps") {
    const DrsConfig cfg = one_dim_cfg();
    DrsState s = make_drs_state(scalar(1.0), cfg);
    const BSolver neg = [](const Point& z, double, double) -> BSolverOutput {
      return {z, Point::Zero(1), -1.0, 0};
    };
    CHECK_THROWS_AS(drs_iterate(s, cfg, neg, p.a), ContractError);
  }
  SUBCASE("wrong dimension") {
    const DrsConfig cfg = one_dim_cfg();
    DrsState s = make_drs_state(scalar(1.0), cfg);
    const BSolver wrong = [](const Point&, double, double) -> BSolverOutput {
      return {Point::Zero(2), Point::Zero(2), 0.0, 0};
    };
    CHECK_THROWS_AS(drs_iterate(s, cfg, wrong, p.a), InputError);
  }
  SUBCASE("budget") {
    DrsConfig cfg = one_dim_cfg();
    cfg.max_iter = 3;
    DrsState s = make_drs_state(scalar(0.0), cfg);
    for (int i = 0; i < 3; ++i) drs_iterate(s, cfg, lazy_bsolver(), p.a);
    CHECK_THROWS_AS(drs_iterate(s, cfg, lazy_bsolver(), p.a), BudgetError);
  }
  SUBCASE("non-finite start") {
    CHECK_THROWS_AS(make_drs_state(scalar(std::nan("")), one_dim_cfg()), InputError);
  }
}

TEST_CASE("termination test") {
  DrsConfig cfg;
  cfg.gamma = 2.0;
  cfg.rho_tol = 0.5;
  cfg.eps_tol = 1e-3;
  const Point x = scalar(1.0);
  SUBCASE("exact solution") {
    CHECK(check_termination(x, x, scalar(3.0), scalar(-3.0), 0.0, 0.0, cfg));
  }
  SUBCASE("residual exactly at the tolerance") {
    // gamma (a + b) = x - y = 0.5
    CHECK(check_termination(x, scalar(0.5), scalar(0.1), scalar(0.15), 0.0, 0.0, cfg));
  }
  SUBCASE("eps too large") {
    CHECK_FALSE(check_termination(x, x, scalar(0.0), scalar(0.0), 6e-4, 6e-4, cfg));
  }
  SUBCASE("corrupted quadruple") {
    CHECK_THROWS_AS(check_termination(x, scalar(0.0), scalar(0.0), scalar(0.0), 0.0, 0.0, cfg),
                    ContractError);
  }
}

TEST_CASE("ergodic averages over extragradient steps") {
  OneDim p;
  const DrsConfig cfg = one_dim_cfg();
  DrsState s = make_drs_state(scalar(2.0), cfg);
  const BSolver exact = exact_bsolver(p.b);
  drs_iterate(s, cfg, exact, p.a);
  SUBCASE("single step") {
    const auto e = drs_ergodic(s);
    CHECK(e.x == s.last.x);
    CHECK(e.y == s.last.y);
    CHECK(e.eps_a == 0.0);
    CHECK(e.eps_b == s.last.eps_b);
  }
  SUBCASE("identity survives averaging and eps matches the transportation formula") {
    for (int i = 0; i < 4; ++i) drs_iterate(s, cfg, exact, p.a);
    const auto e = drs_ergodic(s);
    CHECK((cfg.gamma * (e.a + e.b) - (e.x - e.y)).norm() < 1e-14);
    std::vector<EnlargementTriple> tb, ta;
    for (const auto& q : s.extragradient_history) {
      tb.push_back({q.x, q.b, q.eps_b});
      ta.push_back({q.y, q.a, 0.0});
    }
    const std::vector<double> w(tb.size(), 1.0 / static_cast<double>(tb.size()));
    CHECK(e.eps_b == doctest::Approx(transport_ergodic(tb, w).eps).epsilon(1e-12));
    CHECK(e.eps_a == doctest::Approx(transport_ergodic(ta, w).eps).epsilon(1e-12));
    // x_l = z_{l-1}/2 with z = 2, 1, 0.5, 0.25, 0.125: the b-part is
    // (1/5) sum (x_l - xbar) x_l, the variance of x.
    const double xs[] = {1.0, 0.5, 0.25, 0.125, 0.0625};
    double mean = 0.0, var = 0.0;
    for (double v : xs) mean += v / 5.0;
    for (double v : xs) var += (v - mean) * (v - mean) / 5.0;
    CHECK(e.eps_b == doctest::Approx(var));
  }
  SUBCASE("null steps are excluded") {
    drs_iterate(s, cfg, lazy_bsolver(), p.a);
    CHECK(s.step_log.back() == StepType::kNull);
    CHECK(s.extragradient_history.size() == 1);
    CHECK(drs_ergodic(s).x == s.extragradient_history.front().x);
  }
}

TEST_CASE("null-step bounds") {
  SUBCASE("sigma 0.5, beta 0") {
    const auto b = null_step_bounds(1.0, 0.5, 0, 0.01);
    CHECK(b.residual == doctest::Approx(3.0));
    CHECK(b.eps == doctest::Approx(0.5));
  }
  SUBCASE("sigma 1 limit") {
    CHECK(null_step_bounds(1.0, 1.0, 0, 0.3).residual == doctest::Approx(2.0));
  }
  SUBCASE("theta 0.01, beta 2") {
    CHECK(null_step_bounds(1.0, 0.99, 2, 0.01).eps == doctest::Approx(5e-5));
  }
  SUBCASE("sigma must be positive") {
    CHECK_THROWS_AS(null_step_bounds(1.0, 0.0, 0, 0.5), DomainError);
  }
}

TEST_CASE("step type names") {
  CHECK(std::string(to_string(StepType::kExtragradient)) == "extragradient");
  CHECK(std::string(to_string(StepType::kNull)) == "null");
}
