#include "doctest.h"

#include <cmath>
#include <vector>

#include "opsplit/errors.hpp"
#include "opsplit/hpe.hpp"

using namespace opsplit;

namespace {

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

}  // namespace

TEST_CASE("relative-error inequality") {
  SUBCASE("exact proximal step passes for sigma 0") {
    const Point zp = vec({1.0, -2.0}), zt = vec({0.5, 0.5});
    const double lambda = 0.7;
    const HpeStepCertificate c{zp, zt, (zp - zt) / lambda, 0.0, lambda, 0.0};
    CHECK(verify_hpe_inequality(c));
    CHECK(hpe_inequality_sides(c).lhs == doctest::Approx(0.0));
  }
  SUBCASE("no movement with nonzero v fails") {
    const Point zp = vec({1.0});
    for (double sigma : {0.0, 0.5, 0.999}) {
      CHECK_FALSE(verify_hpe_inequality({zp, zp, vec({0.1}), 0.0, 1.0, sigma}));
    }
  }
  SUBCASE("hand-evaluated case") {
    const HpeStepCertificate c{vec({0.0}), vec({1.0}), vec({-0.5}), 0.1, 1.0, 0.99};
    const auto s = hpe_inequality_sides(c);
    CHECK(s.lhs == doctest::Approx(0.45));
    CHECK(s.rhs == doctest::Approx(0.9801));
    CHECK(verify_hpe_inequality(c));
  }
  SUBCASE("too much eps fails") {
    CHECK_FALSE(verify_hpe_inequality({vec({0.0}), vec({1.0}), vec({-0.5}), 0.4, 1.0, 0.99}));
  }
  SUBCASE("negative eps is rejected") {
    CHECK_FALSE(verify_hpe_inequality({vec({0.0}), vec({1.0}), vec({-1.0}), -0.1, 1.0, 0.5}));
  }
}

TEST_CASE("extragradient update") {
  CHECK(hpe_update(vec({3.0, 4.0}), vec({0.0, 0.0}), 2.0) == vec({3.0, 4.0}));
  CHECK(hpe_update(vec({2.0, 0.0}), vec({1.0, 1.0}), 1.0) == vec({1.0, -1.0}));
  CHECK_THROWS_AS(hpe_update(vec({2.0, 0.0}), vec({1.0}), 1.0), InputError);
}

TEST_CASE("ergodic accumulator") {
  ErgodicAccumulator acc;
  CHECK(acc.empty());
  CHECK_THROWS_AS(acc.read(), StateError);
  CHECK_THROWS_AS(acc.push(vec({1.0}), vec({1.0}), 0.0, 0.0), InputError);

  SUBCASE("one push") {
    acc.push(vec({1.0, 2.0}), vec({-1.0, 0.5}), 0.3, 2.0);
    const auto r = acc.read();
    CHECK(r.z == vec({1.0, 2.0}));
    CHECK(r.v == vec({-1.0, 0.5}));
    CHECK(r.eps == doctest::Approx(0.3));
    CHECK(acc.lambda_sum() == 2.0);
  }
  SUBCASE("mirrored pair with equal stepsizes") {
    acc.push(vec({1.0}), vec({1.0}), 0.0, 0.5);
    acc.push(vec({-1.0}), vec({-1.0}), 0.0, 0.5);
    const auto r = acc.read();
    CHECK(r.z[0] == 0.0);
    CHECK(r.v[0] == 0.0);
    CHECK(r.eps == doctest::Approx(1.0));
    CHECK(acc.size() == 2);
  }
  SUBCASE("agrees with the transportation formula") {
    Rng rng(99);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::vector<EnlargementTriple> triples;
    std::vector<double> lambdas;
    // Triples from the graph of a monotone linear map keep eps-bar >= 0.
    Matrix m(3, 3);
    m << 2, 1, 0, -1, 1, 0, 0, 0, 3;
    for (int i = 0; i < 12; ++i) {
      Point z(3);
      for (int c = 0; c < 3; ++c) z[c] = g(rng);
      const double eps = u(rng) - 0.1;
      const double lambda = u(rng);
      triples.push_back({z, m * z, eps});
      lambdas.push_back(lambda);
      acc.push(z, m * z, eps, lambda);
    }
    double total = 0.0;
    for (double l : lambdas) total += l;
    std::vector<double> w;
    for (double l : lambdas) w.push_back(l / total);
    const auto a = acc.read();
    const auto b = transport_ergodic(triples, w);
    CHECK((a.z - b.z).norm() < 1e-12);
    CHECK((a.v - b.v).norm() < 1e-12);
    CHECK(std::abs(a.eps - b.eps) < 1e-12);
  }
}

TEST_CASE("pointwise envelope") {
  SUBCASE("sigma 0 collapses") {
    const auto b = pointwise_bound({1.0, 1.0, 0.0, 0.0}, 1);
    CHECK(b.residual == doctest::Approx(1.0));
    CHECK(b.eps == 0.0);
  }
  SUBCASE("sigma 0.99, j 100") {
    const auto b = pointwise_bound({1.0, 1.0, 0.99, 0.0}, 100);
    CHECK(b.residual == doctest::Approx(1.41067359796658844).epsilon(1e-13));
    CHECK(b.eps == doctest::Approx(0.246256281407035176).epsilon(1e-13));
  }
  SUBCASE("doubling j divides the residual bound by sqrt 2") {
    const RateEnvelope env{3.0, 0.5, 0.7, 0.0};
    CHECK(pointwise_bound(env, 7).residual / pointwise_bound(env, 14).residual ==
          doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("domain checks") {
    CHECK_THROWS_AS(pointwise_bound({1.0, 1.0, 1.0, 0.0}, 1), DomainError);
    CHECK_THROWS_AS(pointwise_bound({1.0, 1.0, 0.5, 0.0}, 0), InputError);
    CHECK_THROWS_AS(pointwise_bound({1.0, 0.0, 0.5, 0.0}, 1), InputError);
  }
}

TEST_CASE("ergodic envelope") {
  SUBCASE("sigma 0") {
    const auto b = ergodic_bound({3.0, 2.0, 0.0, 0.0}, 5);
    CHECK(b.eps == doctest::Approx(2.0 * 9.0 / 10.0));
  }
  SUBCASE("residual part") {
    CHECK(ergodic_bound({1.0, 1.0, 0.3, 0.0}, 4).residual == doctest::Approx(0.5));
  }
  SUBCASE("sigma 0.99, d0 2, j 10") {
    CHECK(ergodic_bound({2.0, 1.0, 0.99, 0.0}, 10).eps ==
          doctest::Approx(6.41433914366602).epsilon(1e-12));
  }
  SUBCASE("sigma 1 is outside the domain") {
    CHECK_THROWS_AS(ergodic_bound({1.0, 1.0, 1.0, 0.0}, 3), DomainError);
  }
}

TEST_CASE("strongly monotone envelope") {
  SUBCASE("first step has no contraction") {
    const RateEnvelope env{1.0, 1.0, 0.99, 0.5};
    CHECK(strong_rate(env, 1).residual == doctest::Approx(14.1067359796658844).epsilon(1e-13));
  }
  SUBCASE("alpha with mu = 1/gamma and lambda = gamma") {
    const double gamma = 0.37;
    CHECK(strong_alpha({1.0, gamma, 0.99, 1.0 / gamma}) ==
          doctest::Approx(0.0197039457398881).epsilon(1e-12));
  }
  SUBCASE("bounds strictly decrease") {
    const RateEnvelope env{2.0, 0.8, 0.6, 1.5};
    for (long j = 1; j < 30; ++j) {
      CHECK(strong_rate(env, j + 1).residual < strong_rate(env, j).residual);
      CHECK(strong_rate(env, j + 1).eps < strong_rate(env, j).eps);
    }
  }
  SUBCASE("mu must be positive") {
    CHECK_THROWS_AS(strong_alpha({1.0, 1.0, 0.5, 0.0}), DomainError);
    CHECK_THROWS_AS(strong_rate({1.0, 1.0, 0.5, -1.0}, 2), DomainError);
  }
}
