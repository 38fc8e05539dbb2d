#ifndef OPSPLIT_TSENG_HPP
#define OPSPLIT_TSENG_HPP

#include <functional>
#include <optional>
#include <vector>

#include "opsplit/hpe.hpp"
#include "opsplit/operators.hpp"

namespace opsplit {

/// Prox subproblem 0 in C(z) + F1(z) + F2(z) + (z - z_hat) / gamma, solved
/// until the tolerance tau_hat is met.
struct TsengProblem {
  const SplittableOperator* C = nullptr;
  const LipschitzMap* F1 = nullptr;
  const CocoerciveMap* F2 = nullptr;
  Point z_hat;
  double gamma = 1.0;
  double tau_hat = 1.0;
  double sigma = 0.99;
};

/// Largest admissible stepsize 4 eta sigma^2 / (1 + sqrt(1 + 16 L^2 eta^2 sigma^2)).
double gamma_max(double eta, double L, double sigma);

struct TsengStep {
  Point z_prime;  // P_Omega(z_prev)
  Point z_tilde;  // backward point
  Point z_next;   // forward correction
};

/// One forward-backward-forward step from z_prev. F2 is evaluated once.
TsengStep tseng_step(const TsengProblem& p, const Point& z_prev);

/// |z_prev - z_next|^2 + gamma |z_prime_prev - z_tilde|^2 / (2 eta).
double tseng_residual(const Point& z_prev, const Point& z_next, const Point& z_prime_prev,
                      const Point& z_tilde, const TsengProblem& p);

/// tseng_residual(...) <= tau_hat (inclusive).
bool tseng_terminate(const Point& z_prev, const Point& z_next, const Point& z_prime_prev,
                     const Point& z_tilde, const TsengProblem& p);

struct TsengOutput {
  Point z_prev;
  Point z_prime_prev;
  Point z_next;
  Point z_tilde;
  long inner_iters = 0;
  std::vector<double> residuals;  // tseng_residual at every inner step
};

/// Per-step hook: (j, z_prev, step).
using TsengObserver = std::function<void(long, const Point&, const TsengStep&)>;

inline constexpr long kDefaultMaxInner = 1000;

/// Iterates tseng_step from `start` (the prox center when empty) until
/// tseng_terminate fires. Throws BudgetError after max_inner steps.
TsengOutput tseng_solve(const TsengProblem& p, long max_inner = kDefaultMaxInner,
                        const TsengObserver& observer = {},
                        const std::optional<Point>& start = std::nullopt);

/// HPE certificate (lambda = gamma) of one inner step on the strongly
/// monotone operator (. - z_hat)/gamma + C + F1 + F2:
/// v = (z_prev - z_next) / gamma, eps = |z_prime - z_tilde|^2 / (4 eta).
HpeStepCertificate embed_strongly_monotone(const TsengProblem& p, const Point& z_prev,
                                           const TsengStep& step);

/// Envelope on tseng_residual at inner step j:
/// ((1+sigma)^2 + sigma^2) (1-alpha)^{j-1} d^2 / (1 - sigma^2), with
/// alpha = (1/2 + 1/(1-sigma^2))^{-1} and d the distance from z_hat to zer(C+F1+F2).
double tseng_decay_bound(double sigma, double d, long j);

}  // namespace opsplit

#endif  // OPSPLIT_TSENG_HPP
