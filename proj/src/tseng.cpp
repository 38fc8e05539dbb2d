#include "opsplit/tseng.hpp"

#include <cmath>
#include <string>

#include "opsplit/errors.hpp"

namespace opsplit {

namespace {

void check_problem(const TsengProblem& p) {
  if (p.C == nullptr || p.F1 == nullptr || p.F2 == nullptr) {
    throw InputError("TsengProblem: operators not set");
  }
  if (!(p.gamma > 0.0)) throw InputError("TsengProblem: gamma must be positive");
  if (!(p.tau_hat > 0.0)) throw InputError("TsengProblem: tau_hat must be positive");
  if (!(p.sigma > 0.0 && p.sigma < 1.0)) throw InputError("TsengProblem: sigma must be in (0, 1)");
  if (p.gamma > gamma_max(p.F2->eta, p.F1->L, p.sigma) * (1.0 + 1e-12)) {
    throw InputError("TsengProblem: gamma exceeds the admissible bound");
  }
  if (p.z_hat.size() != p.C->dimension()) throw InputError("TsengProblem: dimension mismatch");
}

}  // namespace

double gamma_max(double eta, double L, double sigma) {
  if (!(eta > 0.0)) throw InputError("gamma_max: eta must be positive");
  if (!(L >= 0.0)) throw InputError("gamma_max: L must be nonnegative");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InputError("gamma_max: sigma must be in (0, 1)");
  const double s2 = sigma * sigma;
  return 4.0 * eta * s2 / (1.0 + std::sqrt(1.0 + 16.0 * L * L * eta * eta * s2));
}

TsengStep tseng_step(const TsengProblem& p, const Point& z_prev) {
  require_same_dim(z_prev, p.z_hat, "tseng_step");
  const double gamma = p.gamma;
  Point z_prime = p.F1->project(z_prev);
  const Point f1_prime = p.F1->eval(z_prime);
  const Point forward = f1_prime + p.F2->eval(z_prime);
  // The C-resolvent is taken at gamma / 2.
  Point z_tilde = p.C->resolvent(gamma / 2.0, (p.z_hat + z_prev - gamma * forward) / 2.0).x;
  Point z_next = z_tilde - gamma * (p.F1->eval(z_tilde) - f1_prime);
  return {std::move(z_prime), std::move(z_tilde), std::move(z_next)};
}

double tseng_residual(const Point& z_prev, const Point& z_next, const Point& z_prime_prev,
                      const Point& z_tilde, const TsengProblem& p) {
  return (z_prev - z_next).squaredNorm() +
         p.gamma * (z_prime_prev - z_tilde).squaredNorm() / (2.0 * p.F2->eta);
}

bool tseng_terminate(const Point& z_prev, const Point& z_next, const Point& z_prime_prev,
                     const Point& z_tilde, const TsengProblem& p) {
  return tseng_residual(z_prev, z_next, z_prime_prev, z_tilde, p) <= p.tau_hat;
}

TsengOutput tseng_solve(const TsengProblem& p, long max_inner, const TsengObserver& observer,
                        const std::optional<Point>& start) {
  check_problem(p);
  TsengOutput out;
  out.residuals.reserve(16);
  Point z = start ? *start : p.z_hat;
  require_same_dim(z, p.z_hat, "tseng_solve start");
  for (long j = 1; j <= max_inner; ++j) {
    TsengStep step = tseng_step(p, z);
    if (observer) observer(j, z, step);
    const double r = tseng_residual(z, step.z_next, step.z_prime, step.z_tilde, p);
    out.residuals.push_back(r);
    if (r <= p.tau_hat) {
      out.z_prev = std::move(z);
      out.z_prime_prev = std::move(step.z_prime);
      out.z_next = std::move(step.z_next);
      out.z_tilde = std::move(step.z_tilde);
      out.inner_iters = j;
      return out;
    }
    z = std::move(step.z_next);
  }
  throw BudgetError("Tseng inner solver: no termination within " + std::to_string(max_inner) +
                    " iterations (tau_hat = " + std::to_string(p.tau_hat) + ")");
}

HpeStepCertificate embed_strongly_monotone(const TsengProblem& p, const Point& z_prev,
                                           const TsengStep& step) {
  const double gamma = p.gamma;
  return {z_prev,
          step.z_tilde,
          (z_prev - step.z_next) / gamma,
          (step.z_prime - step.z_tilde).squaredNorm() / (4.0 * p.F2->eta),
          gamma,
          p.sigma};
}

double tseng_decay_bound(double sigma, double d, long j) {
  if (j < 1) throw InputError("tseng_decay_bound: j must be >= 1");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw DomainError("tseng_decay_bound: sigma must be in [0, 1)");
  const double s2 = sigma * sigma;
  // mu = 1/gamma and lambda = gamma, so 2 lambda mu = 2.
  const double alpha = 1.0 / (0.5 + 1.0 / (1.0 - s2));
  return ((1.0 + sigma) * (1.0 + sigma) + s2) * std::pow(1.0 - alpha, static_cast<double>(j - 1)) *
         d * d / (1.0 - s2);
}

}  // namespace opsplit
