#include "opsplit/hpe.hpp"

#include <cmath>

#include "opsplit/errors.hpp"

namespace opsplit {

namespace {

void check_envelope(const RateEnvelope& env, long j) {
  if (j < 1) throw InputError("rate envelope: j must be >= 1");
  if (!(env.lambda_min > 0.0)) throw InputError("rate envelope: lambda_min must be positive");
  if (!(env.d0 >= 0.0)) throw InputError("rate envelope: d0 must be nonnegative");
  if (!(env.sigma >= 0.0 && env.sigma < 1.0)) throw DomainError("rate envelope: sigma must be in [0, 1)");
}

}  // namespace

HpeInequality hpe_inequality_sides(const HpeStepCertificate& c) {
  require_same_dim(c.z_prev, c.z_tilde, "hpe certificate");
  require_same_dim(c.z_prev, c.v, "hpe certificate");
  const double lhs = (c.lambda * c.v + c.z_tilde - c.z_prev).squaredNorm() + 2.0 * c.lambda * c.eps;
  const double rhs = c.sigma * c.sigma * (c.z_tilde - c.z_prev).squaredNorm();
  return {lhs, rhs};
}

bool verify_hpe_inequality(const HpeStepCertificate& c) {
  if (!(c.eps >= -1e-10)) return false;
  const auto [lhs, rhs] = hpe_inequality_sides(c);
  const double scale = 1.0 + c.z_prev.squaredNorm() + c.z_tilde.squaredNorm();
  return leq_with_slack(lhs, rhs, scale);
}

Point hpe_update(const Point& z_prev, const Point& v, double lambda) {
  require_same_dim(z_prev, v, "hpe_update");
  return z_prev - lambda * v;
}

void ErgodicAccumulator::push(const Point& z_tilde, const Point& v, double eps, double lambda) {
  if (!(lambda > 0.0)) throw InputError("ErgodicAccumulator::push: lambda must be positive");
  require_same_dim(z_tilde, v, "ErgodicAccumulator::push");
  if (!steps_.empty()) require_same_dim(z_tilde, steps_.front().z_tilde, "ErgodicAccumulator::push");
  steps_.push_back({z_tilde, v, eps, lambda});
  lambda_sum_ += lambda;
}

EnlargementTriple ErgodicAccumulator::read() const {
  if (steps_.empty()) throw StateError("ErgodicAccumulator::read on empty accumulator");
  const auto n = steps_.front().z_tilde.size();
  Point zbar = Point::Zero(n);
  Point vbar = Point::Zero(n);
  for (const auto& s : steps_) {
    zbar += s.lambda * s.z_tilde;
    vbar += s.lambda * s.v;
  }
  zbar /= lambda_sum_;
  vbar /= lambda_sum_;
  // Expanded form: the <z_l - zbar, vbar> terms sum to zero.
  double eps = 0.0;
  for (const auto& s : steps_) eps += s.lambda * (s.eps + (s.z_tilde - zbar).dot(s.v));
  eps /= lambda_sum_;
  return {std::move(zbar), std::move(vbar), eps};
}

RateBound pointwise_bound(const RateEnvelope& env, long j) {
  check_envelope(env, j);
  const double s = env.sigma;
  const double jd = static_cast<double>(j);
  return {env.d0 / (env.lambda_min * std::sqrt(jd)) * std::sqrt((1.0 + s) / (1.0 - s)),
          s * s * env.d0 * env.d0 / (2.0 * (1.0 - s * s) * env.lambda_min * jd)};
}

RateBound ergodic_bound(const RateEnvelope& env, long j) {
  check_envelope(env, j);
  const double s = env.sigma;
  const double jd = static_cast<double>(j);
  return {2.0 * env.d0 / (env.lambda_min * jd),
          2.0 * (1.0 + s / std::sqrt(1.0 - s * s)) * env.d0 * env.d0 / (env.lambda_min * jd)};
}

double strong_alpha(const RateEnvelope& env) {
  if (!(env.mu > 0.0)) throw DomainError("strong_alpha: mu must be positive");
  if (!(env.lambda_min > 0.0)) throw InputError("strong_alpha: lambda_min must be positive");
  if (!(env.sigma >= 0.0 && env.sigma < 1.0)) throw DomainError("strong_alpha: sigma must be in [0, 1)");
  const double s2 = env.sigma * env.sigma;
  return 1.0 / (1.0 / (2.0 * env.lambda_min * env.mu) + 1.0 / (1.0 - s2));
}

RateBound strong_rate(const RateEnvelope& env, long j) {
  check_envelope(env, j);
  const double alpha = strong_alpha(env);
  const double s = env.sigma;
  const double decay = std::pow(1.0 - alpha, static_cast<double>(j - 1));
  return {std::sqrt((1.0 + s) / (1.0 - s)) * std::sqrt(decay) * env.d0 / env.lambda_min,
          s * s / (2.0 * (1.0 - s * s)) * decay * env.d0 * env.d0 / env.lambda_min};
}

}  // namespace opsplit
