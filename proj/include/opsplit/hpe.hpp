#ifndef OPSPLIT_HPE_HPP
#define OPSPLIT_HPE_HPP

#include <vector>

#include "opsplit/operators.hpp"

namespace opsplit {

/// One step of a hybrid proximal extragradient scheme: v in T^eps(z_tilde)
/// together with the relative-error inequality
///   |lambda v + z_tilde - z_prev|^2 + 2 lambda eps <= sigma^2 |z_tilde - z_prev|^2.
struct HpeStepCertificate {
  Point z_prev;
  Point z_tilde;
  Point v;
  double eps = 0.0;
  double lambda = 1.0;
  double sigma = 0.0;
};

/// Left and right sides of the relative-error inequality.
struct HpeInequality {
  double lhs = 0.0;
  double rhs = 0.0;
};
HpeInequality hpe_inequality_sides(const HpeStepCertificate& cert);

/// True iff the relative-error inequality holds up to 1e-10 relative slack.
bool verify_hpe_inequality(const HpeStepCertificate& cert);

/// z_prev - lambda * v.
Point hpe_update(const Point& z_prev, const Point& v, double lambda);

/// Stepsize-weighted ergodic averages of (z_tilde, v, eps). Keeps the full
/// step history so that eps-bar can be evaluated exactly on every read.
class ErgodicAccumulator {
 public:
  void push(const Point& z_tilde, const Point& v, double eps, double lambda);

  /// (zbar, vbar, epsbar) of all pushed steps. Throws StateError when empty.
  EnlargementTriple read() const;

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  double lambda_sum() const { return lambda_sum_; }

 private:
  struct Step {
    Point z_tilde;
    Point v;
    double eps;
    double lambda;
  };
  std::vector<Step> steps_;
  double lambda_sum_ = 0.0;
};

/// Constants of the HPE complexity envelopes.
struct RateEnvelope {
  double d0 = 0.0;          // distance from the starting point to the zero set
  double lambda_min = 1.0;  // lower bound on the stepsizes
  double sigma = 0.0;       // relative error tolerance, in [0, 1)
  double mu = 0.0;          // strong monotonicity modulus, 0 if none
};

struct RateBound {
  double residual = 0.0;  // bound on |v|
  double eps = 0.0;       // bound on eps
};

/// Best-iterate bound after j steps: some i <= j has
/// |v_i| <= d0 / (lambda sqrt(j)) sqrt((1+sigma)/(1-sigma)) and
/// eps_i <= sigma^2 d0^2 / (2 (1-sigma^2) lambda j).
RateBound pointwise_bound(const RateEnvelope& env, long j);

/// Ergodic bound after j steps: |vbar| <= 2 d0 / (lambda j),
/// epsbar <= 2 (1 + sigma / sqrt(1-sigma^2)) d0^2 / (lambda j).
RateBound ergodic_bound(const RateEnvelope& env, long j);

/// alpha = (1/(2 lambda mu) + 1/(1-sigma^2))^{-1}, in (0, 1) when mu > 0.
double strong_alpha(const RateEnvelope& env);

/// Linear rate for strongly monotone inclusions:
/// |v_j| <= sqrt((1+sigma)/(1-sigma)) (1-alpha)^{(j-1)/2} d0 / lambda,
/// eps_j <= sigma^2 / (2 (1-sigma^2)) (1-alpha)^{j-1} d0^2 / lambda.
RateBound strong_rate(const RateEnvelope& env, long j);

}  // namespace opsplit

#endif  // OPSPLIT_HPE_HPP
