#ifndef OPSPLIT_BASELINES_HPP
#define OPSPLIT_BASELINES_HPP

#include <vector>

#include "opsplit/operators.hpp"
#include "opsplit/qp.hpp"

namespace opsplit {

struct BaselineConfig {
  double gamma = 1.0;
  double lambda = 1.0;  // relaxation
  double beta = 1.0;    // cocoercivity constant the stepsize is tied to
};

/// beta = 1/|Q|, gamma = 1.99 beta, lambda = 1.
BaselineConfig tos_config(const QpInstance& inst);
/// beta = 1/|P_M Q P_M|, gamma = 1.99 beta, lambda = 1.
BaselineConfig rfdrs_config(const QpInstance& inst);

/// Three-operator splitting step:
///   x_B = P_X(z), x_A = P_M(2 x_B - z - gamma (Q x_B + e)), z+ = z + lambda (x_A - x_B).
Point tos_iterate(const Point& z, const QpInstance& inst, const BaselineConfig& cfg);

/// Relaxed forward Douglas-Rachford step with the forward map restricted to M:
///   x = P_M(z), z+ = z + lambda (P_X(2x - z - gamma P_M(Q x + e)) - x).
Point rfdrs_iterate(const Point& z, const QpInstance& inst, const BaselineConfig& cfg);

/// Primal estimates read off a governing iterate.
Point tos_solution(const Point& z, const QpInstance& inst);
Point rfdrs_solution(const Point& z, const QpInstance& inst);

enum class Baseline { kTos, kRfdrs };

struct BaselineRun {
  long iterations = 0;
  double wall_time_s = 0.0;
  double final_residual = 0.0;  // |z_k - z_{k-1}|
  Point z;                      // governing iterate
  Point solution;               // primal estimate
  std::vector<double> residuals;
};

/// Iterates until |z_k - z_{k-1}| <= tol. Throws BudgetError after max_iter.
BaselineRun run_baseline(Baseline algo, const QpInstance& inst, const BaselineConfig& cfg,
                         const Point& z0, double tol, long max_iter = 1000000);

}  // namespace opsplit

#endif  // OPSPLIT_BASELINES_HPP
