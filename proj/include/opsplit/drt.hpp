#ifndef OPSPLIT_DRT_HPP
#define OPSPLIT_DRT_HPP

#include <functional>
#include <string>
#include <vector>

#include "opsplit/inexact_drs.hpp"
#include "opsplit/operators.hpp"
#include "opsplit/tseng.hpp"

namespace opsplit {

/// 0 in A(z) + C(z) + F1(z) + F2(z), with A and C given by resolvents, F1
/// monotone Lipschitz on Omega and F2 cocoercive.
struct DrtProblem {
  const SplittableOperator* A = nullptr;
  const SplittableOperator* C = nullptr;
  LipschitzMap F1;
  CocoerciveMap F2;
  DrsConfig cfg;

  /// Throws InputError unless cfg is valid and cfg.gamma is admissible.
  void validate() const;
};

/// Inner-solve details of the latest B-solver call, for instrumentation.
struct DrtInnerReport {
  Point z_hat;
  double tau_hat = 0.0;
  TsengOutput output;
};

struct DrtOptions {
  long max_inner = kDefaultMaxInner;
  /// Start each inner solve from the previous inner iterate instead of the
  /// prox center.
  bool warm_start_inner = false;
  /// Called on every inner step.
  TsengObserver inner_observer;
  /// Called after every completed inner solve.
  std::function<void(const DrtInnerReport&)> inner_report;
};

/// B-solver running the Tseng inner loop centered at z_prev with tolerance
/// tau, mapped to (x, b, eps_b) = (z_tilde, (z_prev + z_{j-1} - z_j - z_tilde)/gamma,
/// |z'_{j-1} - z_tilde|^2 / (4 eta)). The problem must outlive the solver.
BSolver drt_bsolver(const DrtProblem& p, DrtOptions options = {});

enum class StopKind {
  kTolerance,  // rho/eps criterion, pointwise then ergodic
  kDelta,      // |z_k - z_{k-1}| <= tol, checked on extragradient steps only
  kResidual,   // |x_k - y_k| <= tol, checked on every step
};

struct StopRule {
  StopKind kind = StopKind::kDelta;
  double tol = 1e-6;      // kDelta / kResidual
  double rho = 0.0;       // kTolerance
  double eps = 0.0;       // kTolerance

  static StopRule tolerance(double rho, double eps) { return {StopKind::kTolerance, 0.0, rho, eps}; }
  static StopRule delta(double tol) { return {StopKind::kDelta, tol, 0.0, 0.0}; }
  static StopRule residual(double tol) { return {StopKind::kResidual, tol, 0.0, 0.0}; }

  /// Throws InputError for rules that can never fire.
  void validate() const;
};

enum class StopReason { kPointwise, kErgodic, kDelta, kResidual };
const char* to_string(StopReason r);

struct DrtRun {
  long iterations = 0;
  long extragradient = 0;
  long null_steps = 0;
  long inner_total = 0;
  long f2_evals = 0;
  double wall_time_s = 0.0;
  double final_residual = 0.0;
  StopReason reason = StopReason::kDelta;
  std::vector<DrsTraceRecord> trace;
  std::vector<long> inner_per_outer;
  DrsQuadruple final_quadruple;
  Point z;  // final governing iterate
  /// Ergodic solution when reason == kErgodic.
  DrsErgodic ergodic;
};

/// Per-outer-iteration hook, called after every drs_iterate.
using DrtObserver = std::function<void(const DrsState&, StepType)>;

/// Runs the outer inexact Douglas-Rachford loop with the Tseng B-solver
/// until `stop` fires. Every extragradient step is certified against the
/// HPE inequality (InvariantError on failure).
DrtRun drt_solve(const DrtProblem& p, const StopRule& stop, const Point& z0,
                 const DrtOptions& options = {}, const DrtObserver& observer = {});

}  // namespace opsplit

#endif  // OPSPLIT_DRT_HPP
