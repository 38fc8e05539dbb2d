#ifndef OPSPLIT_INEXACT_DRS_HPP
#define OPSPLIT_INEXACT_DRS_HPP

#include <functional>
#include <vector>

#include "opsplit/hpe.hpp"
#include "opsplit/operators.hpp"

namespace opsplit {

struct DrsConfig {
  double gamma = 1.0;
  double sigma = 0.99;
  double theta = 0.01;
  double tau0 = 1.0;
  double rho_tol = 1e-6;
  double eps_tol = 1e-6;
  long max_iter = 100000;

  /// Throws InputError on any out-of-range field.
  void validate() const;
};

enum class StepType { kExtragradient, kNull };
const char* to_string(StepType t);

/// The four points produced by one outer iteration: b in B^{eps_b}(x),
/// a in A(y), gamma a + y = x - gamma b.
struct DrsQuadruple {
  Point x;
  Point b;
  Point y;
  Point a;
  double eps_b = 0.0;
};

/// What a B-solver returns for the prox subproblem centered at z_prev.
struct BSolverOutput {
  Point x;
  Point b;
  double eps_b = 0.0;
  long inner_iters = 0;
};

/// Given (z_prev, tau, gamma), returns (x, b, eps_b) with b in B^{eps_b}(x) and
///   |gamma b + x - z_prev|^2 + 2 gamma eps_b <= tau.
using BSolver = std::function<BSolverOutput(const Point& z_prev, double tau, double gamma)>;

/// B-solver backed by an exact resolvent of B (eps_b = 0).
BSolver exact_bsolver(const SplittableOperator& b_op);

/// One outer-iteration record, as written to trace files.
struct DrsTraceRecord {
  long k = 0;
  StepType type = StepType::kNull;
  double tau = 0.0;       // tolerance handed to the B-solver at this iteration
  double residual = 0.0;  // |x_k - y_k|
  double eps_b = 0.0;
};

struct DrsState {
  Point z0;
  Point z;       // z_k
  Point z_prev;  // z_{k-1}, the prox center of the latest iteration
  double tau0 = 1.0;
  double tau = 1.0;
  long k = 0;
  long beta = 0;  // null steps so far
  std::vector<StepType> step_log;
  bool has_quadruple = false;
  DrsQuadruple last;
  long last_inner_iters = 0;
  double last_tau_used = 0.0;
  std::vector<DrsQuadruple> extragradient_history;
};

/// Initial state at z0 with tau = cfg.tau0.
DrsState make_drs_state(const Point& z0, const DrsConfig& cfg);

/// Runs one outer iteration in place and returns the step type taken.
/// Throws ContractError if the B-solver violates its tau-inequality and
/// BudgetError once cfg.max_iter iterations have been taken.
StepType drs_iterate(DrsState& state, const DrsConfig& cfg, const BSolver& bsolver,
                     const SplittableOperator& a_op);

/// gamma |a + b| = |x - y| <= rho_tol and eps_a + eps_b <= eps_tol.
/// Throws ContractError if the quadruple breaks gamma(a+b) = x - y.
bool check_termination(const Point& x, const Point& y, const Point& a, const Point& b,
                       double eps_a, double eps_b, const DrsConfig& cfg);

struct DrsErgodic {
  Point x;
  Point y;
  Point a;
  Point b;
  double eps_a = 0.0;
  double eps_b = 0.0;
};

/// Uniform averages over the extragradient iterations with transported eps.
/// Throws StateError before the first extragradient step.
DrsErgodic drs_ergodic(const DrsState& state);

/// HPE certificate (lambda = 1) of the latest iteration seen as a step on the
/// Douglas-Rachford splitting operator: z_tilde = y + gamma b,
/// v = gamma (a + b), eps = gamma eps_b. Requires an extragradient step.
HpeStepCertificate embed_hpe(const DrsState& state, const DrsConfig& cfg);

/// Verifies embed_hpe and throws InvariantError if it fails.
void certify_extragradient(const DrsState& state, const DrsConfig& cfg);

/// Bounds valid at a null step whose predecessor had beta_prev null steps:
/// |x - y| <= (1 + 1/sigma) sqrt(theta^beta_prev tau0) and
/// gamma eps_b <= theta^beta_prev tau0 / 2.
struct NullStepBounds {
  double residual = 0.0;
  double eps = 0.0;
};
NullStepBounds null_step_bounds(double tau0, double sigma, long beta_prev, double theta);

}  // namespace opsplit

#endif  // OPSPLIT_INEXACT_DRS_HPP
