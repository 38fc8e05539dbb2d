#include "opsplit/baselines.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "opsplit/errors.hpp"

namespace opsplit {

namespace {

BaselineConfig from_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("baseline: degenerate cocoercivity constant");
  return {1.99 * beta, 1.0, beta};
}

}  // namespace

BaselineConfig tos_config(const QpInstance& inst) { return from_beta(estimate_eta(inst.Q)); }

BaselineConfig rfdrs_config(const QpInstance& inst) { return from_beta(estimate_beta_V(inst.Q, inst.k)); }

Point tos_iterate(const Point& z, const QpInstance& inst, const BaselineConfig& cfg) {
  require_same_dim(z, inst.k, "tos_iterate");
  const Point xb = z.cwiseMax(inst.lo()).cwiseMin(inst.hi());
  const Point xa = project_nullspace(inst.k, 2.0 * xb - z - cfg.gamma * (inst.Q * xb + inst.e()));
  return z + cfg.lambda * (xa - xb);
}

Point rfdrs_iterate(const Point& z, const QpInstance& inst, const BaselineConfig& cfg) {
  require_same_dim(z, inst.k, "rfdrs_iterate");
  const Point x = project_nullspace(inst.k, z);
  const Point forward = project_nullspace(inst.k, inst.Q * x + inst.e());
  const Point w = (2.0 * x - z - cfg.gamma * forward).cwiseMax(inst.lo()).cwiseMin(inst.hi());
  return z + cfg.lambda * (w - x);
}

Point tos_solution(const Point& z, const QpInstance& inst) {
  return z.cwiseMax(inst.lo()).cwiseMin(inst.hi());
}

Point rfdrs_solution(const Point& z, const QpInstance& inst) { return project_nullspace(inst.k, z); }

BaselineRun run_baseline(Baseline algo, const QpInstance& inst, const BaselineConfig& cfg,
                         const Point& z0, double tol, long max_iter) {
  if (!(tol > 0.0)) throw InputError("run_baseline: tolerance must be positive");
  require_same_dim(z0, inst.k, "run_baseline");
  BaselineRun run;
  run.z = z0;
  const auto t0 = std::chrono::steady_clock::now();
  for (long it = 1; it <= max_iter; ++it) {
    Point next = algo == Baseline::kTos ? tos_iterate(run.z, inst, cfg) : rfdrs_iterate(run.z, inst, cfg);
    const double moved = (next - run.z).norm();
    run.z = std::move(next);
    run.residuals.push_back(moved);
    if (moved <= tol) {
      run.iterations = it;
      run.final_residual = moved;
      run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      run.solution = algo == Baseline::kTos ? tos_solution(run.z, inst) : rfdrs_solution(run.z, inst);
      return run;
    }
  }
  throw BudgetError("baseline: no convergence within " + std::to_string(max_iter) + " iterations");
}

}  // namespace opsplit
