#include "opsplit/drt.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include "opsplit/errors.hpp"

namespace opsplit {

void DrtProblem::validate() const {
  if (A == nullptr || C == nullptr) throw InputError("DrtProblem: A and C must be set");
  if (!F1.eval || !F1.project || !F2.eval) throw InputError("DrtProblem: F1/F2 not set");
  if (A->dimension() != C->dimension()) throw InputError("DrtProblem: A and C dimensions differ");
  cfg.validate();
  if (cfg.gamma > gamma_max(F2.eta, F1.L, cfg.sigma) * (1.0 + 1e-12)) {
    throw InputError("DrtProblem: gamma exceeds 4 eta sigma^2 / (1 + sqrt(1 + 16 L^2 eta^2 sigma^2))");
  }
}

BSolver drt_bsolver(const DrtProblem& p, DrtOptions options) {
  p.validate();
  auto warm = std::make_shared<std::optional<Point>>();
  return [&p, options = std::move(options), warm](const Point& z_prev, double tau,
                                                   double gamma) -> BSolverOutput {
    if (gamma != p.cfg.gamma) throw InputError("drt_bsolver: gamma differs from the problem's");
    TsengProblem sub{p.C, &p.F1, &p.F2, z_prev, gamma, tau, p.cfg.sigma};
    std::optional<Point> start;
    if (options.warm_start_inner && warm->has_value()) start = **warm;
    TsengOutput t = tseng_solve(sub, options.max_inner, options.inner_observer, start);
    if (options.warm_start_inner) *warm = t.z_next;

    BSolverOutput out;
    out.x = t.z_tilde;
    out.b = (z_prev + t.z_prev - (t.z_next + t.z_tilde)) / gamma;
    out.eps_b = (t.z_prime_prev - t.z_tilde).squaredNorm() / (4.0 * p.F2.eta);
    out.inner_iters = t.inner_iters;
    if (options.inner_report) options.inner_report({z_prev, tau, std::move(t)});
    return out;
  };
}

void StopRule::validate() const {
  switch (kind) {
    case StopKind::kTolerance:
      if (!(rho > 0.0) || !(eps > 0.0)) throw InputError("StopRule: rho and eps must be positive");
      break;
    case StopKind::kDelta:
    case StopKind::kResidual:
      if (!(tol > 0.0)) throw InputError("StopRule: tolerance must be positive");
      break;
  }
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kPointwise:
      return "pointwise";
    case StopReason::kErgodic:
      return "ergodic";
    case StopReason::kDelta:
      return "delta";
    case StopReason::kResidual:
      return "residual";
  }
  return "?";
}

DrtRun drt_solve(const DrtProblem& problem, const StopRule& stop, const Point& z0,
                 const DrtOptions& options, const DrtObserver& observer) {
  problem.validate();
  stop.validate();
  if (z0.size() != problem.A->dimension()) throw InputError("drt_solve: z0 dimension mismatch");

  // Local copy whose F2 counts its evaluations.
  DrtProblem p = problem;
  auto f2_count = std::make_shared<long>(0);
  p.F2.eval = [inner = problem.F2.eval, f2_count](const Point& z) {
    ++*f2_count;
    return inner(z);
  };

  DrsConfig term_cfg = p.cfg;
  if (stop.kind == StopKind::kTolerance) {
    term_cfg.rho_tol = stop.rho;
    term_cfg.eps_tol = stop.eps;
  }

  const BSolver bsolver = drt_bsolver(p, options);
  DrsState state = make_drs_state(z0, p.cfg);
  DrtRun run;
  const auto t0 = std::chrono::steady_clock::now();

  while (true) {
    StepType type;
    try {
      type = drs_iterate(state, p.cfg, bsolver, *p.A);
    } catch (const BudgetError& e) {
      throw BudgetError("outer iteration " + std::to_string(state.k + 1) + ": " + e.what());
    }
    const auto& q = state.last;
    const double residual = (q.x - q.y).norm();
    run.trace.push_back({state.k, type, state.last_tau_used, residual, q.eps_b});
    run.inner_per_outer.push_back(state.last_inner_iters);
    run.inner_total += state.last_inner_iters;
    if (type == StepType::kExtragradient) {
      ++run.extragradient;
      certify_extragradient(state, p.cfg);
    } else {
      ++run.null_steps;
    }
    if (observer) observer(state, type);

    bool done = false;
    switch (stop.kind) {
      case StopKind::kTolerance:
        if (check_termination(q.x, q.y, q.a, q.b, 0.0, q.eps_b, term_cfg)) {
          run.reason = StopReason::kPointwise;
          done = true;
        } else if (!state.extragradient_history.empty()) {
          DrsErgodic e = drs_ergodic(state);
          if (check_termination(e.x, e.y, e.a, e.b, e.eps_a, e.eps_b, term_cfg)) {
            run.reason = StopReason::kErgodic;
            run.ergodic = std::move(e);
            done = true;
          }
        }
        break;
      case StopKind::kDelta:
        if (type == StepType::kExtragradient && (state.z - state.z_prev).norm() <= stop.tol) {
          run.reason = StopReason::kDelta;
          done = true;
        }
        break;
      case StopKind::kResidual:
        if (residual <= stop.tol) {
          run.reason = StopReason::kResidual;
          done = true;
        }
        break;
    }
    if (done) break;
  }

  run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.iterations = state.k;
  run.f2_evals = *f2_count;
  run.final_residual = run.trace.back().residual;
  run.final_quadruple = state.last;
  run.z = state.z;
  return run;
}

}  // namespace opsplit
