#include "opsplit/inexact_drs.hpp"

#include <cmath>
#include <string>

#include "opsplit/errors.hpp"

namespace opsplit {

namespace {

// Absolute floor (relative to |z_prev|^2) under which both sides of the
// extragradient test are pure round-off. Without it a converged run can
// oscillate on the last bits and take null steps forever.
constexpr double kRoundoffFloor = 1e-28;

}  // namespace

void DrsConfig::validate() const {
  if (!(gamma > 0.0)) throw InputError("DrsConfig: gamma must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InputError("DrsConfig: sigma must be in (0, 1)");
  if (!(theta > 0.0 && theta < 1.0)) throw InputError("DrsConfig: theta must be in (0, 1)");
  if (!(tau0 > 0.0)) throw InputError("DrsConfig: tau0 must be positive");
  if (!(rho_tol > 0.0)) throw InputError("DrsConfig: rho_tol must be positive");
  if (!(eps_tol > 0.0)) throw InputError("DrsConfig: eps_tol must be positive");
  if (max_iter < 1) throw InputError("DrsConfig: max_iter must be >= 1");
}

const char* to_string(StepType t) {
  return t == StepType::kExtragradient ? "extragradient" : "null";
}

BSolver exact_bsolver(const SplittableOperator& b_op) {
  return [&b_op](const Point& z_prev, double, double gamma) -> BSolverOutput {
    auto [x, u] = b_op.resolvent(gamma, z_prev);
    return {std::move(x), std::move(u), 0.0, 0};
  };
}

DrsState make_drs_state(const Point& z0, const DrsConfig& cfg) {
  cfg.validate();
  require_finite(z0, "make_drs_state");
  DrsState s;
  s.z0 = z0;
  s.z = z0;
  s.z_prev = z0;
  s.tau0 = cfg.tau0;
  s.tau = cfg.tau0;
  return s;
}

StepType drs_iterate(DrsState& state, const DrsConfig& cfg, const BSolver& bsolver,
                     const SplittableOperator& a_op) {
  if (state.k >= cfg.max_iter) {
    throw BudgetError("inexact DRS: iteration budget of " + std::to_string(cfg.max_iter) +
                      " exhausted");
  }
  const double gamma = cfg.gamma;
  const Point z_prev = state.z;
  const double tau_prev = state.tau;

  BSolverOutput out = bsolver(z_prev, tau_prev, gamma);
  require_same_dim(out.x, z_prev, "B-solver output x");
  require_same_dim(out.b, z_prev, "B-solver output b");
  if (!out.x.allFinite() || !out.b.allFinite() || !std::isfinite(out.eps_b)) {
    throw ContractError("B-solver returned non-finite output");
  }
  if (out.eps_b < 0.0) throw ContractError("B-solver returned negative eps_b");

  const double prox_err = (gamma * out.b + out.x - z_prev).squaredNorm() + 2.0 * gamma * out.eps_b;
  const double scale = 1.0 + z_prev.squaredNorm();
  if (!leq_with_slack(prox_err, tau_prev, scale)) {
    throw ContractError("B-solver violated |gamma b + x - z|^2 + 2 gamma eps_b <= tau (" +
                        std::to_string(prox_err) + " > " + std::to_string(tau_prev) + ")");
  }

  auto [y, a] = a_op.resolvent(gamma, out.x - gamma * out.b);
  const double rhs = cfg.sigma * cfg.sigma * (gamma * out.b + y - z_prev).squaredNorm();
  const bool extragradient = prox_err <= rhs + kRoundoffFloor * scale;

  state.k += 1;
  state.z_prev = z_prev;
  state.last = {std::move(out.x), std::move(out.b), std::move(y), std::move(a), out.eps_b};
  state.has_quadruple = true;
  state.last_inner_iters = out.inner_iters;
  state.last_tau_used = tau_prev;

  if (extragradient) {
    state.z = z_prev - gamma * (state.last.a + state.last.b);
    state.extragradient_history.push_back(state.last);
    state.step_log.push_back(StepType::kExtragradient);
    return StepType::kExtragradient;
  }
  state.beta += 1;
  state.tau = std::pow(cfg.theta, static_cast<double>(state.beta)) * state.tau0;
  state.step_log.push_back(StepType::kNull);
  return StepType::kNull;
}

bool check_termination(const Point& x, const Point& y, const Point& a, const Point& b,
                       double eps_a, double eps_b, const DrsConfig& cfg) {
  require_same_dim(x, y, "check_termination");
  require_same_dim(a, b, "check_termination");
  require_same_dim(x, a, "check_termination");
  const double lhs = cfg.gamma * (a + b).norm();
  const double rhs = (x - y).norm();
  if (std::abs(lhs - rhs) > 1e-10 * (1.0 + lhs + rhs + x.norm() + y.norm())) {
    throw ContractError("check_termination: gamma |a + b| != |x - y|");
  }
  return rhs <= cfg.rho_tol && eps_a + eps_b <= cfg.eps_tol;
}

DrsErgodic drs_ergodic(const DrsState& state) {
  const auto& hist = state.extragradient_history;
  if (hist.empty()) throw StateError("drs_ergodic: no extragradient step yet");
  const auto n = hist.front().x.size();
  const double j = static_cast<double>(hist.size());
  DrsErgodic e{Point::Zero(n), Point::Zero(n), Point::Zero(n), Point::Zero(n), 0.0, 0.0};
  for (const auto& q : hist) {
    e.x += q.x;
    e.y += q.y;
    e.a += q.a;
    e.b += q.b;
  }
  e.x /= j;
  e.y /= j;
  e.a /= j;
  e.b /= j;
  for (const auto& q : hist) {
    e.eps_a += (q.y - e.y).dot(q.a);
    e.eps_b += q.eps_b + (q.x - e.x).dot(q.b);
  }
  e.eps_a /= j;
  e.eps_b /= j;
  if (e.eps_a < -1e-10 || e.eps_b < -1e-10) {
    throw InvariantError("drs_ergodic: negative transported eps");
  }
  return e;
}

HpeStepCertificate embed_hpe(const DrsState& state, const DrsConfig& cfg) {
  if (!state.has_quadruple || state.step_log.empty() ||
      state.step_log.back() != StepType::kExtragradient) {
    throw StateError("embed_hpe: latest iteration is not an extragradient step");
  }
  const auto& q = state.last;
  const double gamma = cfg.gamma;
  return {state.z_prev, q.y + gamma * q.b, gamma * (q.a + q.b), gamma * q.eps_b, 1.0, cfg.sigma};
}

void certify_extragradient(const DrsState& state, const DrsConfig& cfg) {
  const auto cert = embed_hpe(state, cfg);
  if (!verify_hpe_inequality(cert)) {
    const auto [lhs, rhs] = hpe_inequality_sides(cert);
    throw InvariantError("extragradient step " + std::to_string(state.k) +
                         " fails the HPE inequality: " + std::to_string(lhs) + " > " +
                         std::to_string(rhs));
  }
}

NullStepBounds null_step_bounds(double tau0, double sigma, long beta_prev, double theta) {
  if (!(sigma > 0.0)) throw DomainError("null_step_bounds: sigma must be positive");
  const double tau_prev = std::pow(theta, static_cast<double>(beta_prev)) * tau0;
  return {(1.0 + 1.0 / sigma) * std::sqrt(tau_prev), tau_prev / 2.0};
}

}  // namespace opsplit
