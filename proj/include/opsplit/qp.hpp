#ifndef OPSPLIT_QP_HPP
#define OPSPLIT_QP_HPP

#include <cstdint>
#include <filesystem>
#include <memory>

#include "opsplit/drt.hpp"
#include "opsplit/operators.hpp"

namespace opsplit {

/// minimize 1/2 <Qz, z> + <e, z>  subject to <k, z> = 0, z in [0, 10]^n,
/// with e the all-ones vector and k a sign row.
struct QpInstance {
  Matrix Q;
  Point k;
  bool definite = true;
  std::uint64_t seed = 0;

  Eigen::Index n() const { return k.size(); }
  Point e() const { return Point::Ones(n()); }
  Point lo() const { return Point::Zero(n()); }
  Point hi() const { return Point::Constant(n(), 10.0); }
  double objective(const Point& z) const { return 0.5 * z.dot(Q * z) + z.sum(); }

  /// Throws InputError unless Q is symmetric PSD and k has +-1 entries.
  void validate() const;
};

/// Q = M^T M / n (+ I when definite), M with n (definite) or ceil(n/2)
/// (semidefinite) rows of i.i.d. standard normals; k i.i.d. uniform +-1.
QpInstance generate_instance(long n, bool definite, std::uint64_t seed);

/// Deterministic starting point for an instance: uniform in the box, drawn
/// from a stream derived from the instance seed.
Point initial_point(const QpInstance& inst);

/// |z0 - P_X(z0) + Q z0|^3 + 1, optionally with Q z0 + e in place of Q z0.
double initial_tau(const QpInstance& inst, const Point& z0, bool include_linear_term = false);

struct PowerMethodOptions {
  double rel_tol = 1e-12;
  long max_iter = 10000;
};

/// Spectral norm of a symmetric PSD map by power iteration on the Rayleigh
/// quotient.
double spectral_norm_psd(const std::function<Point(const Point&)>& apply, Eigen::Index n,
                         const PowerMethodOptions& opts = {});

/// 1 / |Q|; +infinity for Q = 0.
double estimate_eta(const Matrix& Q, const PowerMethodOptions& opts = {});
/// 1 / |P_M Q P_M|; +infinity when the composed map vanishes.
double estimate_beta_V(const Matrix& Q, const Point& k, const PowerMethodOptions& opts = {});

/// The operator split A = N_M, C = N_X, F1 = 0, F2 = Q. + e.
struct QpOperators {
  std::unique_ptr<NullspaceNormalCone> A;
  std::unique_ptr<BoxNormalCone> C;
  LipschitzMap F1;
  CocoerciveMap F2;
  /// F2 as a sampled operator, for enlargement spot checks.
  std::unique_ptr<AffineOperator> F2_graph;
  double eta = 1.0;
};
QpOperators make_operators(const QpInstance& inst);
QpOperators make_operators(const QpInstance& inst, double eta);

/// Problem for the four-operator solver with the benchmark parameters:
/// gamma = 2 eta sigma^2, tau0 from initial_tau.
DrtProblem make_drt_problem(const QpOperators& ops, double sigma, double theta, double tau0);

/// Exact solution by enumerating all 3^n active-set patterns (n <= 8).
/// Among KKT points picks the smallest objective, then the smallest norm.
Point kkt_enumeration_solution(const QpInstance& inst);

struct ReferenceOptions {
  double tol = 1e-12;
  long max_iter = 1000000;
};

/// Reference minimizer: KKT enumeration for n <= 6, otherwise a
/// three-operator fixed-point iteration run to |z_k - z_{k-1}| <= tol.
/// Throws OracleError when the iteration cap is reached.
Point reference_solution(const QpInstance& inst, const ReferenceOptions& opts = {});

/// Minimizer over the box alone (the zero of C + F1 + F2) by projected
/// gradient. Throws OracleError on non-convergence.
Point box_qp_solution(const QpInstance& inst, const ReferenceOptions& opts = {});

/// max of |z - P_X z|, |k.z| and the fixed-point residual of a projected
/// gradient step on the constrained problem (0 at a KKT point).
double kkt_residual(const QpInstance& inst, const Point& z);

/// Nearest point to z0 in the zero set of the Douglas-Rachford splitting
/// operator with parameter gamma, given the (unique) minimizer x_star. That
/// set is {x_star + gamma s k : s k - (Q x_star + e) in N_X(x_star)}.
struct DrsFixedPoint {
  Point z;          // nearest fixed point
  double distance;  // |z0 - z|
};
DrsFixedPoint nearest_drs_fixed_point(const QpInstance& inst, const Point& x_star, double gamma,
                                      const Point& z0, double active_tol = 1e-8);

/// Text format: line 1 "n definite|semidefinite seed", line 2 the sign row,
/// then n rows of Q. Reals are written as hexfloats; decimal is accepted.
void save_instance(const QpInstance& inst, const std::filesystem::path& path);
QpInstance load_instance(const std::filesystem::path& path);

}  // namespace opsplit

#endif  // OPSPLIT_QP_HPP
