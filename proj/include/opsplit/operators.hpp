#ifndef OPSPLIT_OPERATORS_HPP
#define OPSPLIT_OPERATORS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace opsplit {

/// A point of the ambient space R^n.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Throws InputError if any coordinate is NaN or infinite.
void require_finite(const Point& p, const char* what);

/// Throws InputError unless both points have the same dimension.
void require_same_dim(const Point& a, const Point& b, const char* what);

/// Slack used by every "a <= b" test on computed quantities: a relative part
/// on the compared values plus a round-off floor proportional to `scale`
/// (typically the squared magnitude of the points involved).
inline constexpr double kRelativeSlack = 1e-10;
bool leq_with_slack(double lhs, double rhs, double scale = 0.0);

/// (z, v, eps) asserting v in T^eps(z) for some operator T.
struct EnlargementTriple {
  Point z;
  Point v;
  double eps = 0.0;
};

/// Output of a resolvent evaluation: x = J_{gamma T}(z) and u in T(x) with
/// gamma * u + x = z.
struct ResolventPair {
  Point x;
  Point u;
};

/// A point (z, v) of an operator graph.
struct GraphPair {
  Point z;
  Point v;
};

/// A maximal monotone operator accessed through its resolvent, with an
/// optional graph sampler used for enlargement spot checks.
class SplittableOperator {
 public:
  virtual ~SplittableOperator() = default;

  virtual Eigen::Index dimension() const = 0;

  /// Returns (x, u) with x = (gamma T + I)^{-1}(z) and u = (z - x) / gamma.
  virtual ResolventPair resolvent(double gamma, const Point& z) const = 0;

  virtual bool has_graph_sampler() const { return false; }

  /// Draws `count` pairs from the graph. Throws UnsupportedError by default.
  virtual std::vector<GraphPair> sample_graph(std::size_t count, Rng& rng) const;
};

/// Normal cone of the box [lo, hi]; its resolvent is the box projection for
/// every gamma > 0.
class BoxNormalCone final : public SplittableOperator {
 public:
  BoxNormalCone(Point lo, Point hi);

  Eigen::Index dimension() const override { return lo_.size(); }
  ResolventPair resolvent(double gamma, const Point& z) const override;
  bool has_graph_sampler() const override { return true; }
  std::vector<GraphPair> sample_graph(std::size_t count, Rng& rng) const override;

  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

 private:
  Point lo_;
  Point hi_;
};

/// Normal cone of the hyperplane-through-origin M = {z : <k, z> = 0} for a
/// sign row k (entries +-1). Resolvent is the orthogonal projection onto M.
class NullspaceNormalCone final : public SplittableOperator {
 public:
  explicit NullspaceNormalCone(Point sign_row);

  Eigen::Index dimension() const override { return k_.size(); }
  ResolventPair resolvent(double gamma, const Point& z) const override;
  bool has_graph_sampler() const override { return true; }
  std::vector<GraphPair> sample_graph(std::size_t count, Rng& rng) const override;

  const Point& sign_row() const { return k_; }

 private:
  Point k_;
};

/// Single-valued affine operator z -> M z + c with a monotone (positive
/// semidefinite symmetric part) matrix M.
class AffineOperator final : public SplittableOperator {
 public:
  AffineOperator(Matrix m, Point c);

  Eigen::Index dimension() const override { return c_.size(); }
  ResolventPair resolvent(double gamma, const Point& z) const override;
  bool has_graph_sampler() const override { return true; }
  std::vector<GraphPair> sample_graph(std::size_t count, Rng& rng) const override;

  Point operator()(const Point& z) const { return m_ * z + c_; }
  const Matrix& matrix() const { return m_; }
  const Point& offset() const { return c_; }

 private:
  Matrix m_;
  Point c_;
};

/// A monotone map that is L-Lipschitz on the closed convex set Omega, with
/// the projection onto Omega.
struct LipschitzMap {
  std::function<Point(const Point&)> eval;
  double L = 0.0;
  std::function<Point(const Point&)> project;
};

/// The zero map on R^n (L = 0, Omega = R^n).
LipschitzMap zero_lipschitz_map();

/// An eta-cocoercive map.
struct CocoerciveMap {
  std::function<Point(const Point&)> eval;
  double eta = 1.0;
};

/// z -> M z + c viewed as an eta-cocoercive map.
CocoerciveMap affine_cocoercive(Matrix m, Point c, double eta);

/// x = clamp(z, lo, hi), u = (z - x) / gamma.
ResolventPair resolvent_box(double gamma, const Point& z, const Point& lo, const Point& hi);

/// Orthogonal projection of z onto {w : <k, w> = 0} for a sign row k:
/// z - (<k, z> / n) k.
Point project_nullspace(const Point& k, const Point& z);

/// (z_target, F(z_eval), |z_eval - z_target|^2 / (4 eta)): the forward value
/// at a nearby point lies in the eps-enlargement of F at z_target.
EnlargementTriple cocoercive_enlargement(const CocoerciveMap& f, const Point& z_eval,
                                         const Point& z_target);

/// Transportation formula: the weighted average of enlargement triples is an
/// enlargement triple with eps = sum_l w_l [eps_l + <z_l - zbar, v_l - vbar>].
/// Weights must be nonnegative and sum to one.
EnlargementTriple transport_ergodic(std::span<const EnlargementTriple> triples,
                                    std::span<const double> weights);

/// Spot check of v in T^eps(z) against `samples` graph points drawn from the
/// operator. A true result is a necessary condition only.
bool check_eps_membership(const SplittableOperator& op, const EnlargementTriple& triple,
                          std::size_t samples = 1000, std::uint64_t seed = 0x5eed);

}  // namespace opsplit

#endif  // OPSPLIT_OPERATORS_HPP
