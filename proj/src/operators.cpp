#include "opsplit/operators.hpp"

#include <cmath>
#include <string>

#include "opsplit/errors.hpp"

namespace opsplit {

void require_finite(const Point& p, const char* what) {
  if (!p.allFinite()) throw InputError(std::string(what) + ": non-finite coordinate");
}

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.size() != b.size()) {
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
}

bool leq_with_slack(double lhs, double rhs, double scale) {
  // 1e-24 * scale sits well above the squared round-off of differences of
  // points whose squared magnitude is `scale`.
  const double slack = kRelativeSlack * (std::abs(lhs) + std::abs(rhs)) + 1e-24 * scale;
  return lhs <= rhs + slack;
}

std::vector<GraphPair> SplittableOperator::sample_graph(std::size_t, Rng&) const {
  throw UnsupportedError("operator does not expose a graph sampler");
}

// ---------------------------------------------------------------------------

BoxNormalCone::BoxNormalCone(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require_same_dim(lo_, hi_, "BoxNormalCone");
  if ((lo_.array() > hi_.array()).any()) throw InputError("BoxNormalCone: lo > hi");
}

ResolventPair BoxNormalCone::resolvent(double gamma, const Point& z) const {
  return resolvent_box(gamma, z, lo_, hi_);
}

std::vector<GraphPair> BoxNormalCone::sample_graph(std::size_t count, Rng& rng) const {
  std::uniform_int_distribution<int> face(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> magnitude(1.0);
  const auto n = dimension();
  std::vector<GraphPair> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    GraphPair g{Point(n), Point::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      switch (face(rng)) {
        case 0:
          g.z[i] = lo_[i];
          g.v[i] = -magnitude(rng);
          break;
        case 1:
          g.z[i] = hi_[i];
          g.v[i] = magnitude(rng);
          break;
        default:
          g.z[i] = lo_[i] + unit(rng) * (hi_[i] - lo_[i]);
          break;
      }
      // Degenerate interval: both faces are active, any normal is allowed.
      if (lo_[i] == hi_[i]) g.v[i] = magnitude(rng) - magnitude(rng);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------

NullspaceNormalCone::NullspaceNormalCone(Point sign_row) : k_(std::move(sign_row)) {
  if (k_.size() == 0) throw InputError("NullspaceNormalCone: empty sign row");
  for (Eigen::Index i = 0; i < k_.size(); ++i) {
    if (k_[i] != 1.0 && k_[i] != -1.0) throw InputError("NullspaceNormalCone: entries must be +-1");
  }
}

ResolventPair NullspaceNormalCone::resolvent(double gamma, const Point& z) const {
  if (!(gamma > 0.0)) throw InputError("resolvent: gamma must be positive");
  Point x = project_nullspace(k_, z);
  Point u = (z - x) / gamma;
  return {std::move(x), std::move(u)};
}

std::vector<GraphPair> NullspaceNormalCone::sample_graph(std::size_t count, Rng& rng) const {
  std::normal_distribution<double> normal;
  const auto n = dimension();
  std::vector<GraphPair> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Point g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = 3.0 * normal(rng);
    out.push_back({project_nullspace(k_, g), normal(rng) * k_});
  }
  return out;
}

// ---------------------------------------------------------------------------

AffineOperator::AffineOperator(Matrix m, Point c) : m_(std::move(m)), c_(std::move(c)) {
  if (m_.rows() != m_.cols() || m_.rows() != c_.size()) {
    throw InputError("AffineOperator: matrix/offset dimension mismatch");
  }
}

ResolventPair AffineOperator::resolvent(double gamma, const Point& z) const {
  if (!(gamma > 0.0)) throw InputError("resolvent: gamma must be positive");
  require_same_dim(z, c_, "AffineOperator::resolvent");
  const Matrix system = gamma * m_ + Matrix::Identity(m_.rows(), m_.cols());
  Point x = system.partialPivLu().solve(z - gamma * c_);
  Point u = (z - x) / gamma;
  return {std::move(x), std::move(u)};
}

std::vector<GraphPair> AffineOperator::sample_graph(std::size_t count, Rng& rng) const {
  std::normal_distribution<double> normal;
  const auto n = dimension();
  std::vector<GraphPair> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Point z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = 3.0 * normal(rng);
    Point v = (*this)(z);
    out.push_back({std::move(z), std::move(v)});
  }
  return out;
}

// ---------------------------------------------------------------------------

LipschitzMap zero_lipschitz_map() {
  return {[](const Point& z) -> Point { return Point::Zero(z.size()); }, 0.0,
          [](const Point& z) -> Point { return z; }};
}

CocoerciveMap affine_cocoercive(Matrix m, Point c, double eta) {
  if (!(eta > 0.0)) throw InputError("affine_cocoercive: eta must be positive");
  if (m.rows() != m.cols() || m.rows() != c.size()) {
    throw InputError("affine_cocoercive: matrix/offset dimension mismatch");
  }
  return {[m = std::move(m), c = std::move(c)](const Point& z) -> Point { return m * z + c; }, eta};
}

ResolventPair resolvent_box(double gamma, const Point& z, const Point& lo, const Point& hi) {
  if (!(gamma > 0.0)) throw InputError("resolvent_box: gamma must be positive");
  require_same_dim(z, lo, "resolvent_box");
  require_same_dim(z, hi, "resolvent_box");
  require_finite(z, "resolvent_box");
  Point x = z.cwiseMax(lo).cwiseMin(hi);
  Point u = (z - x) / gamma;
  return {std::move(x), std::move(u)};
}

Point project_nullspace(const Point& k, const Point& z) {
  require_same_dim(k, z, "project_nullspace");
  require_finite(z, "project_nullspace");
  const double n = static_cast<double>(k.size());
  return z - (k.dot(z) / n) * k;
}

EnlargementTriple cocoercive_enlargement(const CocoerciveMap& f, const Point& z_eval,
                                         const Point& z_target) {
  require_same_dim(z_eval, z_target, "cocoercive_enlargement");
  return {z_target, f.eval(z_eval), (z_eval - z_target).squaredNorm() / (4.0 * f.eta)};
}

EnlargementTriple transport_ergodic(std::span<const EnlargementTriple> triples,
                                    std::span<const double> weights) {
  if (triples.empty()) throw InputError("transport_ergodic: empty list");
  if (triples.size() != weights.size()) throw InputError("transport_ergodic: weight count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("transport_ergodic: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("transport_ergodic: weights must sum to 1");

  const auto n = triples.front().z.size();
  Point zbar = Point::Zero(n);
  Point vbar = Point::Zero(n);
  for (std::size_t l = 0; l < triples.size(); ++l) {
    require_same_dim(triples[l].z, zbar, "transport_ergodic");
    require_same_dim(triples[l].v, vbar, "transport_ergodic");
    zbar += weights[l] * triples[l].z;
    vbar += weights[l] * triples[l].v;
  }
  double eps = 0.0;
  for (std::size_t l = 0; l < triples.size(); ++l) {
    eps += weights[l] * (triples[l].eps + (triples[l].z - zbar).dot(triples[l].v - vbar));
  }
  if (eps < -1e-10) throw InvariantError("transport_ergodic: negative transported eps");
  return {std::move(zbar), std::move(vbar), eps};
}

bool check_eps_membership(const SplittableOperator& op, const EnlargementTriple& triple,
                          std::size_t samples, std::uint64_t seed) {
  if (!op.has_graph_sampler()) throw UnsupportedError("check_eps_membership: no graph sampler");
  require_same_dim(triple.z, triple.v, "check_eps_membership");
  Rng rng(seed);
  for (const auto& g : op.sample_graph(samples, rng)) {
    const Point dz = triple.z - g.z;
    const Point dv = triple.v - g.v;
    const double slack = 1e-10 * (1.0 + dz.norm() * dv.norm());
    if (dz.dot(dv) < -triple.eps - slack) return false;
  }
  return true;
}

}  // namespace opsplit
