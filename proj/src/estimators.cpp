#include "mmmi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "mmmi/analytics.hpp"
#include "mmmi/errors.hpp"
#include "mmmi/parallel.hpp"
#include "mmmi/rng.hpp"

namespace mmmi {

double digamma(double x) {
  if (!(x > 0.0)) throw SpecError("digamma needs a positive argument");
  double value = 0.0;
  while (x < 10.0) {
    value -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series with Bernoulli coefficients through x^-12.
  double series = -0.5 * inv;
  double power = inv2;
  static const double kCoeff[] = {-1.0 / 12.0,  1.0 / 120.0,  -1.0 / 252.0,
                                  1.0 / 240.0,  -1.0 / 132.0, 691.0 / 32760.0};
  for (const double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  return value + std::log(x) + series;
}

namespace {

constexpr Eigen::Index kLeafSize = 16;

double chebyshev(const Eigen::MatrixXd& pts, Eigen::Index a, Eigen::Index b) {
  return (pts.row(a) - pts.row(b)).cwiseAbs().maxCoeff();
}

}  // namespace

struct ChebyshevIndex::Impl {
  struct Node {
    Eigen::VectorXd lo, hi;
    Eigen::Index begin = 0, end = 0;
    int left = -1, right = -1;
    bool leaf() const { return left < 0; }
  };

  Eigen::MatrixXd points;
  bool tree = false;
  std::vector<Eigen::Index> order;
  std::vector<Node> nodes;

  int build(Eigen::Index begin, Eigen::Index end) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    Eigen::VectorXd lo = points.row(order[static_cast<std::size_t>(begin)]).transpose();
    Eigen::VectorXd hi = lo;
    for (Eigen::Index i = begin + 1; i < end; ++i) {
      const auto row = points.row(order[static_cast<std::size_t>(i)]);
      lo = lo.cwiseMin(row.transpose());
      hi = hi.cwiseMax(row.transpose());
    }
    nodes[static_cast<std::size_t>(id)].lo = lo;
    nodes[static_cast<std::size_t>(id)].hi = hi;
    nodes[static_cast<std::size_t>(id)].begin = begin;
    nodes[static_cast<std::size_t>(id)].end = end;
    if (end - begin <= kLeafSize || (hi - lo).maxCoeff() == 0.0) {
      return id;
    }
    Eigen::Index split_dim = 0;
    (hi - lo).maxCoeff(&split_dim);
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) {
                       return points(a, split_dim) < points(b, split_dim);
                     });
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes[static_cast<std::size_t>(id)].left = left;
    nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  double box_min_dist(const Node& node, const Eigen::VectorXd& q) const {
    double dist = 0.0;
    for (Eigen::Index dim = 0; dim < q.size(); ++dim) {
      const double gap = std::max({node.lo[dim] - q[dim], q[dim] - node.hi[dim], 0.0});
      dist = std::max(dist, gap);
    }
    return dist;
  }

  double box_max_dist(const Node& node, const Eigen::VectorXd& q) const {
    double dist = 0.0;
    for (Eigen::Index dim = 0; dim < q.size(); ++dim) {
      const double gap = std::max(std::abs(q[dim] - node.lo[dim]),
                                  std::abs(q[dim] - node.hi[dim]));
      dist = std::max(dist, gap);
    }
    return dist;
  }

  void knn_visit(int id, const Eigen::VectorXd& q, Eigen::Index query, int k,
                 std::priority_queue<double>& heap) const {
    const Node& node = nodes[static_cast<std::size_t>(id)];
    if (static_cast<int>(heap.size()) == k && box_min_dist(node, q) >= heap.top()) {
      return;
    }
    if (node.leaf()) {
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index j = order[static_cast<std::size_t>(i)];
        if (j == query) continue;
        const double dist = (points.row(j).transpose() - q).cwiseAbs().maxCoeff();
        if (static_cast<int>(heap.size()) < k) {
          heap.push(dist);
        } else if (dist < heap.top()) {
          heap.pop();
          heap.push(dist);
        }
      }
      return;
    }
    const double dl = box_min_dist(nodes[static_cast<std::size_t>(node.left)], q);
    const double dr = box_min_dist(nodes[static_cast<std::size_t>(node.right)], q);
    if (dl <= dr) {
      knn_visit(node.left, q, query, k, heap);
      knn_visit(node.right, q, query, k, heap);
    } else {
      knn_visit(node.right, q, query, k, heap);
      knn_visit(node.left, q, query, k, heap);
    }
  }

  std::int64_t count_visit(int id, const Eigen::VectorXd& q, double radius) const {
    const Node& node = nodes[static_cast<std::size_t>(id)];
    if (box_min_dist(node, q) >= radius) return 0;
    if (box_max_dist(node, q) < radius) return node.end - node.begin;
    if (node.leaf()) {
      std::int64_t count = 0;
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index j = order[static_cast<std::size_t>(i)];
        const double dist = (points.row(j).transpose() - q).cwiseAbs().maxCoeff();
        if (dist < radius) ++count;
      }
      return count;
    }
    return count_visit(node.left, q, radius) + count_visit(node.right, q, radius);
  }
};

ChebyshevIndex::ChebyshevIndex(Eigen::MatrixXd points, Search search)
    : impl_(std::make_unique<Impl>()) {
  if (points.rows() < 1 || points.cols() < 1) {
    throw SpecError("neighbor index needs a nonempty point set");
  }
  if (!points.allFinite()) throw SpecError("neighbor index needs finite points");
  impl_->points = std::move(points);
  const Eigen::Index n = impl_->points.rows();
  const Eigen::Index dim = impl_->points.cols();
  switch (search) {
    case Search::kBruteForce: impl_->tree = false; break;
    case Search::kKdTree: impl_->tree = true; break;
    case Search::kAuto: impl_->tree = n >= 512 && dim <= 16; break;
  }
  if (impl_->tree) {
    impl_->order.resize(static_cast<std::size_t>(n));
    std::iota(impl_->order.begin(), impl_->order.end(), Eigen::Index{0});
    impl_->nodes.reserve(static_cast<std::size_t>(2 * n / kLeafSize + 2));
    impl_->build(0, n);
  }
}

ChebyshevIndex::~ChebyshevIndex() = default;
ChebyshevIndex::ChebyshevIndex(ChebyshevIndex&&) noexcept = default;
ChebyshevIndex& ChebyshevIndex::operator=(ChebyshevIndex&&) noexcept = default;

Eigen::Index ChebyshevIndex::size() const { return impl_->points.rows(); }
bool ChebyshevIndex::uses_tree() const { return impl_->tree; }

double ChebyshevIndex::kth_distance(Eigen::Index query, int k) const {
  const Eigen::Index n = impl_->points.rows();
  if (query < 0 || query >= n) throw SpecError("query index out of range");
  if (k < 1 || k >= n) throw SpecError("neighbor count must satisfy 1 <= k < n");
  if (impl_->tree) {
    std::priority_queue<double> heap;
    const Eigen::VectorXd q = impl_->points.row(query).transpose();
    impl_->knn_visit(0, q, query, k, heap);
    return heap.top();
  }
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != query) dists.push_back(chebyshev(impl_->points, query, j));
  }
  std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
  return dists[static_cast<std::size_t>(k - 1)];
}

std::int64_t ChebyshevIndex::count_within(Eigen::Index query, double radius) const {
  const Eigen::Index n = impl_->points.rows();
  if (query < 0 || query >= n) throw SpecError("query index out of range");
  if (!(radius > 0.0)) return 0;
  if (impl_->tree) {
    const Eigen::VectorXd q = impl_->points.row(query).transpose();
    // Self sits at distance zero and is always counted; drop it here.
    return impl_->count_visit(0, q, radius) - 1;
  }
  std::int64_t count = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != query && chebyshev(impl_->points, query, j) < radius) ++count;
  }
  return count;
}

namespace {

void check_samples(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw SpecError(std::string(name) + " samples must be a nonempty matrix");
  }
  if (!m.allFinite()) {
    throw SpecError(std::string(name) + " samples must be finite");
  }
}

void check_nondegenerate(const Eigen::MatrixXd& m, const char* name) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m.col(c).maxCoeff() == m.col(c).minCoeff()) {
      throw DegenerateBlockError(
          name, std::string(name) + " column " + std::to_string(c + 1) +
                    " is constant (zero variance)");
    }
  }
}

bool has_duplicate_rows(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(a, c) != m(b, c)) return m(a, c) < m(b, c);
    }
    return false;
  });
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (m.row(idx[static_cast<std::size_t>(i)]) ==
        m.row(idx[static_cast<std::size_t>(i + 1)])) {
      return true;
    }
  }
  return false;
}

// Deterministic tie-breaking perturbation, +-1e-10 of each column's
// magnitude, drawn from a fixed counter stream so reruns agree.
void apply_jitter(Eigen::MatrixXd& joint) {
  const CounterRng rng({UINT64_C(0x6b73672d6a697474), 0});
  const Eigen::Index n = joint.rows();
  const Eigen::Index dim = joint.cols();
  Eigen::VectorXd scale(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const double s = joint.col(c).cwiseAbs().maxCoeff();
    scale[c] = s > 0.0 ? s : 1.0;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double u = rng.uniform_at(static_cast<std::uint64_t>(r * dim + c));
      joint(r, c) += 2.0e-10 * scale[c] * (u - 0.5);
    }
  }
}

}  // namespace

EstimateReport ksg_mi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      const KsgOptions& options) {
  check_samples(x, "x");
  check_samples(y, "y");
  if (x.rows() != y.rows()) throw SpecError("x and y need equal sample counts");
  const Eigen::Index n = x.rows();
  if (options.k < 1) throw SpecError("neighbor count must be at least 1");
  if (n <= options.k) throw SpecError("KSG needs more samples than neighbors");
  check_nondegenerate(x, "x");
  check_nondegenerate(y, "y");

  Eigen::MatrixXd joint(n, x.cols() + y.cols());
  joint << x, y;
  if (has_duplicate_rows(joint)) apply_jitter(joint);

  const ChebyshevIndex joint_index(joint, options.search);
  const ChebyshevIndex x_index(joint.leftCols(x.cols()), options.search);
  const ChebyshevIndex y_index(joint.rightCols(y.cols()), options.search);

  Eigen::VectorXd psi_terms(n);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const double eps = joint_index.kth_distance(i, options.k);
      const std::int64_t nx = x_index.count_within(i, eps);
      const std::int64_t ny = y_index.count_within(i, eps);
      psi_terms[i] = digamma(static_cast<double>(nx + 1)) +
                     digamma(static_cast<double>(ny + 1));
    }
  });

  EstimateReport report;
  report.n = n;
  report.k = options.k;
  report.value = digamma(static_cast<double>(options.k)) +
                 digamma(static_cast<double>(n)) - psi_terms.mean();
  return report;
}

EstimateReport gaussian_mi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  check_samples(x, "x");
  check_samples(y, "y");
  if (x.rows() != y.rows()) throw SpecError("x and y need equal sample counts");
  const Eigen::Index n = x.rows();
  const Eigen::Index dx = x.cols();
  const Eigen::Index dy = y.cols();
  if (n <= dx + dy) {
    throw SpecError("Gaussian estimator needs more samples than dimensions");
  }

  Eigen::MatrixXd joint(n, dx + dy);
  joint << x, y;
  const Eigen::MatrixXd centered = joint.rowwise() - joint.colwise().mean();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  const auto logdet_or_throw = [&](const Eigen::MatrixXd& m, const char* name) {
    const LogdetResult ld = logdet_psd(m);
    if (ld.singular) {
      throw DegenerateBlockError(
          name, std::string("empirical covariance of ") + name + " is rank deficient");
    }
    return ld.value;
  };

  const double ld_joint = logdet_or_throw(cov, "joint");
  const double ld_x = logdet_or_throw(cov.topLeftCorner(dx, dx), "x");
  const double ld_y = logdet_or_throw(cov.bottomRightCorner(dy, dy), "y");

  EstimateReport report;
  report.n = n;
  report.value = 0.5 * (ld_x + ld_y - ld_joint);
  return report;
}

}  // namespace mmmi
