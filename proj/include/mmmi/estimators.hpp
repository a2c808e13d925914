#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace mmmi {

// Digamma function, accurate to ~1e-13 for x > 0 (recurrence up to
// x >= 10, then the asymptotic series).
double digamma(double x);

// Exact nearest-neighbor queries under the maximum-coordinate metric,
// backed by a kd-tree or brute force; both give identical answers.
class ChebyshevIndex {
 public:
  enum class Search { kAuto, kBruteForce, kKdTree };

  explicit ChebyshevIndex(Eigen::MatrixXd points, Search search = Search::kAuto);
  ~ChebyshevIndex();
  ChebyshevIndex(ChebyshevIndex&&) noexcept;
  ChebyshevIndex& operator=(ChebyshevIndex&&) noexcept;

  Eigen::Index size() const;
  bool uses_tree() const;

  // Distance from point `query` to its k-th nearest other point.
  double kth_distance(Eigen::Index query, int k) const;
  // Number of other points strictly within `radius` of point `query`.
  std::int64_t count_within(Eigen::Index query, double radius) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct KsgOptions {
  int k = 5;
  ChebyshevIndex::Search search = ChebyshevIndex::Search::kAuto;
};

struct EstimateReport {
  double value = 0.0;  // nats; finite-sample estimates may be negative
  std::int64_t n = 0;
  int k = 0;  // neighbor count; 0 for the Gaussian estimator
  std::optional<double> standard_error;
};

// Kraskov-Stoegbauer-Grassberger estimator (variant 1) of I(X;Y):
// psi(k) + psi(n) - <psi(n_x+1) + psi(n_y+1)> with marginal counts
// taken strictly inside the k-th joint neighbor distance. Exact
// duplicate joint rows are perturbed by a deterministic jitter of
// magnitude 1e-10 of each column's scale so no radius is zero.
EstimateReport ksg_mi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      const KsgOptions& options = {});

// Plug-in Gaussian estimate: half the log-determinant gap between the
// empirical marginal and joint covariances.
EstimateReport gaussian_mi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

}  // namespace mmmi
