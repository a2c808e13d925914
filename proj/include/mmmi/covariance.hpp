#pragma once

#include <Eigen/Core>
#include <vector>

#include "mmmi/mixing_matrix.hpp"
#include "mmmi/model_spec.hpp"

namespace mmmi {

// Block identifiers used throughout the analytic layer: 0 is the scalar
// theta block, 1..n_z are the modalities (matching the 1-based modality
// convention of the exported tables).
inline constexpr int kThetaBlock = 0;

// One d x d covariance block in diagonal-plus-low-rank form:
//   block = diag_scale * I_d + left * right^T,  rank <= n_theta.
struct StructuredBlock {
  double diag_scale = 0.0;
  Eigen::MatrixXd left;   // d x r
  Eigen::MatrixXd right;  // d x r

  Eigen::Index dim() const { return left.rows(); }
  Eigen::Index rank() const { return left.cols(); }
  Eigen::MatrixXd expand() const;
};

// The latent covariance A A^T held blockwise in structured form. The
// scalar theta variance, theta-modality cross vectors, the noise Gram
// s(i,j) = sum_j rho_hat_ij rho_hat_i'j, and the per-modality template
// factors P_i (column k = rho_tilde_ik T_ik) determine every block:
//   Sigma_ii' = s(i,i') I_d + P_i P_i'^T,  Sigma_theta_i = P_i eta.
// Dense blocks are materialized on demand only.
class CovarianceBlocks {
 public:
  explicit CovarianceBlocks(const MixingMatrix& mixing);

  int n_z() const { return n_z_; }
  int n_theta() const { return n_theta_; }
  int d() const { return d_; }

  double theta_variance() const { return theta_variance_; }
  const Eigen::VectorXd& eta() const { return eta_; }

  // 1-based modality indices below.
  const Eigen::VectorXd& theta_cross(int modality) const;
  const Eigen::MatrixXd& factor(int modality) const;
  double noise_gram(int i, int j) const;
  // P_i^T P_j, the template Gram of a modality pair.
  Eigen::MatrixXd template_gram(int i, int j) const;

  StructuredBlock structured_block(int i, int j) const;
  Eigen::MatrixXd dense_block(int i, int j) const;

  // 1 for theta, d for modalities.
  Eigen::Index block_dim(int block) const;
  Eigen::MatrixXd dense_marginal(int block) const;
  // Covariance of the stacked pair (block `first`, block `second`).
  Eigen::MatrixXd dense_pair(int first, int second) const;

  void check_block_id(int block) const;

 private:
  int n_theta_ = 0;
  int n_z_ = 0;
  int d_ = 0;
  double theta_variance_ = 0.0;
  Eigen::VectorXd eta_;
  std::vector<Eigen::VectorXd> theta_cross_;
  std::vector<Eigen::MatrixXd> factors_;
  Eigen::MatrixXd noise_gram_;
};

CovarianceBlocks covariance(const MixingMatrix& mixing);

}  // namespace mmmi
