#include "mmmi/covariance.hpp"

#include <string>

#include "mmmi/errors.hpp"

namespace mmmi {

Eigen::MatrixXd StructuredBlock::expand() const {
  Eigen::MatrixXd out = left * right.transpose();
  out.diagonal().array() += diag_scale;
  return out;
}

CovarianceBlocks::CovarianceBlocks(const MixingMatrix& mixing) {
  const ModelSpec& s = mixing.spec();
  n_theta_ = s.n_theta;
  n_z_ = s.n_z;
  d_ = s.d;
  eta_ = s.eta;
  theta_variance_ = s.eta.squaredNorm();
  noise_gram_ = s.rho_hat * s.rho_hat.transpose();
  factors_.reserve(static_cast<std::size_t>(n_z_));
  theta_cross_.reserve(static_cast<std::size_t>(n_z_));
  for (int i = 0; i < n_z_; ++i) {
    Eigen::MatrixXd p(d_, n_theta_);
    for (int k = 0; k < n_theta_; ++k) {
      p.col(k) = s.rho_tilde(i, k) * s.templates[i][k].values;
    }
    theta_cross_.push_back(p * s.eta);
    factors_.push_back(std::move(p));
  }
}

void CovarianceBlocks::check_block_id(int block) const {
  if (block < 0 || block > n_z_) {
    throw SpecError("block id " + std::to_string(block) + " out of range [0, " +
                    std::to_string(n_z_) + "]");
  }
}

const Eigen::VectorXd& CovarianceBlocks::theta_cross(int modality) const {
  check_block_id(modality);
  if (modality == kThetaBlock) throw SpecError("theta_cross needs a modality id");
  return theta_cross_[static_cast<std::size_t>(modality - 1)];
}

const Eigen::MatrixXd& CovarianceBlocks::factor(int modality) const {
  check_block_id(modality);
  if (modality == kThetaBlock) throw SpecError("factor needs a modality id");
  return factors_[static_cast<std::size_t>(modality - 1)];
}

double CovarianceBlocks::noise_gram(int i, int j) const {
  check_block_id(i);
  check_block_id(j);
  if (i == kThetaBlock || j == kThetaBlock) {
    throw SpecError("noise_gram needs modality ids");
  }
  return noise_gram_(i - 1, j - 1);
}

Eigen::MatrixXd CovarianceBlocks::template_gram(int i, int j) const {
  return factor(i).transpose() * factor(j);
}

StructuredBlock CovarianceBlocks::structured_block(int i, int j) const {
  return {noise_gram(i, j), factor(i), factor(j)};
}

Eigen::MatrixXd CovarianceBlocks::dense_block(int i, int j) const {
  return structured_block(i, j).expand();
}

Eigen::Index CovarianceBlocks::block_dim(int block) const {
  check_block_id(block);
  return block == kThetaBlock ? 1 : d_;
}

Eigen::MatrixXd CovarianceBlocks::dense_marginal(int block) const {
  check_block_id(block);
  if (block == kThetaBlock) {
    return Eigen::MatrixXd::Constant(1, 1, theta_variance_);
  }
  return dense_block(block, block);
}

Eigen::MatrixXd CovarianceBlocks::dense_pair(int first, int second) const {
  check_block_id(first);
  check_block_id(second);
  if (first == second) throw SpecError("pair needs two distinct blocks");
  const Eigen::Index k1 = block_dim(first);
  const Eigen::Index k2 = block_dim(second);
  Eigen::MatrixXd gamma(k1 + k2, k1 + k2);
  auto fill = [this](Eigen::Ref<Eigen::MatrixXd> dst, int a, int b) {
    if (a == kThetaBlock && b == kThetaBlock) {
      dst(0, 0) = theta_variance_;
    } else if (a == kThetaBlock) {
      dst = theta_cross(b).transpose();
    } else if (b == kThetaBlock) {
      dst = theta_cross(a);
    } else {
      dst = dense_block(a, b);
    }
  };
  fill(gamma.topLeftCorner(k1, k1), first, first);
  fill(gamma.topRightCorner(k1, k2), first, second);
  fill(gamma.bottomLeftCorner(k2, k1), second, first);
  fill(gamma.bottomRightCorner(k2, k2), second, second);
  return gamma;
}

CovarianceBlocks covariance(const MixingMatrix& mixing) {
  return CovarianceBlocks(mixing);
}

}  // namespace mmmi
