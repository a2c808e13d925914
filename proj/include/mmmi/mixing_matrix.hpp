#pragma once

#include <Eigen/Core>

#include "mmmi/model_spec.hpp"

namespace mmmi {

// The block-structured linear map z = A u. Row block 0 is the scalar
// z_theta row; row block i (1-based) is modality i. Column block 0 holds
// the n_theta shared proto-latents; column block j holds noise block j.
// Kept in structured form; the dense matrix is expanded on demand only
// (it is O((1 + n_z d)(n_theta + n_u d)) and large for image-sized d).
class MixingMatrix {
 public:
  explicit MixingMatrix(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  Eigen::Index rows() const { return spec_.z_dim(); }
  Eigen::Index cols() const { return spec_.u_dim(); }

  Eigen::MatrixXd to_dense() const;

  // z = A u for a single proto-latent vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

 private:
  ModelSpec spec_;
};

MixingMatrix build_mixing_matrix(ModelSpec spec);

}  // namespace mmmi
