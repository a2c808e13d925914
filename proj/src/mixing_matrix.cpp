#include "mmmi/mixing_matrix.hpp"

#include "mmmi/errors.hpp"

namespace mmmi {

MixingMatrix::MixingMatrix(ModelSpec spec) : spec_(std::move(spec)) {
  require_valid(spec_);
}

Eigen::MatrixXd MixingMatrix::to_dense() const {
  const ModelSpec& s = spec_;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows(), cols());
  a.block(0, 0, 1, s.n_theta) = s.eta.transpose();
  for (int i = 0; i < s.n_z; ++i) {
    const Eigen::Index row0 = 1 + static_cast<Eigen::Index>(i) * s.d;
    for (int k = 0; k < s.n_theta; ++k) {
      a.block(row0, k, s.d, 1) = s.rho_tilde(i, k) * s.templates[i][k].values;
    }
    for (int j = 0; j < s.n_u; ++j) {
      const Eigen::Index col0 = s.n_theta + static_cast<Eigen::Index>(j) * s.d;
      a.block(row0, col0, s.d, s.d).diagonal().setConstant(s.rho_hat(i, j));
    }
  }
  return a;
}

Eigen::VectorXd MixingMatrix::apply(const Eigen::VectorXd& u) const {
  const ModelSpec& s = spec_;
  if (u.size() != cols()) throw SpecError("proto-latent vector has wrong size");
  Eigen::VectorXd z(rows());
  const auto u_tilde = u.head(s.n_theta);
  z[0] = s.eta.dot(u_tilde);
  for (int i = 0; i < s.n_z; ++i) {
    auto zi = z.segment(1 + static_cast<Eigen::Index>(i) * s.d, s.d);
    zi.setZero();
    for (int k = 0; k < s.n_theta; ++k) {
      const double w = s.rho_tilde(i, k) * u_tilde[k];
      if (w != 0.0) zi += w * s.templates[i][k].values;
    }
    for (int j = 0; j < s.n_u; ++j) {
      const double w = s.rho_hat(i, j);
      if (w != 0.0) {
        zi += w * u.segment(s.n_theta + static_cast<Eigen::Index>(j) * s.d, s.d);
      }
    }
  }
  return z;
}

MixingMatrix build_mixing_matrix(ModelSpec spec) {
  return MixingMatrix(std::move(spec));
}

}  // namespace mmmi
