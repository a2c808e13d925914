#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mmmi/covariance.hpp"
#include "mmmi/errors.hpp"
#include "mmmi/mixing_matrix.hpp"
#include "mmmi/model_spec.hpp"
#include "mmmi/sampling.hpp"

using namespace mmmi;

namespace {

ModelSpec small_spec() {
  ModelSpec spec;
  spec.n_theta = 2;
  spec.n_u = 2;
  spec.n_z = 2;
  spec.d = 4;
  spec.eta = Eigen::Vector2d(0.9, -0.4);
  spec.rho_tilde.resize(2, 2);
  spec.rho_tilde << 0.7, 0.1, -0.3, 0.8;
  spec.rho_hat.resize(2, 2);
  spec.rho_hat << 1.0, 0.2, 0.0, 0.9;
  spec.templates = {{Template::ones(4), Template::point_mass(4, 2)},
                    {Template::gaussian_bump(4, 1.5, 1.0), Template::ones(4)}};
  require_valid(spec);
  return spec;
}

}  // namespace

TEST_CASE("structural equations reproduce the d=1 hand example") {
  // A = [[1,0,0],[1,1,0],[1,0,1]]: u = (1,1,1) -> z = (1,2,2).
  const ModelSpec spec = make_simple_dag_spec(1.0, 1.0, 1.0, 1.0, 1.0, 1);
  Eigen::MatrixXd u(1, 3);
  u << 1, 1, 1;
  const LatentBatch batch = apply_structural_equations(spec, u);
  CHECK(batch.z_theta(0) == 1.0);
  CHECK(batch.z[0](0, 0) == 2.0);
  CHECK(batch.z[1](0, 0) == 2.0);
}

TEST_CASE("structural equations agree with the dense mixing matrix") {
  const ModelSpec spec = small_spec();
  const Eigen::MatrixXd u = sample_proto_latents(16, spec, {99, 0});
  const LatentBatch batch = apply_structural_equations(spec, u);
  const Eigen::MatrixXd dense = MixingMatrix(spec).to_dense();
  const Eigen::MatrixXd z_dense = u * dense.transpose();
  CHECK((batch.z_theta - z_dense.col(0)).cwiseAbs().maxCoeff() <= 1e-13);
  for (int i = 0; i < spec.n_z; ++i) {
    const Eigen::MatrixXd block =
        z_dense.middleCols(1 + static_cast<Eigen::Index>(i) * spec.d, spec.d);
    CHECK((batch.z[static_cast<std::size_t>(i)] - block).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("row substreams make batches boundary-invariant") {
  const ModelSpec spec = small_spec();
  const Eigen::MatrixXd all = sample_proto_latents(10, spec, {31337, 5});
  const Eigen::MatrixXd tail = sample_proto_latents(5, spec, {31337, 8});
  CHECK((all.middleRows(3, 5) - tail).cwiseAbs().maxCoeff() == 0.0);
  // Same call is bitwise reproducible.
  const Eigen::MatrixXd again = sample_proto_latents(10, spec, {31337, 5});
  CHECK((all - again).cwiseAbs().maxCoeff() == 0.0);
  // A different master seed decouples the stream.
  const Eigen::MatrixXd other = sample_proto_latents(10, spec, {31338, 5});
  CHECK((all - other).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("proto latent moments satisfy the clt envelope at n = 1e6") {
  const ModelSpec spec = make_simple_dag_spec(1.0, 1.0, 1.0, 1.0, 1.0, 1);
  const std::int64_t n = 1000000;
  const Eigen::MatrixXd u = sample_proto_latents(n, spec, {777, 0});
  REQUIRE(u.cols() == 3);
  const double bound_mean = 4.0 / std::sqrt(static_cast<double>(n));
  const double bound_var = 4.0 * std::sqrt(2.0 / static_cast<double>(n));
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    const double mean = u.col(c).mean();
    const double var = (u.col(c).array() - mean).square().sum() / static_cast<double>(n - 1);
    CHECK(std::abs(mean) <= bound_mean);
    CHECK(std::abs(var - 1.0) <= bound_var);
  }
  // Distinct columns of one row come from one substream but distinct
  // indices; cross-correlation must vanish at CLT scale.
  const double cross = (u.col(0).array() * u.col(1).array()).mean();
  CHECK(std::abs(cross) <= bound_mean);
}

TEST_CASE("latent covariance matches analytics within five standard errors") {
  ModelSpec spec;
  spec.n_theta = 1;
  spec.n_u = 2;
  spec.n_z = 2;
  spec.d = 8;
  spec.eta = Eigen::VectorXd::Constant(1, 1.0);
  spec.rho_tilde.resize(2, 1);
  spec.rho_tilde << 0.8, 0.5;
  spec.rho_hat.resize(2, 2);
  spec.rho_hat << 1.0, 0.3, 0.0, 0.9;
  spec.templates = {{Template::gaussian_bump(8, 3.5, 2.0)}, {Template::ones(8)}};
  require_valid(spec);

  const std::int64_t n = 200000;
  const LatentBatch batch = sample_latents(n, spec, {2025081901u, 0});
  const Eigen::Index z_dim = spec.z_dim();
  Eigen::MatrixXd z(n, z_dim);
  z.col(0) = batch.z_theta;
  z.middleCols(1, 8) = batch.z[0];
  z.middleCols(9, 8) = batch.z[1];

  const Eigen::RowVectorXd mean = z.colwise().mean();
  const Eigen::MatrixXd centered = z.rowwise() - mean;
  const Eigen::MatrixXd empirical = centered.adjoint() * centered / static_cast<double>(n - 1);

  const CovarianceBlocks cov(build_mixing_matrix(spec));
  Eigen::MatrixXd analytic(z_dim, z_dim);
  analytic(0, 0) = cov.theta_variance();
  for (int i = 1; i <= 2; ++i) {
    const Eigen::Index off = 1 + static_cast<Eigen::Index>(i - 1) * 8;
    analytic.block(0, off, 1, 8) = cov.theta_cross(i).transpose();
    analytic.block(off, 0, 8, 1) = cov.theta_cross(i);
    for (int j = 1; j <= 2; ++j) {
      const Eigen::Index off_j = 1 + static_cast<Eigen::Index>(j - 1) * 8;
      analytic.block(off, off_j, 8, 8) = cov.dense_block(i, j);
    }
  }

  std::int64_t entries = 0;
  std::int64_t within3 = 0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z_dim; ++i) {
    for (Eigen::Index j = i; j < z_dim; ++j) {
      const double se = std::sqrt(
          (analytic(i, i) * analytic(j, j) + analytic(i, j) * analytic(i, j)) /
          static_cast<double>(n));
      REQUIRE(se > 0.0);
      const double units = std::abs(empirical(i, j) - analytic(i, j)) / se;
      ++entries;
      worst = std::max(worst, units);
      if (units <= 3.0) ++within3;
      CHECK(units <= 5.0);
    }
  }
  CAPTURE(worst);
  CHECK(static_cast<double>(within3) >= 0.99 * static_cast<double>(entries));
}

TEST_CASE("sampling rejects malformed requests") {
  const ModelSpec spec = small_spec();
  CHECK_THROWS_AS(sample_proto_latents(-1, spec, {0, 0}), SpecError);
  const Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(3, spec.u_dim() + 1);
  CHECK_THROWS_AS(apply_structural_equations(spec, wrong), SpecError);
  // n = 0 is a valid empty batch.
  const LatentBatch empty = sample_latents(0, spec, {0, 0});
  CHECK(empty.z_theta.size() == 0);
  REQUIRE(empty.z.size() == 2);
  CHECK(empty.z[0].rows() == 0);
  CHECK(empty.z[0].cols() == spec.d);
}
