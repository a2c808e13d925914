#include "mmmi/sampling.hpp"

#include <utility>

#include "mmmi/errors.hpp"
#include "mmmi/parallel.hpp"

namespace mmmi {

Eigen::MatrixXd sample_proto_latents(std::int64_t n, const ModelSpec& spec,
                                     SeedSpec seed) {
  require_valid(spec);
  if (n < 0) throw SpecError("sample count must be nonnegative");
  const Eigen::Index cols = spec.u_dim();
  Eigen::MatrixXd u(n, cols);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      const CounterRng rng(
          {seed.master_seed, seed.stream_index + static_cast<std::uint64_t>(r)});
      for (Eigen::Index c = 0; c < cols; ++c) {
        u(r, c) = rng.normal_at(static_cast<std::uint64_t>(c));
      }
    }
  });
  return u;
}

LatentBatch apply_structural_equations(const ModelSpec& spec,
                                       const Eigen::MatrixXd& u) {
  require_valid(spec);
  if (u.cols() != spec.u_dim()) {
    throw SpecError("proto-latent width does not match the model");
  }
  const Eigen::Index d = spec.d;
  const auto u_theta = u.leftCols(spec.n_theta);

  LatentBatch batch;
  batch.z_theta = u_theta * spec.eta;
  batch.z.reserve(static_cast<std::size_t>(spec.n_z));
  for (int i = 0; i < spec.n_z; ++i) {
    Eigen::MatrixXd factor(d, spec.n_theta);
    for (int k = 0; k < spec.n_theta; ++k) {
      factor.col(k) = spec.rho_tilde(i, k) * spec.templates[i][k].values;
    }
    Eigen::MatrixXd zi = u_theta * factor.transpose();
    for (int j = 0; j < spec.n_u; ++j) {
      const double w = spec.rho_hat(i, j);
      if (w != 0.0) zi += w * u.middleCols(spec.n_theta + j * d, d);
    }
    batch.z.push_back(std::move(zi));
  }
  return batch;
}

LatentBatch sample_latents(std::int64_t n, const ModelSpec& spec, SeedSpec seed) {
  return apply_structural_equations(spec, sample_proto_latents(n, spec, seed));
}

}  // namespace mmmi
