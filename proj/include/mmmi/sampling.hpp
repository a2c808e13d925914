#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mmmi/model_spec.hpp"
#include "mmmi/rng.hpp"

namespace mmmi {

// n x u_dim matrix of standard normals. Row r is substream
// seed.stream_index + r with entries at indices 0..u_dim-1, so any row
// range regenerates identically regardless of batch boundaries.
Eigen::MatrixXd sample_proto_latents(std::int64_t n, const ModelSpec& spec,
                                     SeedSpec seed);

struct LatentBatch {
  Eigen::VectorXd z_theta;         // n
  std::vector<Eigen::MatrixXd> z;  // n_z blocks, each n x d
};

// z = A u for every row of u (n x u_dim), evaluated blockwise without
// forming the dense mixing matrix.
LatentBatch apply_structural_equations(const ModelSpec& spec,
                                       const Eigen::MatrixXd& u);

LatentBatch sample_latents(std::int64_t n, const ModelSpec& spec, SeedSpec seed);

}  // namespace mmmi
