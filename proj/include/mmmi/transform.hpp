#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mmmi/rng.hpp"

namespace mmmi {

enum class BijectionKind {
  kIdentity,
  kDiagonalAffine,
  kPermutation,
  kHouseholder,
  kAffineCoupling,
  kChain,
};

const char* bijection_kind_name(BijectionKind kind);

// Immutable exactly invertible map on d-vectors. Forward, inverse, and
// the forward log |det J| are pure, so one instance can serve many
// threads. Copies share parameters.
class Bijection {
 public:
  static Bijection identity(Eigen::Index dim);
  // Elementwise y = scale * x + shift; every scale entry nonzero.
  static Bijection diagonal_affine(Eigen::VectorXd scale, Eigen::VectorXd shift);
  // y[i] = x[perm[i]]; perm must visit every index exactly once.
  static Bijection permutation(std::vector<Eigen::Index> perm);
  // Reflection y = x - 2 v (v^T x); v is normalized internally.
  static Bijection householder(Eigen::VectorXd v);
  // Split x into a passthrough head (ceil(d/2)) and a transformed tail;
  // the tail is scaled by exp(s(head)) and shifted by t(head), where
  // s, t are heads of a fixed random two-layer tanh net and s is
  // bounded to [-clamp, clamp]. Weights are drawn sequentially from
  // rng; init scales are kept mild (1/sqrt(fan-in), 0.5/sqrt(hidden))
  // so warped data stays in the regime sample estimators handle well.
  // d = 1 leaves no tail and degenerates to the identity.
  static Bijection affine_coupling(Eigen::Index dim, CounterRng& rng,
                                   double clamp = 2.0);
  static Bijection affine_coupling(Eigen::Index dim, SeedSpec seed,
                                   double clamp = 2.0);
  static Bijection chain(std::vector<Bijection> layers);

  BijectionKind kind() const;
  Eigen::Index dim() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& y) const;
  double forward_log_det_jacobian(const Eigen::VectorXd& x) const;

  // Row-wise application; row r of the result is forward(x.row(r)).
  Eigen::MatrixXd forward_rows(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse_rows(const Eigen::MatrixXd& y) const;

  // Canonical byte encoding of kind, dimension, and all parameters;
  // equal seeds must produce byte-equal encodings.
  std::vector<std::uint8_t> serialized_parameters() const;

 private:
  struct Data;
  explicit Bijection(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

// Alternating permutation / affine-coupling / householder layers with
// all parameters drawn sequentially from CounterRng(seed).
Bijection make_chain(Eigen::Index dim, int depth, SeedSpec seed,
                     double clamp = 2.0);

enum class TransformKind { kIdentity, kChain, kExternal };

const char* transform_kind_name(TransformKind kind);

struct TransformEntry {
  TransformKind kind = TransformKind::kIdentity;
  int depth = 0;        // chain only
  double clamp = 2.0;   // chain only
};

// Per-modality transform recipe. Parameters are never stored directly:
// modality i (1-based) rebuilds its chain from CounterRng({seed, i}),
// so the recipe alone reproduces the exact maps.
struct TransformPlan {
  std::uint64_t seed = 0;
  std::vector<TransformEntry> entries;

  bool any_external() const;
  // Builds modality i's bijection (i is 1-based). External entries
  // cannot be instantiated here and throw NotApplicableError.
  Bijection instantiate(int modality, Eigen::Index dim) const;
};

}  // namespace mmmi
