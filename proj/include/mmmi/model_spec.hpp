#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace mmmi {

// A d-dimensional loading template for one (modality, proto-latent) edge.
struct Template {
  Eigen::VectorXd values;

  static Template zeros(int d);
  static Template ones(int d);
  static Template point_mass(int d, int index);
  static Template gaussian_bump(int d, double center, double width);
  static Template explicit_values(Eigen::VectorXd v);

  int dim() const { return static_cast<int>(values.size()); }
  bool is_zero() const;
  double squared_norm() const { return values.squaredNorm(); }
  // The common entry value if all entries are equal, nullopt otherwise.
  std::optional<double> homogeneous_value() const;
};

// Linear structural model over proto-latents u = (u_tilde, u_hat_1..u_hat_{n_u}):
//   z_theta = sum_k eta[k] u_tilde[k]
//   z_i     = sum_k rho_tilde(i,k) u_tilde[k] * template(i,k)
//           + sum_j rho_hat(i,j) u_hat[j]
// All proto-latents are i.i.d. standard normal; u_hat blocks are d-dimensional.
struct ModelSpec {
  int n_theta = 0;  // shared proto-latents
  int n_u = 0;      // modality noise blocks
  int n_z = 0;      // modalities
  int d = 0;        // per-modality dimension

  Eigen::VectorXd eta;                           // [n_theta]
  Eigen::MatrixXd rho_tilde;                     // n_z x n_theta
  Eigen::MatrixXd rho_hat;                       // n_z x n_u
  std::vector<std::vector<Template>> templates;  // [n_z][n_theta], each dim d

  int u_dim() const { return n_theta + n_u * d; }
  int z_dim() const { return 1 + n_z * d; }
};

struct Diagnostic {
  std::string where;
  std::string message;
};

// Structural checks: dimension agreement, finiteness, template shapes.
// Returns every violation found; empty means the spec is well formed.
std::vector<Diagnostic> validate_spec(const ModelSpec& spec);

// Throws SpecError listing all diagnostics if validate_spec finds any.
void require_valid(const ModelSpec& spec);

// Ladder family: one shared proto-latent feeding n_z modalities with
// geometric decay beta^-i on the shared path and alpha^-|i-j| cross-noise
// couplings (1-based modality index i, noise block index j). alpha = beta = 1
// is the uniform, permutation-symmetric limit; values below 1 are rejected.
struct ScalableSpecParams {
  double alpha = 2.0;
  double beta = 2.0;
  double eta = 1.0;
  double rho_tilde_base = 1.0;
  double rho_hat_base = 1.0;
  int n_z = 2;
  int d = 1;
};

ModelSpec expand_scalable_spec(const ScalableSpecParams& params);

// Two-modality astrophysical benchmark: two shared proto-latents (mass,
// atmosphere), imaging modality loaded on both, spectral modality loaded
// on the mass path only.
struct BlackholeParams {
  double eta1 = 1.0;
  double eta2 = 1.0;
  double rho_tilde_11 = 1.0;
  double rho_tilde_12 = 1.0;
  double rho_tilde_21 = 1.0;
  double rho_hat_11 = 1.0;
  double rho_hat_22 = 1.0;
};

ModelSpec build_blackhole_spec(const BlackholeParams& params, Template t_center,
                               Template t_diffuse);

// Minimal two-modality chain theta -> {Z1, Z2} with all-ones templates.
ModelSpec make_simple_dag_spec(double eta, double rho_tilde_1, double rho_tilde_2,
                               double rho_hat_1, double rho_hat_2, int d);

}  // namespace mmmi
