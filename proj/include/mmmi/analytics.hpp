#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmmi/covariance.hpp"
#include "mmmi/model_spec.hpp"

namespace mmmi {

enum class MiMethod { kDense, kStructured, kClosedForm, kSimpleClosedForm };

// Route selection for MI requests. kAuto picks the structured path for
// d above a threshold and the dense path otherwise.
enum class MiPath { kAuto, kDense, kStructured, kClosedForm };

struct MiValue {
  double nats = 0.0;
  MiMethod method = MiMethod::kDense;
  bool infinite() const { return std::isinf(nats); }
};

const char* mi_method_name(MiMethod method);
std::string block_label(int block);  // "theta", "x1", "x2", ...

struct LogdetResult {
  double value = 0.0;
  bool singular = false;
};

// log det of a symmetric positive (semi)definite matrix via pivoted
// LDLT. A pivot below 1e-12 of the largest pivot marks the matrix
// singular; `value` is meaningful only when `singular` is false.
LogdetResult logdet_psd(const Eigen::MatrixXd& m);

// log det(s I_d + L R^T) through the r x r core s I_r + R^T L,
// O(d r^2 + r^3). Throws FactorizationError when the block is not
// positive definite.
double logdet_structured(const StructuredBlock& block);

// I(first; second) from dense block factorizations. Returns +infinity
// when the pair covariance is singular but both marginals are not
// (deterministic dependence); throws DegenerateBlockError when a
// marginal is singular.
MiValue mi_blocks_numeric(const CovarianceBlocks& cov, int first, int second);

// Same contract as mi_blocks_numeric via the diagonal-plus-low-rank
// path; never factorizes a dense d x d matrix when the noise Gram is
// positive definite. Falls back to the dense path in noise-free corners.
MiValue mi_blocks_structured(const CovarianceBlocks& cov, int first, int second);

MiValue mi_blocks(const CovarianceBlocks& cov, int first, int second,
                  MiPath path = MiPath::kAuto, int dense_limit = 256);

// Closed forms for the two-modality chain with all-ones templates and
// private noise: I(theta;Z1) and I(Z1;Z2) as functions of the four
// coefficients and d.
struct SimplePairMi {
  MiValue theta_z1;
  MiValue z1_z2;
};
SimplePairMi mi_closed_form_simple(double rho_tilde_11, double rho_hat_11,
                                   double rho_tilde_12, double rho_hat_22,
                                   std::int64_t d);

// Scalar reductions of a two-modality spec with homogeneous templates
// (constant templates folded into effective rho_tilde). Inputs outside
// that setting raise NotApplicableError.
struct ClosedFormCoefficients {
  double a = 0.0;   // sum eta_k^2
  double r1 = 0.0;  // sum eta_k rho_tilde_1k
  double r2 = 0.0;  // sum eta_k rho_tilde_2k
  double o = 0.0;   // sum rho_tilde_1k^2
  double p = 0.0;   // sum rho_tilde_1k rho_tilde_2k
  double q = 0.0;   // sum rho_tilde_2k^2
  double b = 0.0;   // o + sum rho_hat_1j^2
  double c = 0.0;   // q + sum rho_hat_2j^2
  double f = 0.0;   // p + sum rho_hat_1j rho_hat_2j
};
ClosedFormCoefficients closed_form_coefficients(const ModelSpec& spec);

struct PairMi {
  MiValue theta_z1;
  MiValue theta_z2;
  MiValue z1_z2;
};
PairMi mi_closed_form_pair(const ClosedFormCoefficients& co, std::int64_t d);

// Pointwise MI of one block pair under the zero-mean Gaussian latent
// law: log p(x,y) - log p(x) - log p(y). Factorizations are prepared
// once; evaluation is O(d * n_theta) per point on the structured path.
class PmiEvaluator {
 public:
  PmiEvaluator(const CovarianceBlocks& cov, int first, int second);
  ~PmiEvaluator();
  PmiEvaluator(PmiEvaluator&&) noexcept;
  PmiEvaluator& operator=(PmiEvaluator&&) noexcept;

  double analytic_mi() const;
  double operator()(const Eigen::VectorXd& point_first,
                    const Eigen::VectorXd& point_second) const;
  // Row r of the result is the PMI of (rows_first.row(r), rows_second.row(r)).
  Eigen::VectorXd evaluate_rows(const Eigen::MatrixXd& rows_first,
                                const Eigen::MatrixXd& rows_second) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double pmi_gaussian(const CovarianceBlocks& cov, int first, int second,
                    const Eigen::VectorXd& point_first,
                    const Eigen::VectorXd& point_second);

// Symmetric (n_z+1)^2 table over blocks {theta, 1..n_z}; diagonal cells
// are not applicable and left empty.
struct MiTable {
  int n_z = 0;
  std::vector<std::optional<MiValue>> cells;

  explicit MiTable(int n_modalities)
      : n_z(n_modalities),
        cells(static_cast<std::size_t>((n_modalities + 1) * (n_modalities + 1))) {}
  std::optional<MiValue>& at(int i, int j) {
    return cells[static_cast<std::size_t>(i * (n_z + 1) + j)];
  }
  const std::optional<MiValue>& at(int i, int j) const {
    return cells[static_cast<std::size_t>(i * (n_z + 1) + j)];
  }
};

struct MiMatrixOptions {
  MiPath path = MiPath::kAuto;
  int dense_limit = 256;
};

MiTable mi_matrix(const ModelSpec& spec, const MiMatrixOptions& options = {});

}  // namespace mmmi
