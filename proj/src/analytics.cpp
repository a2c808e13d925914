#include "mmmi/analytics.hpp"

#include <Eigen/Dense>
#include <limits>
#include <utility>

#include "mmmi/errors.hpp"
#include "mmmi/mixing_matrix.hpp"

namespace mmmi {

namespace {

constexpr double kPivotRelTol = 1e-12;
const double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void throw_degenerate(int block) {
  const std::string label = block_label(block);
  throw DegenerateBlockError(label, "covariance block " + label + " is singular");
}

// Analytic MI is nonnegative; tiny negatives are factorization noise,
// anything larger means the inputs were inconsistent.
double finalize_mi(double nats) {
  if (nats < 0.0) {
    if (nats < -1e-8) {
      throw FactorizationError("negative mutual information from inconsistent blocks");
    }
    return 0.0;
  }
  return nats;
}

void check_pair(const CovarianceBlocks& cov, int first, int second) {
  cov.check_block_id(first);
  cov.check_block_id(second);
  if (first == second) {
    throw SpecError("mutual information needs two distinct blocks");
  }
}

}  // namespace

const char* mi_method_name(MiMethod method) {
  switch (method) {
    case MiMethod::kDense: return "dense";
    case MiMethod::kStructured: return "structured";
    case MiMethod::kClosedForm: return "closed_form";
    case MiMethod::kSimpleClosedForm: return "simple_closed_form";
  }
  return "unknown";
}

std::string block_label(int block) {
  return block == kThetaBlock ? std::string("theta") : "x" + std::to_string(block);
}

LogdetResult logdet_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw FactorizationError("logdet needs a square matrix");
  if (m.rows() == 0) return {0.0, false};
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  const Eigen::VectorXd& d = ldlt.vectorD();
  const double max_pivot = d.cwiseAbs().maxCoeff();
  if (max_pivot <= 0.0) return {0.0, true};
  const double tol = kPivotRelTol * max_pivot;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] <= tol) return {0.0, true};
    sum += std::log(d[i]);
  }
  return {sum, false};
}

double logdet_structured(const StructuredBlock& block) {
  const Eigen::Index d = block.dim();
  const Eigen::Index r = block.rank();
  const double s = block.diag_scale;
  if (block.right.rows() != d || block.right.cols() != r) {
    throw FactorizationError("structured block factor shapes disagree");
  }
  if (r == 0) {
    if (s <= 0.0) {
      throw FactorizationError("structured block is not positive definite");
    }
    return static_cast<double>(d) * std::log(s);
  }
  if (s <= 0.0) {
    if (d <= r) {
      const LogdetResult dense = logdet_psd(block.expand());
      if (dense.singular) {
        throw FactorizationError("structured block is not positive definite");
      }
      return dense.value;
    }
    throw FactorizationError("structured block is not positive definite");
  }
  Eigen::MatrixXd core = block.right.transpose() * block.left;
  core.diagonal().array() += s;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(core);
  double sign = static_cast<double>(lu.permutationP().determinant());
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double u = lu.matrixLU()(i, i);
    if (u == 0.0) throw FactorizationError("structured block is not positive definite");
    if (u < 0.0) sign = -sign;
    log_abs += std::log(std::abs(u));
  }
  if (sign <= 0.0) throw FactorizationError("structured block is not positive definite");
  return static_cast<double>(d - r) * std::log(s) + log_abs;
}

MiValue mi_blocks_numeric(const CovarianceBlocks& cov, int first, int second) {
  check_pair(cov, first, second);
  const LogdetResult ld1 = logdet_psd(cov.dense_marginal(first));
  if (ld1.singular) throw_degenerate(first);
  const LogdetResult ld2 = logdet_psd(cov.dense_marginal(second));
  if (ld2.singular) throw_degenerate(second);
  const LogdetResult ldg = logdet_psd(cov.dense_pair(first, second));
  if (ldg.singular) return {kInf, MiMethod::kDense};
  return {finalize_mi(0.5 * (ld1.value + ld2.value - ldg.value)), MiMethod::kDense};
}

namespace {

MiValue structured_theta_pair(const CovarianceBlocks& cov, int modality) {
  const double a = cov.theta_variance();
  if (a <= 0.0) throw_degenerate(kThetaBlock);
  const double s = cov.noise_gram(modality, modality);
  if (s <= 0.0) return mi_blocks_numeric(cov, kThetaBlock, modality);
  const Eigen::MatrixXd g = cov.template_gram(modality, modality);
  Eigen::MatrixXd core = g;
  core.diagonal().array() += s;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(core);
  const Eigen::VectorXd w = ldlt.solve(g * cov.eta());
  const double q_over_a = cov.eta().dot(w) / a;
  if (1.0 - q_over_a <= 0.0) return {kInf, MiMethod::kStructured};
  return {finalize_mi(-0.5 * std::log1p(-q_over_a)), MiMethod::kStructured};
}

MiValue structured_modality_pair(const CovarianceBlocks& cov, int i, int j) {
  const double sii = cov.noise_gram(i, i);
  const double sjj = cov.noise_gram(j, j);
  const double sij = cov.noise_gram(i, j);
  if (sii <= 0.0 || sjj <= 0.0) return mi_blocks_numeric(cov, i, j);
  const double det_s = sii * sjj - sij * sij;
  const int r = cov.n_theta();
  if (det_s <= kPivotRelTol * sii * sjj) {
    // The noise Gram is singular while both marginals are positive
    // definite; the pair covariance retains at most n_theta positive
    // directions beyond the noise span, so for d > n_theta the pair is
    // deterministically linked. The tiny remaining corner goes dense.
    if (cov.d() > r) return {kInf, MiMethod::kStructured};
    return mi_blocks_numeric(cov, i, j);
  }
  const Eigen::MatrixXd gii = cov.template_gram(i, i);
  const Eigen::MatrixXd gij = cov.template_gram(i, j);
  const Eigen::MatrixXd gjj = cov.template_gram(j, j);

  Eigen::MatrixXd marg_i = gii;
  marg_i.diagonal().array() += sii;
  Eigen::MatrixXd marg_j = gjj;
  marg_j.diagonal().array() += sjj;
  const LogdetResult a_i = logdet_psd(marg_i);
  const LogdetResult a_j = logdet_psd(marg_j);
  if (a_i.singular) throw_degenerate(i);
  if (a_j.singular) throw_degenerate(j);

  const double alpha = sjj / det_s;
  const double delta = sii / det_s;
  const double gamma = -sij / det_s;
  Eigen::MatrixXd core =
      alpha * gii + delta * gjj + gamma * (gij + gij.transpose());
  core.diagonal().array() += 1.0;
  const LogdetResult core_ld = logdet_psd(core);
  if (core_ld.singular) {
    throw FactorizationError("pair core factorization failed");
  }

  // 0.5 (ld_i + ld_j - ld_gamma) with the d-scaled diagonal terms folded
  // into one log1p so the large-d cancellation never happens explicitly.
  const double rho2 = sij * sij / (sii * sjj);
  const double nats =
      0.5 * (-static_cast<double>(cov.d()) * std::log1p(-rho2) -
             static_cast<double>(r) * (std::log(sii) + std::log(sjj)) +
             a_i.value + a_j.value - core_ld.value);
  return {finalize_mi(nats), MiMethod::kStructured};
}

}  // namespace

MiValue mi_blocks_structured(const CovarianceBlocks& cov, int first, int second) {
  check_pair(cov, first, second);
  if (first == kThetaBlock) return structured_theta_pair(cov, second);
  if (second == kThetaBlock) return structured_theta_pair(cov, first);
  return structured_modality_pair(cov, first, second);
}

MiValue mi_blocks(const CovarianceBlocks& cov, int first, int second, MiPath path,
                  int dense_limit) {
  switch (path) {
    case MiPath::kDense:
      return mi_blocks_numeric(cov, first, second);
    case MiPath::kStructured:
      return mi_blocks_structured(cov, first, second);
    case MiPath::kAuto:
      return cov.d() > dense_limit ? mi_blocks_structured(cov, first, second)
                                   : mi_blocks_numeric(cov, first, second);
    case MiPath::kClosedForm:
      throw NotApplicableError(
          "closed-form route is selected at the model level; use mi_matrix");
  }
  throw SpecError("unknown MI path");
}

SimplePairMi mi_closed_form_simple(double rho_tilde_11, double rho_hat_11,
                                   double rho_tilde_12, double rho_hat_22,
                                   std::int64_t d) {
  if (d < 1) throw SpecError("d must be positive");
  const double dd = static_cast<double>(d);
  const double den1 = rho_hat_11 * rho_hat_11 + dd * rho_tilde_11 * rho_tilde_11;
  const double den2 = rho_hat_22 * rho_hat_22 + dd * rho_tilde_12 * rho_tilde_12;
  if (den1 <= 0.0) throw_degenerate(1);
  if (den2 <= 0.0) throw_degenerate(2);

  SimplePairMi out;
  out.theta_z1.method = MiMethod::kSimpleClosedForm;
  const double arg1 = rho_hat_11 * rho_hat_11 / den1;
  out.theta_z1.nats = arg1 <= 0.0 ? kInf : finalize_mi(-0.5 * std::log(arg1));

  // 1 - d^2 rt11^2 rt12^2 / (den1 den2), expanded so nothing cancels.
  const double num2 = rho_hat_11 * rho_hat_11 * rho_hat_22 * rho_hat_22 +
                      dd * rho_tilde_11 * rho_tilde_11 * rho_hat_22 * rho_hat_22 +
                      dd * rho_tilde_12 * rho_tilde_12 * rho_hat_11 * rho_hat_11;
  out.z1_z2.method = MiMethod::kSimpleClosedForm;
  const double arg2 = num2 / (den1 * den2);
  out.z1_z2.nats = arg2 <= 0.0 ? kInf : finalize_mi(-0.5 * std::log(arg2));
  return out;
}

ClosedFormCoefficients closed_form_coefficients(const ModelSpec& spec) {
  require_valid(spec);
  if (spec.n_z != 2) {
    throw NotApplicableError("closed forms cover exactly two modalities");
  }
  Eigen::MatrixXd eff(2, spec.n_theta);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < spec.n_theta; ++k) {
      const auto value = spec.templates[i][k].homogeneous_value();
      if (!value) {
        throw NotApplicableError(
            "closed forms need homogeneous (constant) templates");
      }
      eff(i, k) = spec.rho_tilde(i, k) * *value;
    }
  }
  ClosedFormCoefficients co;
  co.a = spec.eta.squaredNorm();
  co.r1 = eff.row(0).dot(spec.eta);
  co.r2 = eff.row(1).dot(spec.eta);
  co.o = eff.row(0).squaredNorm();
  co.q = eff.row(1).squaredNorm();
  co.p = eff.row(0).dot(eff.row(1));
  co.b = co.o + spec.rho_hat.row(0).squaredNorm();
  co.c = co.q + spec.rho_hat.row(1).squaredNorm();
  co.f = co.p + spec.rho_hat.row(0).dot(spec.rho_hat.row(1));
  return co;
}

PairMi mi_closed_form_pair(const ClosedFormCoefficients& co, std::int64_t d) {
  if (d < 1) throw SpecError("d must be positive");
  const double dd = static_cast<double>(d);
  if (co.a <= 0.0) throw_degenerate(kThetaBlock);
  const double m1 = co.b + (dd - 1.0) * co.o;
  const double e1 = co.b - co.o;
  const double m2 = co.c + (dd - 1.0) * co.q;
  const double e2 = co.c - co.q;
  if (m1 <= 0.0 || (d > 1 && e1 <= 0.0)) throw_degenerate(1);
  if (m2 <= 0.0 || (d > 1 && e2 <= 0.0)) throw_degenerate(2);

  const auto theta_mi = [&](double rk, double mk) {
    const double x = dd * rk * rk / (co.a * mk);
    MiValue v;
    v.method = MiMethod::kClosedForm;
    v.nats = 1.0 - x <= 0.0 ? kInf : finalize_mi(-0.5 * std::log1p(-x));
    return v;
  };

  PairMi out;
  out.theta_z1 = theta_mi(co.r1, m1);
  out.theta_z2 = theta_mi(co.r2, m2);

  double nats = 0.0;
  bool infinite = false;
  if (d > 1) {
    const double fp = co.f - co.p;
    const double cross = fp * fp / (e1 * e2);
    if (1.0 - cross <= 0.0) {
      infinite = true;
    } else {
      nats += -0.5 * (dd - 1.0) * std::log1p(-cross);
    }
  }
  const double fdp = co.f + (dd - 1.0) * co.p;
  const double cross = fdp * fdp / (m1 * m2);
  if (1.0 - cross <= 0.0) {
    infinite = true;
  } else {
    nats += -0.5 * std::log1p(-cross);
  }
  out.z1_z2.method = MiMethod::kClosedForm;
  out.z1_z2.nats = infinite ? kInf : finalize_mi(nats);
  return out;
}

struct PmiEvaluator::Impl {
  int first = 0;
  int second = 0;
  Eigen::Index k1 = 0;
  Eigen::Index k2 = 0;
  double mi = 0.0;
  bool structured = false;

  // Dense path: factorizations of the pair and both marginals.
  Eigen::LDLT<Eigen::MatrixXd> joint;
  Eigen::LDLT<Eigen::MatrixXd> marg1;
  Eigen::LDLT<Eigen::MatrixXd> marg2;

  // Structured modality pair: S2^{-1} entries, factors, and the r x r
  // Woodbury cores of the joint and both marginals.
  bool theta_pair = false;
  double s1 = 0.0, s2 = 0.0;
  double alpha = 0.0, gamma = 0.0, delta = 0.0;
  Eigen::MatrixXd p1, p2;
  Eigen::LDLT<Eigen::MatrixXd> joint_core;
  Eigen::LDLT<Eigen::MatrixXd> marg1_core;
  Eigen::LDLT<Eigen::MatrixXd> marg2_core;

  // Structured theta pair: theta variance, Sigma^{-1} sigma_theta, and
  // the conditional theta variance a - q.
  double theta_var = 0.0;
  double cond_var = 0.0;
  Eigen::VectorXd solve_cross;

  double quad_marg_structured(const Eigen::VectorXd& x, const Eigen::MatrixXd& p,
                              double s, const Eigen::LDLT<Eigen::MatrixXd>& core) const {
    const Eigen::VectorXd h = p.transpose() * x;
    return (x.squaredNorm() - h.dot(core.solve(h))) / s;
  }
};

PmiEvaluator::PmiEvaluator(const CovarianceBlocks& cov, int first, int second)
    : impl_(std::make_unique<Impl>()) {
  check_pair(cov, first, second);
  Impl& im = *impl_;
  im.first = first;
  im.second = second;
  im.k1 = cov.block_dim(first);
  im.k2 = cov.block_dim(second);

  const int modality_first = first == kThetaBlock ? second : first;
  const bool has_theta = first == kThetaBlock || second == kThetaBlock;
  const double a = cov.theta_variance();

  bool use_structured = false;
  if (has_theta) {
    use_structured = a > 0.0 && cov.noise_gram(modality_first, modality_first) > 0.0;
  } else {
    const double sii = cov.noise_gram(first, first);
    const double sjj = cov.noise_gram(second, second);
    if (sii > 0.0 && sjj > 0.0) {
      const double sij = cov.noise_gram(first, second);
      use_structured = sii * sjj - sij * sij > kPivotRelTol * sii * sjj;
    }
  }

  if (use_structured && has_theta) {
    const int i = modality_first;
    const MiValue v = mi_blocks_structured(cov, kThetaBlock, i);
    im.mi = v.nats;
    im.structured = true;
    im.theta_pair = true;
    im.theta_var = a;
    im.s1 = cov.noise_gram(i, i);
    im.p1 = cov.factor(i);
    Eigen::MatrixXd core = cov.template_gram(i, i);
    core.diagonal().array() += im.s1;
    im.marg1_core.compute(core);
    const Eigen::VectorXd& v_cross = cov.theta_cross(i);
    const Eigen::VectorXd h = im.p1.transpose() * v_cross;
    im.solve_cross =
        (v_cross - im.p1 * im.marg1_core.solve(h)) / im.s1;  // Sigma^{-1} sigma
    im.cond_var = a - v_cross.dot(im.solve_cross);
  } else if (use_structured) {
    const MiValue v = mi_blocks_structured(cov, first, second);
    im.mi = v.nats;
    im.structured = true;
    im.s1 = cov.noise_gram(first, first);
    im.s2 = cov.noise_gram(second, second);
    const double sij = cov.noise_gram(first, second);
    const double det_s = im.s1 * im.s2 - sij * sij;
    im.alpha = im.s2 / det_s;
    im.delta = im.s1 / det_s;
    im.gamma = -sij / det_s;
    im.p1 = cov.factor(first);
    im.p2 = cov.factor(second);
    const Eigen::MatrixXd gii = cov.template_gram(first, first);
    const Eigen::MatrixXd gij = cov.template_gram(first, second);
    const Eigen::MatrixXd gjj = cov.template_gram(second, second);
    Eigen::MatrixXd core =
        im.alpha * gii + im.delta * gjj + im.gamma * (gij + gij.transpose());
    core.diagonal().array() += 1.0;
    im.joint_core.compute(core);
    Eigen::MatrixXd c1 = gii;
    c1.diagonal().array() += im.s1;
    im.marg1_core.compute(c1);
    Eigen::MatrixXd c2 = gjj;
    c2.diagonal().array() += im.s2;
    im.marg2_core.compute(c2);
  } else {
    const MiValue v = mi_blocks_numeric(cov, first, second);
    im.mi = v.nats;
    im.joint.compute(cov.dense_pair(first, second));
    im.marg1.compute(cov.dense_marginal(first));
    im.marg2.compute(cov.dense_marginal(second));
  }
  if (std::isinf(im.mi)) {
    throw DegenerateBlockError(
        "joint", "pointwise MI is undefined under deterministic dependence");
  }
}

PmiEvaluator::~PmiEvaluator() = default;
PmiEvaluator::PmiEvaluator(PmiEvaluator&&) noexcept = default;
PmiEvaluator& PmiEvaluator::operator=(PmiEvaluator&&) noexcept = default;

double PmiEvaluator::analytic_mi() const { return impl_->mi; }

double PmiEvaluator::operator()(const Eigen::VectorXd& point_first,
                                const Eigen::VectorXd& point_second) const {
  const Impl& im = *impl_;
  if (point_first.size() != im.k1 || point_second.size() != im.k2) {
    throw SpecError("pmi point has wrong block dimension");
  }
  double quad_joint = 0.0;
  double quad_1 = 0.0;
  double quad_2 = 0.0;
  if (!im.structured) {
    Eigen::VectorXd w(im.k1 + im.k2);
    w << point_first, point_second;
    quad_joint = w.dot(im.joint.solve(w));
    quad_1 = point_first.dot(im.marg1.solve(point_first));
    quad_2 = point_second.dot(im.marg2.solve(point_second));
  } else if (im.theta_pair) {
    const double t = im.first == kThetaBlock ? point_first[0] : point_second[0];
    const Eigen::VectorXd& x =
        im.first == kThetaBlock ? point_second : point_first;
    quad_2 = im.quad_marg_structured(x, im.p1, im.s1, im.marg1_core);
    const double resid = t - im.solve_cross.dot(x);
    quad_joint = quad_2 + resid * resid / im.cond_var;
    quad_1 = t * t / im.theta_var;
    // quad_1/quad_2 roles follow (theta, modality) order regardless of
    // which argument carried theta; the pmi sum below is symmetric.
  } else {
    const Eigen::VectorXd ki = im.alpha * point_first + im.gamma * point_second;
    const Eigen::VectorXd kj = im.gamma * point_first + im.delta * point_second;
    const double quad_k =
        point_first.dot(ki) + point_second.dot(kj);
    const Eigen::VectorXd g = im.p1.transpose() * ki + im.p2.transpose() * kj;
    quad_joint = quad_k - g.dot(im.joint_core.solve(g));
    quad_1 = im.quad_marg_structured(point_first, im.p1, im.s1, im.marg1_core);
    quad_2 = im.quad_marg_structured(point_second, im.p2, im.s2, im.marg2_core);
  }
  return im.mi - 0.5 * (quad_joint - quad_1 - quad_2);
}

Eigen::VectorXd PmiEvaluator::evaluate_rows(const Eigen::MatrixXd& rows_first,
                                            const Eigen::MatrixXd& rows_second) const {
  if (rows_first.rows() != rows_second.rows()) {
    throw SpecError("pmi row batches must have equal length");
  }
  Eigen::VectorXd out(rows_first.rows());
  for (Eigen::Index r = 0; r < rows_first.rows(); ++r) {
    out[r] = (*this)(rows_first.row(r).transpose(), rows_second.row(r).transpose());
  }
  return out;
}

double pmi_gaussian(const CovarianceBlocks& cov, int first, int second,
                    const Eigen::VectorXd& point_first,
                    const Eigen::VectorXd& point_second) {
  return PmiEvaluator(cov, first, second)(point_first, point_second);
}

MiTable mi_matrix(const ModelSpec& spec, const MiMatrixOptions& options) {
  require_valid(spec);
  MiTable table(spec.n_z);
  if (options.path == MiPath::kClosedForm) {
    const ClosedFormCoefficients co = closed_form_coefficients(spec);
    const PairMi pair = mi_closed_form_pair(co, spec.d);
    table.at(0, 1) = pair.theta_z1;
    table.at(1, 0) = pair.theta_z1;
    table.at(0, 2) = pair.theta_z2;
    table.at(2, 0) = pair.theta_z2;
    table.at(1, 2) = pair.z1_z2;
    table.at(2, 1) = pair.z1_z2;
    return table;
  }
  const CovarianceBlocks cov = covariance(MixingMatrix(spec));
  for (int i = 0; i <= spec.n_z; ++i) {
    for (int j = i + 1; j <= spec.n_z; ++j) {
      const MiValue v = mi_blocks(cov, i, j, options.path, options.dense_limit);
      table.at(i, j) = v;
      table.at(j, i) = v;
    }
  }
  return table;
}

}  // namespace mmmi
