#include "mmmi/transform.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <utility>

#include "mmmi/errors.hpp"

namespace mmmi {

namespace {

constexpr Eigen::Index kCouplingHidden = 16;

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
  append_u64(out, std::bit_cast<std::uint64_t>(v));
}

void append_vector(std::vector<std::uint8_t>& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) append_f64(out, v[i]);
}

void append_matrix(std::vector<std::uint8_t>& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) append_f64(out, m(r, c));
  }
}

}  // namespace

const char* bijection_kind_name(BijectionKind kind) {
  switch (kind) {
    case BijectionKind::kIdentity: return "identity";
    case BijectionKind::kDiagonalAffine: return "diagonal_affine";
    case BijectionKind::kPermutation: return "permutation";
    case BijectionKind::kHouseholder: return "householder";
    case BijectionKind::kAffineCoupling: return "affine_coupling";
    case BijectionKind::kChain: return "chain";
  }
  return "unknown";
}

const char* transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::kIdentity: return "identity";
    case TransformKind::kChain: return "chain";
    case TransformKind::kExternal: return "external";
  }
  return "unknown";
}

struct Bijection::Data {
  BijectionKind kind = BijectionKind::kIdentity;
  Eigen::Index dim = 0;

  Eigen::VectorXd scale, shift;                  // diagonal affine
  std::vector<Eigen::Index> perm, inv_perm;      // permutation
  Eigen::VectorXd reflect;                       // householder unit vector

  // coupling: tail(db) warped by heads of a two-layer tanh net of the
  // passthrough head(da); no parameters when the tail is empty.
  double clamp = 2.0;
  Eigen::Index split = 0;  // da
  Eigen::MatrixXd w1, ws, wt;
  Eigen::VectorXd b1, bs, bt;

  std::vector<Bijection> layers;  // chain
};

Bijection::Bijection(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

BijectionKind Bijection::kind() const { return data_->kind; }
Eigen::Index Bijection::dim() const { return data_->dim; }

Bijection Bijection::identity(Eigen::Index dim) {
  if (dim < 1) throw SpecError("bijection dimension must be positive");
  auto data = std::make_shared<Data>();
  data->kind = BijectionKind::kIdentity;
  data->dim = dim;
  return Bijection(std::move(data));
}

Bijection Bijection::diagonal_affine(Eigen::VectorXd scale, Eigen::VectorXd shift) {
  if (scale.size() < 1 || scale.size() != shift.size()) {
    throw SpecError("diagonal affine needs matching scale and shift lengths");
  }
  if (!scale.allFinite() || !shift.allFinite()) {
    throw SpecError("diagonal affine parameters must be finite");
  }
  if ((scale.array() == 0.0).any()) {
    throw SpecError("diagonal affine scales must be nonzero");
  }
  auto data = std::make_shared<Data>();
  data->kind = BijectionKind::kDiagonalAffine;
  data->dim = scale.size();
  data->scale = std::move(scale);
  data->shift = std::move(shift);
  return Bijection(std::move(data));
}

Bijection Bijection::permutation(std::vector<Eigen::Index> perm) {
  const Eigen::Index dim = static_cast<Eigen::Index>(perm.size());
  if (dim < 1) throw SpecError("permutation must be nonempty");
  std::vector<Eigen::Index> inverse(perm.size(), -1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::Index p = perm[static_cast<std::size_t>(i)];
    if (p < 0 || p >= dim || inverse[static_cast<std::size_t>(p)] != -1) {
      throw SpecError("indices do not form a permutation");
    }
    inverse[static_cast<std::size_t>(p)] = i;
  }
  auto data = std::make_shared<Data>();
  data->kind = BijectionKind::kPermutation;
  data->dim = dim;
  data->perm = std::move(perm);
  data->inv_perm = std::move(inverse);
  return Bijection(std::move(data));
}

Bijection Bijection::householder(Eigen::VectorXd v) {
  if (v.size() < 1) throw SpecError("householder vector must be nonempty");
  if (!v.allFinite()) throw SpecError("householder vector must be finite");
  const double norm = v.norm();
  if (norm == 0.0) throw SpecError("householder vector must be nonzero");
  auto data = std::make_shared<Data>();
  data->kind = BijectionKind::kHouseholder;
  data->dim = v.size();
  data->reflect = v / norm;
  return Bijection(std::move(data));
}

Bijection Bijection::affine_coupling(Eigen::Index dim, CounterRng& rng,
                                     double clamp) {
  if (dim < 1) throw SpecError("bijection dimension must be positive");
  if (!(clamp > 0.0) || !std::isfinite(clamp)) {
    throw SpecError("coupling clamp must be positive and finite");
  }
  auto data = std::make_shared<Data>();
  data->kind = BijectionKind::kAffineCoupling;
  data->dim = dim;
  data->clamp = clamp;
  data->split = (dim + 1) / 2;
  const Eigen::Index da = data->split;
  const Eigen::Index db = dim - da;
  if (db > 0) {
    const double w1_sigma = 1.0 / std::sqrt(static_cast<double>(da));
    const double head_sigma = 0.5 / std::sqrt(static_cast<double>(kCouplingHidden));
    const double bias_sigma = 0.1;
    const auto fill = [&rng](Eigen::MatrixXd& m, Eigen::Index rows,
                             Eigen::Index cols, double sigma) {
      m.resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = sigma * rng.next_normal();
      }
    };
    const auto fill_vec = [&rng](Eigen::VectorXd& v, Eigen::Index n, double sigma) {
      v.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = sigma * rng.next_normal();
    };
    fill(data->w1, kCouplingHidden, da, w1_sigma);
    fill_vec(data->b1, kCouplingHidden, bias_sigma);
    fill(data->ws, db, kCouplingHidden, head_sigma);
    fill_vec(data->bs, db, bias_sigma);
    fill(data->wt, db, kCouplingHidden, head_sigma);
    fill_vec(data->bt, db, bias_sigma);
  }
  return Bijection(std::move(data));
}

Bijection Bijection::affine_coupling(Eigen::Index dim, SeedSpec seed, double clamp) {
  CounterRng rng(seed);
  return affine_coupling(dim, rng, clamp);
}

Bijection Bijection::chain(std::vector<Bijection> layers) {
  if (layers.empty()) throw SpecError("chain needs at least one layer");
  const Eigen::Index dim = layers.front().dim();
  for (const Bijection& layer : layers) {
    if (layer.dim() != dim) throw SpecError("chain layers must share one dimension");
  }
  auto data = std::make_shared<Data>();
  data->kind = BijectionKind::kChain;
  data->dim = dim;
  data->layers = std::move(layers);
  return Bijection(std::move(data));
}

namespace {

// Clamped log-scales and shift of the coupling tail given the head.
void coupling_heads_impl(const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                         const Eigen::MatrixXd& ws, const Eigen::VectorXd& bs,
                         const Eigen::MatrixXd& wt, const Eigen::VectorXd& bt,
                         double clamp, const Eigen::VectorXd& head,
                         Eigen::ArrayXd& log_scale, Eigen::ArrayXd& shift) {
  const Eigen::VectorXd hidden = ((w1 * head + b1).array().tanh()).matrix();
  const Eigen::ArrayXd raw = (ws * hidden + bs).array();
  log_scale = clamp * (raw / clamp).tanh();
  shift = (wt * hidden + bt).array();
}

}  // namespace

Eigen::VectorXd Bijection::forward(const Eigen::VectorXd& x) const {
  const Data& d = *data_;
  if (x.size() != d.dim) throw SpecError("bijection input has wrong dimension");
  if (!x.allFinite()) throw SpecError("bijection input must be finite");
  switch (d.kind) {
    case BijectionKind::kIdentity:
      return x;
    case BijectionKind::kDiagonalAffine:
      return (x.array() * d.scale.array() + d.shift.array()).matrix();
    case BijectionKind::kPermutation: {
      Eigen::VectorXd y(d.dim);
      for (Eigen::Index i = 0; i < d.dim; ++i) y[i] = x[d.perm[static_cast<std::size_t>(i)]];
      return y;
    }
    case BijectionKind::kHouseholder:
      return x - 2.0 * d.reflect.dot(x) * d.reflect;
    case BijectionKind::kAffineCoupling: {
      const Eigen::Index db = d.dim - d.split;
      if (db == 0) return x;
      Eigen::ArrayXd log_scale, shift;
      coupling_heads_impl(d.w1, d.b1, d.ws, d.bs, d.wt, d.bt, d.clamp,
                          x.head(d.split), log_scale, shift);
      Eigen::VectorXd y = x;
      y.tail(db) = (x.tail(db).array() * log_scale.exp() + shift).matrix();
      return y;
    }
    case BijectionKind::kChain: {
      Eigen::VectorXd cur = x;
      for (const Bijection& layer : d.layers) cur = layer.forward(cur);
      return cur;
    }
  }
  throw SpecError("unknown bijection kind");
}

Eigen::VectorXd Bijection::inverse(const Eigen::VectorXd& y) const {
  const Data& d = *data_;
  if (y.size() != d.dim) throw SpecError("bijection input has wrong dimension");
  if (!y.allFinite()) throw SpecError("bijection input must be finite");
  switch (d.kind) {
    case BijectionKind::kIdentity:
      return y;
    case BijectionKind::kDiagonalAffine:
      return ((y.array() - d.shift.array()) / d.scale.array()).matrix();
    case BijectionKind::kPermutation: {
      Eigen::VectorXd x(d.dim);
      for (Eigen::Index i = 0; i < d.dim; ++i) x[d.perm[static_cast<std::size_t>(i)]] = y[i];
      return x;
    }
    case BijectionKind::kHouseholder:
      return y - 2.0 * d.reflect.dot(y) * d.reflect;
    case BijectionKind::kAffineCoupling: {
      const Eigen::Index db = d.dim - d.split;
      if (db == 0) return y;
      Eigen::ArrayXd log_scale, shift;
      coupling_heads_impl(d.w1, d.b1, d.ws, d.bs, d.wt, d.bt, d.clamp,
                          y.head(d.split), log_scale, shift);
      Eigen::VectorXd x = y;
      x.tail(db) = ((y.tail(db).array() - shift) * (-log_scale).exp()).matrix();
      return x;
    }
    case BijectionKind::kChain: {
      Eigen::VectorXd cur = y;
      for (auto it = d.layers.rbegin(); it != d.layers.rend(); ++it) {
        cur = it->inverse(cur);
      }
      return cur;
    }
  }
  throw SpecError("unknown bijection kind");
}

double Bijection::forward_log_det_jacobian(const Eigen::VectorXd& x) const {
  const Data& d = *data_;
  if (x.size() != d.dim) throw SpecError("bijection input has wrong dimension");
  if (!x.allFinite()) throw SpecError("bijection input must be finite");
  switch (d.kind) {
    case BijectionKind::kIdentity:
    case BijectionKind::kPermutation:
    case BijectionKind::kHouseholder:
      return 0.0;
    case BijectionKind::kDiagonalAffine:
      return d.scale.array().abs().log().sum();
    case BijectionKind::kAffineCoupling: {
      const Eigen::Index db = d.dim - d.split;
      if (db == 0) return 0.0;
      Eigen::ArrayXd log_scale, shift;
      coupling_heads_impl(d.w1, d.b1, d.ws, d.bs, d.wt, d.bt, d.clamp,
                          x.head(d.split), log_scale, shift);
      return log_scale.sum();
    }
    case BijectionKind::kChain: {
      double sum = 0.0;
      Eigen::VectorXd cur = x;
      for (const Bijection& layer : d.layers) {
        sum += layer.forward_log_det_jacobian(cur);
        cur = layer.forward(cur);
      }
      return sum;
    }
  }
  throw SpecError("unknown bijection kind");
}

Eigen::MatrixXd Bijection::forward_rows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out.row(r) = forward(x.row(r).transpose()).transpose();
  }
  return out;
}

Eigen::MatrixXd Bijection::inverse_rows(const Eigen::MatrixXd& y) const {
  Eigen::MatrixXd out(y.rows(), y.cols());
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    out.row(r) = inverse(y.row(r).transpose()).transpose();
  }
  return out;
}

std::vector<std::uint8_t> Bijection::serialized_parameters() const {
  const Data& d = *data_;
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(d.kind));
  append_u64(out, static_cast<std::uint64_t>(d.dim));
  switch (d.kind) {
    case BijectionKind::kIdentity:
      break;
    case BijectionKind::kDiagonalAffine:
      append_vector(out, d.scale);
      append_vector(out, d.shift);
      break;
    case BijectionKind::kPermutation:
      for (const Eigen::Index p : d.perm) append_u64(out, static_cast<std::uint64_t>(p));
      break;
    case BijectionKind::kHouseholder:
      append_vector(out, d.reflect);
      break;
    case BijectionKind::kAffineCoupling:
      append_f64(out, d.clamp);
      append_u64(out, static_cast<std::uint64_t>(d.split));
      append_matrix(out, d.w1);
      append_vector(out, d.b1);
      append_matrix(out, d.ws);
      append_vector(out, d.bs);
      append_matrix(out, d.wt);
      append_vector(out, d.bt);
      break;
    case BijectionKind::kChain: {
      append_u64(out, d.layers.size());
      for (const Bijection& layer : d.layers) {
        const std::vector<std::uint8_t> inner = layer.serialized_parameters();
        out.insert(out.end(), inner.begin(), inner.end());
      }
      break;
    }
  }
  return out;
}

Bijection make_chain(Eigen::Index dim, int depth, SeedSpec seed, double clamp) {
  if (dim < 1) throw SpecError("chain dimension must be positive");
  if (depth < 1) throw SpecError("chain depth must be at least 1");
  CounterRng rng(seed);
  std::vector<Bijection> layers;
  layers.reserve(static_cast<std::size_t>(depth));
  for (int layer = 0; layer < depth; ++layer) {
    switch (layer % 3) {
      case 0: {
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(dim));
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        for (Eigen::Index i = dim - 1; i > 0; --i) {
          const auto j = static_cast<Eigen::Index>(
              rng.next_u64() % static_cast<std::uint64_t>(i + 1));
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        layers.push_back(Bijection::permutation(std::move(perm)));
        break;
      }
      case 1:
        layers.push_back(Bijection::affine_coupling(dim, rng, clamp));
        break;
      case 2: {
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.next_normal();
        if (v.norm() == 0.0) v[0] = 1.0;
        layers.push_back(Bijection::householder(std::move(v)));
        break;
      }
    }
  }
  return Bijection::chain(std::move(layers));
}

bool TransformPlan::any_external() const {
  for (const TransformEntry& entry : entries) {
    if (entry.kind == TransformKind::kExternal) return true;
  }
  return false;
}

Bijection TransformPlan::instantiate(int modality, Eigen::Index dim) const {
  if (modality < 1 || modality > static_cast<int>(entries.size())) {
    throw SpecError("transform plan has no entry for modality " +
                    std::to_string(modality));
  }
  const TransformEntry& entry = entries[static_cast<std::size_t>(modality - 1)];
  switch (entry.kind) {
    case TransformKind::kIdentity:
      return Bijection::identity(dim);
    case TransformKind::kChain:
      return make_chain(dim, entry.depth,
                        {seed, static_cast<std::uint64_t>(modality)}, entry.clamp);
    case TransformKind::kExternal:
      throw NotApplicableError(
          "external transforms are applied downstream of the exported latents");
  }
  throw SpecError("unknown transform kind");
}

}  // namespace mmmi
