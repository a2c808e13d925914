#include "mmmi/bundle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "mmmi/analytics.hpp"
#include "mmmi/covariance.hpp"
#include "mmmi/errors.hpp"
#include "mmmi/mixing_matrix.hpp"
#include "mmmi/sampling.hpp"
#include "mmmi/sha256.hpp"
#include "mmmi/version.hpp"

namespace mmmi {

namespace {

std::string pad3(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", i);
  return buf;
}

std::string block_file_token(int block) {
  return block == 0 ? std::string("theta") : "x" + pad3(block);
}

Eigen::MatrixXd block_rows(const LatentBatch& batch, int block) {
  if (block == 0) return Eigen::MatrixXd(batch.z_theta);
  return batch.z[static_cast<std::size_t>(block - 1)];
}

struct PendingTensor {
  std::string name;
  std::string file;
  TensorDtype dtype;
  std::vector<std::uint64_t> shape;
  TensorWriter writer;
};

}  // namespace

Manifest generate_bundle(const ScenarioConfig& config,
                         const std::filesystem::path& out_dir,
                         const GenerateOptions& options) {
  const ModelSpec spec = build_model(config);
  const TransformPlan plan = build_plan(config);
  const std::int64_t n = config.sampling.n;
  if (n < 0) throw SpecError("sample count must be nonnegative");

  std::vector<std::pair<int, int>> pairs;
  for (auto [a, b] : options.pmi_pairs) {
    if (a > b) std::swap(a, b);
    if (a == b || a < 0 || b > spec.n_z) {
      throw SpecError("invalid PMI pair (" + std::to_string(a) + ", " +
                      std::to_string(b) + ") for " + std::to_string(spec.n_z) +
                      " modalities");
    }
    pairs.emplace_back(a, b);
  }
  const bool keep_latents = options.keep_latents || plan.any_external();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create bundle directory " + out_dir.string() + ": " +
                  ec.message());
  }

  // Analytics before any file is touched: a degenerate model fails cleanly.
  const CovarianceBlocks cov(build_mixing_matrix(spec));
  std::vector<ManifestMi> mi_entries;
  for (int i = 0; i <= spec.n_z; ++i) {
    for (int j = i + 1; j <= spec.n_z; ++j) {
      mi_entries.push_back({i, j, mi_blocks(cov, i, j)});
    }
  }
  std::vector<PmiEvaluator> pmi_evals;
  pmi_evals.reserve(pairs.size());
  for (const auto& [a, b] : pairs) pmi_evals.emplace_back(cov, a, b);

  std::vector<std::optional<Bijection>> bijections(static_cast<std::size_t>(spec.n_z));
  for (int i = 0; i < spec.n_z; ++i) {
    if (plan.entries[static_cast<std::size_t>(i)].kind != TransformKind::kExternal) {
      bijections[static_cast<std::size_t>(i)] = plan.instantiate(i + 1, spec.d);
    }
  }

  const std::filesystem::path manifest_path = out_dir / "manifest.json";
  const std::filesystem::path manifest_tmp = out_dir / "manifest.json.tmp";
  std::vector<PendingTensor> pending;
  std::vector<std::filesystem::path> finalized;
  try {
    const std::vector<std::uint64_t> column_shape{static_cast<std::uint64_t>(n)};
    const std::vector<std::uint64_t> matrix_shape{static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(spec.d)};
    pending.push_back({"theta", "theta.mmt", options.precision, column_shape,
                       TensorWriter(out_dir / "theta.mmt", options.precision,
                                    column_shape)});
    std::vector<int> x_slot(static_cast<std::size_t>(spec.n_z), -1);
    std::vector<int> z_slot(static_cast<std::size_t>(spec.n_z), -1);
    for (int i = 1; i <= spec.n_z; ++i) {
      if (bijections[static_cast<std::size_t>(i - 1)].has_value()) {
        const std::string file = "x_" + pad3(i) + ".mmt";
        x_slot[static_cast<std::size_t>(i - 1)] = static_cast<int>(pending.size());
        pending.push_back({"x" + std::to_string(i), file, options.precision,
                           matrix_shape,
                           TensorWriter(out_dir / file, options.precision,
                                        matrix_shape)});
      }
    }
    for (int i = 1; i <= spec.n_z; ++i) {
      if (keep_latents) {
        const std::string file = "z_" + pad3(i) + ".mmt";
        z_slot[static_cast<std::size_t>(i - 1)] = static_cast<int>(pending.size());
        pending.push_back({"z" + std::to_string(i), file, options.precision,
                           matrix_shape,
                           TensorWriter(out_dir / file, options.precision,
                                        matrix_shape)});
      }
    }
    std::vector<int> pmi_slot(pairs.size(), -1);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& [a, b] = pairs[p];
      const std::string file =
          "pmi_" + block_file_token(a) + "_" + block_file_token(b) + ".mmt";
      const std::string name = "pmi_" + block_label(a) + "_" + block_label(b);
      pmi_slot[p] = static_cast<int>(pending.size());
      pending.push_back({name, file, TensorDtype::kF64, column_shape,
                         TensorWriter(out_dir / file, TensorDtype::kF64,
                                      column_shape)});
    }

    const std::int64_t chunk = std::max<std::int64_t>(1, options.chunk_rows);
    for (std::int64_t r0 = 0; r0 < n; r0 += chunk) {
      const std::int64_t rows = std::min(chunk, n - r0);
      const SeedSpec seed{config.sampling.seed,
                          config.sampling.stream + static_cast<std::uint64_t>(r0)};
      const Eigen::MatrixXd u = sample_proto_latents(rows, spec, seed);
      const LatentBatch batch = apply_structural_equations(spec, u);
      pending[0].writer.append(batch.z_theta.data(),
                               static_cast<std::size_t>(rows));
      for (int i = 0; i < spec.n_z; ++i) {
        const Eigen::MatrixXd& z = batch.z[static_cast<std::size_t>(i)];
        if (x_slot[static_cast<std::size_t>(i)] >= 0) {
          const Eigen::MatrixXd x =
              bijections[static_cast<std::size_t>(i)]->forward_rows(z);
          pending[static_cast<std::size_t>(x_slot[static_cast<std::size_t>(i)])]
              .writer.append_rows(x);
        }
        if (z_slot[static_cast<std::size_t>(i)] >= 0) {
          pending[static_cast<std::size_t>(z_slot[static_cast<std::size_t>(i)])]
              .writer.append_rows(z);
        }
      }
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const Eigen::VectorXd pmi = pmi_evals[p].evaluate_rows(
            block_rows(batch, pairs[p].first), block_rows(batch, pairs[p].second));
        pending[static_cast<std::size_t>(pmi_slot[p])].writer.append(
            pmi.data(), static_cast<std::size_t>(rows));
      }
    }

    Manifest manifest;
    manifest.generator_version = kVersion;
    manifest.scenario = config;
    manifest.precision = options.precision;
    manifest.keep_latents = keep_latents;
    manifest.pmi_pairs = pairs;
    manifest.mutual_information = std::move(mi_entries);
    for (PendingTensor& t : pending) {
      ManifestTensor entry;
      entry.name = t.name;
      entry.file = t.file;
      entry.dtype = t.dtype;
      entry.shape = t.shape;
      entry.sha256 = t.writer.finish();
      finalized.push_back(out_dir / t.file);
      manifest.tensors.push_back(std::move(entry));
    }

    const std::string text = manifest_to_json(manifest);
    {
      std::ofstream out(manifest_tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open " + manifest_tmp.string());
      out.write(text.data(), static_cast<std::streamsize>(text.size()));
      out.flush();
      if (!out) throw IoError("write failed on " + manifest_tmp.string());
    }
    std::filesystem::rename(manifest_tmp, manifest_path, ec);
    if (ec) {
      throw IoError("cannot finalize " + manifest_path.string() + ": " +
                    ec.message());
    }
    return manifest;
  } catch (...) {
    pending.clear();  // writer destructors discard their temporaries
    std::error_code ignore;
    for (const std::filesystem::path& path : finalized) {
      std::filesystem::remove(path, ignore);
    }
    std::filesystem::remove(manifest_tmp, ignore);
    throw;
  }
}

Bundle open_bundle(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("read error on " + manifest_path.string());
  return Bundle{dir, manifest_from_json(text.str())};
}

TensorData load_tensor(const Bundle& bundle, const std::string& name) {
  const ManifestTensor* entry = bundle.manifest.find_tensor(name);
  if (entry == nullptr) {
    throw IoError("bundle has no tensor named '" + name + "'");
  }
  const std::filesystem::path path = bundle.dir / entry->file;
  const std::string digest = sha256_file(path);
  if (digest != entry->sha256) {
    throw DigestMismatchError("digest mismatch for " + entry->file +
                              ": manifest records " + entry->sha256 +
                              " but the file hashes to " + digest);
  }
  TensorData data = read_tensor(path);
  if (data.dtype != entry->dtype || data.shape != entry->shape) {
    throw IoError("tensor " + entry->file +
                  " disagrees with its manifest entry despite a matching digest");
  }
  return data;
}

Eigen::MatrixXd load_block_rows(const Bundle& bundle, int block) {
  const int n_z = bundle.manifest.scenario.n_z();
  if (block < 0 || block > n_z) {
    throw SpecError("block id " + std::to_string(block) + " is out of range");
  }
  if (block == 0) return load_tensor(bundle, "theta").as_matrix();
  const std::string observed = "x" + std::to_string(block);
  if (bundle.manifest.find_tensor(observed) != nullptr) {
    return load_tensor(bundle, observed).as_matrix();
  }
  const std::string latent = "z" + std::to_string(block);
  if (bundle.manifest.find_tensor(latent) != nullptr) {
    return load_tensor(bundle, latent).as_matrix();
  }
  throw IoError("bundle holds neither " + observed + " nor " + latent);
}

}  // namespace mmmi
