#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mmmi/manifest.hpp"
#include "mmmi/scenario_config.hpp"
#include "mmmi/tensor_file.hpp"

namespace mmmi {

struct GenerateOptions {
  TensorDtype precision = TensorDtype::kF32;
  bool keep_latents = false;
  // Block pairs (0 = theta) to export pointwise MI columns for; always f64.
  std::vector<std::pair<int, int>> pmi_pairs;
  std::int64_t chunk_rows = 512;
};

// Writes a complete bundle into out_dir: observed tensors x_i (latents z_i
// when kept or when the modality's transform is external), theta, optional
// PMI columns, and manifest.json. Deterministic: the same config produces
// byte-identical files. On failure every partial output is removed.
Manifest generate_bundle(const ScenarioConfig& config,
                         const std::filesystem::path& out_dir,
                         const GenerateOptions& options = {});

struct Bundle {
  std::filesystem::path dir;
  Manifest manifest;
};

Bundle open_bundle(const std::filesystem::path& dir);

// Loads a tensor by logical name after verifying its recorded SHA-256;
// a stale or corrupted file raises DigestMismatchError.
TensorData load_tensor(const Bundle& bundle, const std::string& name);

// Rows for one block: theta as an n x 1 matrix, modality i as the observed
// x_i, falling back to the latent z_i when x_i was not exported.
Eigen::MatrixXd load_block_rows(const Bundle& bundle, int block);

}  // namespace mmmi
