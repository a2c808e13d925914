#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mmmi/analytics.hpp"
#include "mmmi/scenario_config.hpp"
#include "mmmi/tensor_file.hpp"

namespace mmmi {

// One analytic MI entry; blocks use the usual ids (0 = theta, i >= 1 = x_i).
struct ManifestMi {
  int first = 0;
  int second = 1;
  MiValue value;
};

struct ManifestTensor {
  std::string name;                  // logical name: theta, x1, z1, pmi_theta_x1
  std::string file;                  // path relative to the bundle directory
  TensorDtype dtype = TensorDtype::kF32;
  std::vector<std::uint64_t> shape;  // row-major
  std::string sha256;                // lowercase hex digest of the file
};

// Everything needed to re-derive or audit a bundle. The embedded scenario
// is the effective configuration (CLI overrides already applied) and is the
// single source of truth for the model; the MI table can be recomputed from
// it and must match the recorded values.
struct Manifest {
  std::string generator_version;
  ScenarioConfig scenario;
  TensorDtype precision = TensorDtype::kF32;
  bool keep_latents = false;
  std::vector<std::pair<int, int>> pmi_pairs;
  std::vector<ManifestMi> mutual_information;
  std::vector<ManifestTensor> tensors;

  const ManifestTensor* find_tensor(const std::string& name) const;
};

// Label helpers shared with the CLI ("theta", "x1", ...).
int parse_block_label(const std::string& label, int n_z);

// Fixed key order, no timestamps: the same manifest always serializes to
// the same bytes. parse(to_json(m)) reproduces m exactly.
std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& json_text);

}  // namespace mmmi
