#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmmi/model_spec.hpp"
#include "mmmi/transform.hpp"

namespace mmmi {

// Declarative template builder; resolved against the model dimension d.
struct TemplateSpec {
  enum class Kind { kOnes, kZeros, kPointMass, kGaussianBump, kExplicit };
  Kind kind = Kind::kOnes;
  std::int64_t index = 0;      // point_mass
  double center = 0.0;         // gaussian_bump
  double width = 1.0;          // gaussian_bump
  std::vector<double> values;  // explicit

  Template build(int d) const;
};

enum class ScenarioKind { kGeneric, kSimpleDag, kBlackhole, kScalable };
const char* scenario_kind_name(ScenarioKind kind);

struct GenericModelConfig {
  int n_theta = 1;
  int n_u = 1;
  int n_z = 1;
  int d = 1;
  std::vector<double> eta;                           // [n_theta]
  std::vector<std::vector<double>> rho_tilde;        // n_z rows of n_theta
  std::vector<std::vector<double>> rho_hat;          // n_z rows of n_u
  std::vector<std::vector<TemplateSpec>> templates;  // n_z rows of n_theta
};

struct SimpleDagModelConfig {
  int d = 3072;
  double eta = 1.0;
  double rho_tilde_11 = 1.0;
  double rho_tilde_12 = 1.0;
  double rho_hat_11 = 1.0;
  double rho_hat_22 = 1.0;
};

struct BlackholeModelConfig {
  int d = 3072;
  double eta1 = 1.0;
  double eta2 = 0.0;
  double rho_tilde_11 = 1.0;
  double rho_tilde_12 = 1.0;
  double rho_tilde_21 = 1.0;
  double rho_hat_11 = 1.0;
  double rho_hat_22 = 1.0;
  TemplateSpec center_template;   // defaults to a centered gaussian_bump
  TemplateSpec diffuse_template;  // defaults to ones
};

struct ScalableModelConfig {
  int n_z = 10;
  int d = 3072;
  double alpha = 2.0;
  double beta = 2.0;
  double eta = 1.0;
  double rho_tilde_base = 1.0;
  double rho_hat_base = 1.0;
};

struct SamplingConfig {
  std::int64_t n = 1024;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct TransformsConfig {
  TransformKind kind = TransformKind::kIdentity;
  int depth = 4;
  double clamp = 2.0;
  std::uint64_t seed = 0;
};

// Parsed scenario document. Exactly one model sub-config (selected by
// `kind`) is meaningful; the others keep their defaults.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kGeneric;
  GenericModelConfig generic;
  SimpleDagModelConfig simple_dag;
  BlackholeModelConfig blackhole;
  ScalableModelConfig scalable;
  SamplingConfig sampling;
  TransformsConfig transforms;

  int n_z() const;
  int d() const;
};

// Strict parser: unknown keys, wrong types, and non-finite numbers are
// rejected with the offending path named.
ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

// Canonical serialization (fixed key order, round-trippable numbers).
// parse(to_json(config)) reproduces the config exactly.
std::string scenario_config_to_json(const ScenarioConfig& config);

ModelSpec build_model(const ScenarioConfig& config);
TransformPlan build_plan(const ScenarioConfig& config);

struct ScenarioEntry {
  std::string name;
  std::string summary;
  std::string details;
  ScenarioConfig config;
};

// The four shipped scenarios: simple_dag, blackhole, scalable, templated.
const std::vector<ScenarioEntry>& scenario_catalog();
const ScenarioEntry* find_scenario(const std::string& name);

}  // namespace mmmi
