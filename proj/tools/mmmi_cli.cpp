#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmmi/analytics.hpp"
#include "mmmi/bundle.hpp"
#include "mmmi/covariance.hpp"
#include "mmmi/errors.hpp"
#include "mmmi/estimators.hpp"
#include "mmmi/manifest.hpp"
#include "mmmi/mixing_matrix.hpp"
#include "mmmi/model_spec.hpp"
#include "mmmi/rng.hpp"
#include "mmmi/sampling.hpp"
#include "mmmi/scenario_config.hpp"
#include "mmmi/transform.hpp"
#include "mmmi/version.hpp"

namespace {

using mmmi::ScenarioConfig;

std::string format_nats(const mmmi::MiValue& value) {
  if (value.infinite()) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value.nats);
  return buf;
}

std::string format_double(double value, const char* spec = "%.6f") {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

ScenarioConfig load_config(const std::string& config_path,
                           const std::string& scenario_name) {
  if (config_path.empty() == scenario_name.empty()) {
    throw mmmi::SpecError("exactly one of --config or --scenario is required");
  }
  if (!config_path.empty()) return mmmi::load_scenario_config(config_path);
  const mmmi::ScenarioEntry* entry = mmmi::find_scenario(scenario_name);
  if (entry == nullptr) {
    throw mmmi::SpecError("unknown scenario '" + scenario_name +
                          "' (see `mmmi scenario list`)");
  }
  return entry->config;
}

int parse_block_token(const std::string& token, int n_z) {
  if (token == "theta") return 0;
  std::string digits = token;
  if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) digits.erase(0, 1);
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw mmmi::SpecError("bad block token '" + token +
                          "' (expected theta, x<i>, or a block index)");
  }
  const long id = std::strtol(digits.c_str(), nullptr, 10);
  if (id < 0 || id > n_z) {
    throw mmmi::SpecError("block index " + std::to_string(id) +
                          " is out of range for " + std::to_string(n_z) +
                          " modalities");
  }
  return static_cast<int>(id);
}

std::pair<int, int> parse_pair_token(const std::string& text, int n_z) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) {
    throw mmmi::SpecError("bad pair '" + text + "' (expected e.g. theta,1 or 1,2)");
  }
  const int a = parse_block_token(text.substr(0, comma), n_z);
  const int b = parse_block_token(text.substr(comma + 1), n_z);
  if (a == b) throw mmmi::SpecError("a pair needs two distinct blocks");
  return {std::min(a, b), std::max(a, b)};
}

// ---------------------------------------------------------------- mi ----

int cmd_mi(const ScenarioConfig& config, const std::string& method, bool as_json) {
  mmmi::MiMatrixOptions options;
  if (method == "dense") options.path = mmmi::MiPath::kDense;
  else if (method == "structured") options.path = mmmi::MiPath::kStructured;
  else if (method == "closed") options.path = mmmi::MiPath::kClosedForm;

  const mmmi::ModelSpec spec = mmmi::build_model(config);
  const mmmi::MiTable table = mmmi::mi_matrix(spec, options);

  if (as_json) {
    nlohmann::ordered_json root;
    root["blocks"] = nlohmann::ordered_json::array();
    for (int i = 0; i <= spec.n_z; ++i) root["blocks"].push_back(mmmi::block_label(i));
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i <= spec.n_z; ++i) {
      for (int j = i + 1; j <= spec.n_z; ++j) {
        const auto& cell = table.at(i, j);
        if (!cell) continue;
        nlohmann::ordered_json row;
        row["first"] = mmmi::block_label(i);
        row["second"] = mmmi::block_label(j);
        if (cell->infinite()) row["nats"] = "infinity";
        else row["nats"] = cell->nats;
        row["method"] = mmmi::mi_method_name(cell->method);
        rows.push_back(std::move(row));
      }
    }
    root["mutual_information"] = std::move(rows);
    std::cout << root.dump(2) << "\n";
    return 0;
  }

  const int width = 12;
  std::printf("%*s", width, "");
  for (int j = 0; j <= spec.n_z; ++j) {
    std::printf("%*s", width, mmmi::block_label(j).c_str());
  }
  std::printf("\n");
  for (int i = 0; i <= spec.n_z; ++i) {
    std::printf("%*s", width, mmmi::block_label(i).c_str());
    for (int j = 0; j <= spec.n_z; ++j) {
      if (i == j) {
        std::printf("%*s", width, "--");
        continue;
      }
      const auto& cell = i < j ? table.at(i, j) : table.at(j, i);
      std::printf("%*s", width, cell ? format_nats(*cell).c_str() : "n/a");
    }
    std::printf("\n");
  }
  return 0;
}

// ---------------------------------------------------------- generate ----

int cmd_generate(ScenarioConfig config, const std::string& out_dir,
                 const std::optional<std::uint64_t>& n,
                 const std::optional<std::uint64_t>& seed,
                 const std::optional<std::uint64_t>& stream, bool keep_latents,
                 const std::string& precision,
                 const std::vector<std::string>& pmi_tokens) {
  if (n) config.sampling.n = static_cast<std::int64_t>(*n);
  if (seed) config.sampling.seed = *seed;
  if (stream) config.sampling.stream = *stream;

  mmmi::GenerateOptions options;
  options.precision = mmmi::tensor_dtype_from_name(precision);
  options.keep_latents = keep_latents;
  const int n_z = config.n_z();
  for (const std::string& token : pmi_tokens) {
    options.pmi_pairs.push_back(parse_pair_token(token, n_z));
  }

  const mmmi::Manifest manifest = mmmi::generate_bundle(config, out_dir, options);

  std::cout << "bundle: " << out_dir << "\n";
  std::cout << "n: " << config.sampling.n << "  seed: " << config.sampling.seed
            << "  precision: " << mmmi::tensor_dtype_name(manifest.precision)
            << "  tensors: " << manifest.tensors.size() << "\n";
  for (const mmmi::ManifestMi& entry : manifest.mutual_information) {
    std::cout << "I(" << mmmi::block_label(entry.first) << ";"
              << mmmi::block_label(entry.second) << ") = " << format_nats(entry.value)
              << " (" << mmmi::mi_method_name(entry.value.method) << ")\n";
  }
  std::cout << "manifest: " << (std::filesystem::path(out_dir) / "manifest.json").string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------- estimate ----

int cmd_estimate(const std::string& bundle_dir, const std::string& pair_token,
                 const std::string& estimator, int k) {
  const mmmi::Bundle bundle = mmmi::open_bundle(bundle_dir);
  const int n_z = bundle.manifest.scenario.n_z();
  const auto [first, second] = parse_pair_token(pair_token, n_z);

  const Eigen::MatrixXd rows_first = mmmi::load_block_rows(bundle, first);
  const Eigen::MatrixXd rows_second = mmmi::load_block_rows(bundle, second);

  mmmi::EstimateReport report;
  if (estimator == "ksg") {
    mmmi::KsgOptions options;
    options.k = k;
    report = mmmi::ksg_mi(rows_first, rows_second, options);
  } else {
    report = mmmi::gaussian_mi(rows_first, rows_second);
  }

  const mmmi::ManifestMi* analytic = nullptr;
  for (const mmmi::ManifestMi& entry : bundle.manifest.mutual_information) {
    if (entry.first == first && entry.second == second) {
      analytic = &entry;
      break;
    }
  }

  std::cout << "pair: " << mmmi::block_label(first) << "," << mmmi::block_label(second)
            << "\n";
  std::cout << "estimator: " << estimator;
  if (estimator == "ksg") std::cout << "  k: " << report.k;
  std::cout << "  n: " << report.n << "\n";
  std::cout << "estimate: " << format_double(report.value) << "\n";
  if (analytic != nullptr) {
    std::cout << "analytic: " << format_nats(analytic->value) << "  method: "
              << mmmi::mi_method_name(analytic->value.method) << "\n";
    if (analytic->value.infinite()) {
      std::cout << "difference: n/a\n";
    } else {
      std::cout << "difference: " << format_double(report.value - analytic->value.nats)
                << "\n";
    }
  } else {
    std::cout << "analytic: not recorded\n";
  }
  return 0;
}

// ------------------------------------------------------------ verify ----

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

void shrink_template(mmmi::TemplateSpec& t, int d, double ratio) {
  using Kind = mmmi::TemplateSpec::Kind;
  switch (t.kind) {
    case Kind::kPointMass:
      t.index %= d;
      break;
    case Kind::kGaussianBump:
      t.center *= ratio;
      t.width = std::max(t.width * ratio, 1e-6);
      break;
    case Kind::kExplicit:
      t.values.resize(static_cast<std::size_t>(d));
      break;
    default:
      break;
  }
}

ScenarioConfig reduce_dimension(ScenarioConfig config, int limit) {
  const int d0 = config.d();
  if (d0 <= limit) return config;
  const double ratio = static_cast<double>(limit) / static_cast<double>(d0);
  switch (config.kind) {
    case mmmi::ScenarioKind::kSimpleDag:
      config.simple_dag.d = limit;
      break;
    case mmmi::ScenarioKind::kScalable:
      config.scalable.d = limit;
      break;
    case mmmi::ScenarioKind::kBlackhole:
      config.blackhole.d = limit;
      shrink_template(config.blackhole.center_template, limit, ratio);
      shrink_template(config.blackhole.diffuse_template, limit, ratio);
      break;
    case mmmi::ScenarioKind::kGeneric:
      config.generic.d = limit;
      for (auto& row : config.generic.templates) {
        for (auto& t : row) shrink_template(t, limit, ratio);
      }
      break;
  }
  return config;
}

struct MiOutcome {
  enum class Kind { kValue, kInfinite, kDegenerate } kind = Kind::kValue;
  double value = 0.0;
};

MiOutcome eval_mi(const mmmi::CovarianceBlocks& cov, int i, int j, mmmi::MiPath path) {
  try {
    const mmmi::MiValue v = mmmi::mi_blocks(cov, i, j, path);
    if (v.infinite()) return {MiOutcome::Kind::kInfinite, 0.0};
    return {MiOutcome::Kind::kValue, v.nats};
  } catch (const mmmi::DegenerateBlockError&) {
    return {MiOutcome::Kind::kDegenerate, 0.0};
  }
}

CheckResult check_mi_three_way(const ScenarioConfig& config, bool full) {
  CheckResult result{"mi-three-way", true, ""};
  const ScenarioConfig small_config = reduce_dimension(config, 64);
  const mmmi::ModelSpec spec = mmmi::build_model(small_config);
  const mmmi::CovarianceBlocks cov(mmmi::build_mixing_matrix(spec));

  double max_delta = 0.0;
  int pairs = 0;
  for (int i = 0; i <= spec.n_z && result.pass; ++i) {
    for (int j = i + 1; j <= spec.n_z && result.pass; ++j) {
      const MiOutcome dense = eval_mi(cov, i, j, mmmi::MiPath::kDense);
      const MiOutcome structured = eval_mi(cov, i, j, mmmi::MiPath::kStructured);
      ++pairs;
      if (dense.kind != structured.kind) {
        result.pass = false;
        result.detail = "routes disagree in kind on pair (" + mmmi::block_label(i) +
                        ", " + mmmi::block_label(j) + ")";
      } else if (dense.kind == MiOutcome::Kind::kValue) {
        const double delta = std::abs(dense.value - structured.value);
        max_delta = std::max(max_delta, delta);
        if (delta > 1e-9) {
          result.pass = false;
          result.detail = "dense vs structured delta " + format_double(delta, "%.3e") +
                          " on pair (" + mmmi::block_label(i) + ", " +
                          mmmi::block_label(j) + ")";
        }
      }
    }
  }

  if (result.pass) {
    try {
      const mmmi::PairMi closed =
          mmmi::mi_closed_form_pair(mmmi::closed_form_coefficients(spec), spec.d);
      const mmmi::MiValue s01 = mmmi::mi_blocks(cov, 0, 1, mmmi::MiPath::kStructured);
      const mmmi::MiValue s02 = mmmi::mi_blocks(cov, 0, 2, mmmi::MiPath::kStructured);
      const mmmi::MiValue s12 = mmmi::mi_blocks(cov, 1, 2, mmmi::MiPath::kStructured);
      const double delta = std::max({std::abs(closed.theta_z1.nats - s01.nats),
                                     std::abs(closed.theta_z2.nats - s02.nats),
                                     std::abs(closed.z1_z2.nats - s12.nats)});
      max_delta = std::max(max_delta, delta);
      if (delta > 1e-9) {
        result.pass = false;
        result.detail = "closed form vs structured delta " + format_double(delta, "%.3e");
      }
    } catch (const mmmi::NotApplicableError&) {
      // Closed forms only cover the homogeneous two-modality setting.
    } catch (const mmmi::DegenerateBlockError&) {
    }
  }

  if (result.pass && full) {
    ScenarioConfig dag;
    dag.kind = mmmi::ScenarioKind::kSimpleDag;  // d = 3072, all weights 1
    const mmmi::ModelSpec dag_spec = mmmi::build_model(dag);
    const mmmi::CovarianceBlocks dag_cov(mmmi::build_mixing_matrix(dag_spec));
    const mmmi::PairMi closed =
        mmmi::mi_closed_form_pair(mmmi::closed_form_coefficients(dag_spec), dag_spec.d);
    const mmmi::MiValue s01 = mmmi::mi_blocks(dag_cov, 0, 1, mmmi::MiPath::kStructured);
    const mmmi::MiValue s12 = mmmi::mi_blocks(dag_cov, 1, 2, mmmi::MiPath::kStructured);
    const double delta = std::max(std::abs(closed.theta_z1.nats - s01.nats),
                                  std::abs(closed.z1_z2.nats - s12.nats));
    if (delta > 1e-6) {
      result.pass = false;
      result.detail = "full-dimension structured vs closed delta " +
                      format_double(delta, "%.3e");
    }
  }

  if (result.pass) {
    result.detail = std::to_string(pairs) + " pairs, max delta " +
                    format_double(max_delta, "%.3e");
  }
  return result;
}

CheckResult check_sampler_covariance(const ScenarioConfig& config) {
  CheckResult result{"sampler-covariance", true, ""};
  const ScenarioConfig small_config = reduce_dimension(config, 8);
  const mmmi::ModelSpec spec = mmmi::build_model(small_config);
  const mmmi::CovarianceBlocks cov(mmmi::build_mixing_matrix(spec));

  const std::int64_t n = 20000;
  const mmmi::LatentBatch batch =
      mmmi::sample_latents(n, spec, {0x76657269667973u, 0});

  const Eigen::Index z_dim = spec.z_dim();
  Eigen::MatrixXd z(n, z_dim);
  z.col(0) = batch.z_theta;
  for (int i = 0; i < spec.n_z; ++i) {
    z.middleCols(1 + static_cast<Eigen::Index>(i) * spec.d, spec.d) =
        batch.z[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd empirical =
      centered.adjoint() * centered / static_cast<double>(n - 1);

  Eigen::MatrixXd analytic(z_dim, z_dim);
  analytic(0, 0) = cov.theta_variance();
  for (int i = 1; i <= spec.n_z; ++i) {
    const Eigen::Index off_i = 1 + static_cast<Eigen::Index>(i - 1) * spec.d;
    analytic.block(0, off_i, 1, spec.d) = cov.theta_cross(i).transpose();
    analytic.block(off_i, 0, spec.d, 1) = cov.theta_cross(i);
    for (int j = 1; j <= spec.n_z; ++j) {
      const Eigen::Index off_j = 1 + static_cast<Eigen::Index>(j - 1) * spec.d;
      analytic.block(off_i, off_j, spec.d, spec.d) = cov.dense_block(i, j);
    }
  }

  std::int64_t entries = 0;
  std::int64_t within3 = 0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z_dim && result.pass; ++i) {
    for (Eigen::Index j = i; j < z_dim; ++j) {
      const double se = std::sqrt(
          (analytic(i, i) * analytic(j, j) + analytic(i, j) * analytic(i, j)) /
          static_cast<double>(n));
      const double diff = std::abs(empirical(i, j) - analytic(i, j));
      ++entries;
      if (se == 0.0) {
        if (diff < 1e-9) { ++within3; continue; }
        result.pass = false;
        result.detail = "nonzero deviation on a zero-variance entry";
        break;
      }
      const double units = diff / se;
      worst = std::max(worst, units);
      if (units <= 3.0) ++within3;
      if (units > 5.0) {
        result.pass = false;
        result.detail = "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") deviates by " + format_double(units, "%.2f") + " SE";
        break;
      }
    }
  }
  // Per-entry outside-3-SE probability is ~0.3%, so demanding 95% within
  // 3 SE never trips stochastically; the 5 SE cap is the sharp bound.
  const double frac3 =
      entries > 0 ? static_cast<double>(within3) / static_cast<double>(entries) : 1.0;
  if (result.pass && frac3 < 0.95) {
    result.pass = false;
    result.detail = "only " + format_double(100.0 * frac3, "%.2f") +
                    "% of entries within 3 SE";
  }
  if (result.pass) {
    result.detail = std::to_string(entries) + " entries, worst " +
                    format_double(worst, "%.2f") + " SE";
  }
  return result;
}

CheckResult check_bijection_round_trip(const ScenarioConfig& config, bool full) {
  CheckResult result{"bijection-round-trip", true, ""};
  const ScenarioConfig effective = full ? config : reduce_dimension(config, 64);
  const int d = effective.d();
  const mmmi::TransformPlan plan = mmmi::build_plan(effective);

  const std::int64_t probes = 256;
  double worst = 0.0;
  for (int m = 1; m <= static_cast<int>(plan.entries.size()) && result.pass; ++m) {
    mmmi::Bijection bijection =
        plan.entries[static_cast<std::size_t>(m - 1)].kind == mmmi::TransformKind::kExternal
            ? mmmi::make_chain(d, 4, {plan.seed, static_cast<std::uint64_t>(m)}, 2.0)
            : plan.instantiate(m, d);
    const mmmi::CounterRng rng({0x70726f626573u, static_cast<std::uint64_t>(m)});
    Eigen::MatrixXd x(probes, d);
    for (std::int64_t r = 0; r < probes; ++r) {
      for (int c = 0; c < d; ++c) {
        x(r, c) = rng.normal_at(static_cast<std::uint64_t>(r * d + c));
      }
    }
    const Eigen::MatrixXd y = bijection.forward_rows(x);
    const Eigen::MatrixXd back = bijection.inverse_rows(y);
    for (std::int64_t r = 0; r < probes; ++r) {
      const double err = (back.row(r) - x.row(r)).cwiseAbs().maxCoeff() /
                         std::max(1.0, x.row(r).cwiseAbs().maxCoeff());
      worst = std::max(worst, err);
    }
    if (worst > 1e-6) {
      result.pass = false;
      result.detail = "modality " + std::to_string(m) + " max relative error " +
                      format_double(worst, "%.3e");
    }
  }
  if (result.pass) {
    result.detail = std::to_string(plan.entries.size()) + " modalities, max rel err " +
                    format_double(worst, "%.3e");
  }
  return result;
}

int cmd_verify(const ScenarioConfig& config, bool full) {
  const std::vector<CheckResult> results = {
      check_mi_three_way(config, full),
      check_sampler_covariance(config),
      check_bijection_round_trip(config, full),
  };
  const CheckResult* first_fail = nullptr;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.detail
              << ")\n";
    if (!r.pass && first_fail == nullptr) first_fail = &r;
  }
  if (first_fail != nullptr) {
    std::cout << "FAILED: " << first_fail->name << "\n";
    return 1;
  }
  std::cout << "all checks passed\n";
  return 0;
}

// ---------------------------------------------------------- scenario ----

int cmd_scenario_list() {
  for (const mmmi::ScenarioEntry& entry : mmmi::scenario_catalog()) {
    std::printf("%-12s %s\n", entry.name.c_str(), entry.summary.c_str());
  }
  return 0;
}

int cmd_scenario_describe(const std::string& name) {
  const mmmi::ScenarioEntry* entry = mmmi::find_scenario(name);
  if (entry == nullptr) {
    throw mmmi::SpecError("unknown scenario '" + name + "'");
  }
  std::cout << "scenario: " << entry->name << "\n";
  std::cout << "summary: " << entry->summary << "\n\n";
  std::cout << entry->details << "\n\n";
  std::cout << "config:\n" << mmmi::scenario_config_to_json(entry->config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal Gaussian dataset generator with exact mutual information"};
  app.set_version_flag("--version", std::string("mmmi ") + mmmi::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_name;
  std::string method = "auto";
  bool as_json = false;
  CLI::App* mi = app.add_subcommand("mi", "Print the analytic MI table for a model");
  mi->add_option("--config", config_path, "Scenario config JSON file");
  mi->add_option("--scenario", scenario_name, "Shipped scenario name");
  mi->add_option("--method", method, "MI route: auto, dense, structured, closed")
      ->check(CLI::IsMember({"auto", "dense", "structured", "closed"}));
  mi->add_flag("--json", as_json, "Emit JSON instead of a table");

  std::string out_dir;
  std::optional<std::uint64_t> n_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint64_t> stream_override;
  bool keep_latents = false;
  std::string precision = "f32";
  std::vector<std::string> pmi_tokens;
  CLI::App* generate = app.add_subcommand("generate", "Sample a dataset bundle");
  generate->add_option("--config", config_path, "Scenario config JSON file");
  generate->add_option("--scenario", scenario_name, "Shipped scenario name");
  generate->add_option("--out", out_dir, "Bundle output directory")->required();
  generate->add_option("--n", n_override, "Override the sample count");
  generate->add_option("--seed", seed_override, "Override the master seed");
  generate->add_option("--stream", stream_override, "Override the base stream index");
  generate->add_flag("--keep-latents", keep_latents, "Also export the latent z tensors");
  generate->add_option("--precision", precision, "Export dtype: f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  generate->add_option("--pmi", pmi_tokens,
                       "Block pair for a pointwise-MI column, e.g. theta,1 (repeatable)");

  std::string bundle_dir;
  std::string pair_token;
  std::string estimator = "ksg";
  int k = 5;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate MI from a bundle");
  estimate->add_option("--bundle", bundle_dir, "Bundle directory")->required();
  estimate->add_option("--pair", pair_token, "Block pair, e.g. theta,2 or 1,2")
      ->required();
  estimate->add_option("--estimator", estimator, "ksg or gaussian")
      ->check(CLI::IsMember({"ksg", "gaussian"}));
  estimate->add_option("--k", k, "KSG neighbor count")->check(CLI::PositiveNumber);

  bool quick = false;
  bool full = false;
  CLI::App* verify = app.add_subcommand("verify", "Run the self-consistency checks");
  verify->add_option("--config", config_path, "Scenario config JSON file");
  verify->add_option("--scenario", scenario_name, "Shipped scenario name");
  verify->add_flag("--quick", quick, "Restrict checks to d <= 64 (default)");
  verify->add_flag("--full", full, "Include the full-dimension closed-form check");

  CLI::App* scenario = app.add_subcommand("scenario", "List or describe shipped scenarios");
  CLI::App* scenario_list = scenario->add_subcommand("list", "List the shipped scenarios");
  std::string describe_name;
  CLI::App* scenario_describe =
      scenario->add_subcommand("describe", "Describe one scenario");
  scenario_describe->add_option("name", describe_name, "Scenario name")->required();
  scenario->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(mi)) {
      return cmd_mi(load_config(config_path, scenario_name), method, as_json);
    }
    if (app.got_subcommand(generate)) {
      return cmd_generate(load_config(config_path, scenario_name), out_dir, n_override,
                          seed_override, stream_override, keep_latents, precision,
                          pmi_tokens);
    }
    if (app.got_subcommand(estimate)) {
      return cmd_estimate(bundle_dir, pair_token, estimator, k);
    }
    if (app.got_subcommand(verify)) {
      if (quick && full) throw mmmi::SpecError("--quick and --full are exclusive");
      return cmd_verify(load_config(config_path, scenario_name), full);
    }
    if (app.got_subcommand(scenario)) {
      if (scenario->got_subcommand(scenario_list)) return cmd_scenario_list();
      if (scenario->got_subcommand(scenario_describe)) {
        return cmd_scenario_describe(describe_name);
      }
    }
    throw mmmi::SpecError("no subcommand selected");
  } catch (const mmmi::DigestMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const mmmi::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const mmmi::DegenerateBlockError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mmmi::FactorizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
