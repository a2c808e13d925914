#include "mmmi/manifest.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

#include "mmmi/errors.hpp"

namespace mmmi {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) {
  throw IoError("manifest: " + what);
}

const Json& need(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing key '") + key + "'");
  return *it;
}

std::string need_string(const Json& obj, const char* key) {
  const Json& v = need(obj, key);
  if (!v.is_string()) bad(std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

MiMethod method_from_name(const std::string& name) {
  if (name == "dense") return MiMethod::kDense;
  if (name == "structured") return MiMethod::kStructured;
  if (name == "closed_form") return MiMethod::kClosedForm;
  if (name == "simple_closed_form") return MiMethod::kSimpleClosedForm;
  bad("unknown MI method '" + name + "'");
}

Json mi_value_to_json(const MiValue& value) {
  if (value.infinite()) return Json("infinity");
  return Json(value.nats);
}

MiValue mi_value_from_json(const Json& v, const std::string& method_name) {
  MiValue value;
  value.method = method_from_name(method_name);
  if (v.is_string()) {
    if (v.get<std::string>() != "infinity") bad("MI value must be a number or 'infinity'");
    value.nats = std::numeric_limits<double>::infinity();
    return value;
  }
  if (!v.is_number()) bad("MI value must be a number or 'infinity'");
  value.nats = v.get<double>();
  if (!std::isfinite(value.nats)) bad("finite MI entry holds a non-finite number");
  return value;
}

}  // namespace

const ManifestTensor* Manifest::find_tensor(const std::string& name) const {
  for (const ManifestTensor& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

int parse_block_label(const std::string& label, int n_z) {
  if (label == "theta") return 0;
  if (label.size() >= 2 && label[0] == 'x') {
    int id = 0;
    for (std::size_t i = 1; i < label.size(); ++i) {
      if (label[i] < '0' || label[i] > '9') { id = -1; break; }
      id = id * 10 + (label[i] - '0');
      if (id > n_z) { id = -1; break; }
    }
    if (id >= 1 && id <= n_z) return id;
  }
  throw SpecError("unknown block label '" + label + "' (expected theta or x1..x" +
                  std::to_string(n_z) + ")");
}

std::string manifest_to_json(const Manifest& manifest) {
  const ModelSpec spec = build_model(manifest.scenario);

  Json root;
  root["format"] = Json{{"name", "mmmi-bundle"}, {"version", 1}};
  root["generator"] = Json{{"name", "mmmi"}, {"version", manifest.generator_version}};
  root["scenario"] = Json::parse(scenario_config_to_json(manifest.scenario));

  Json model;
  model["n_theta"] = spec.n_theta;
  model["n_u"] = spec.n_u;
  model["n_z"] = spec.n_z;
  model["d"] = spec.d;
  model["u_dim"] = spec.u_dim();
  model["z_dim"] = spec.z_dim();
  root["model"] = std::move(model);

  Json conventions;
  conventions["units"] = "nats";
  conventions["blocks"] = "theta, then modalities x1..x" + std::to_string(spec.n_z);
  conventions["rng"] = "philox4x32-10";
  conventions["normals"] = "inverse_cdf";
  root["conventions"] = std::move(conventions);

  Json exp;
  exp["precision"] = tensor_dtype_name(manifest.precision);
  exp["keep_latents"] = manifest.keep_latents;
  Json pairs = Json::array();
  for (const auto& [first, second] : manifest.pmi_pairs) {
    pairs.push_back(Json::array({block_label(first), block_label(second)}));
  }
  exp["pmi_pairs"] = std::move(pairs);
  root["export"] = std::move(exp);

  Json mi = Json::array();
  for (const ManifestMi& entry : manifest.mutual_information) {
    Json row;
    row["first"] = block_label(entry.first);
    row["second"] = block_label(entry.second);
    row["nats"] = mi_value_to_json(entry.value);
    row["method"] = mi_method_name(entry.value.method);
    mi.push_back(std::move(row));
  }
  root["mutual_information"] = std::move(mi);

  Json tensors = Json::array();
  for (const ManifestTensor& t : manifest.tensors) {
    Json row;
    row["name"] = t.name;
    row["file"] = t.file;
    row["dtype"] = tensor_dtype_name(t.dtype);
    row["shape"] = t.shape;
    row["sha256"] = t.sha256;
    tensors.push_back(std::move(row));
  }
  root["tensors"] = std::move(tensors);

  return root.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) bad("root must be an object");

  const Json& format = need(root, "format");
  if (need_string(format, "name") != "mmmi-bundle") bad("unexpected format name");
  const Json& format_version = need(format, "version");
  if (!format_version.is_number_integer() || format_version.get<int>() != 1) {
    bad("unsupported format version");
  }

  Manifest manifest;
  manifest.generator_version = need_string(need(root, "generator"), "version");

  const Json& scenario = need(root, "scenario");
  manifest.scenario = parse_scenario_config(scenario.dump());
  const ModelSpec spec = build_model(manifest.scenario);

  const Json& model = need(root, "model");
  if (need(model, "n_theta").get<int>() != spec.n_theta ||
      need(model, "n_u").get<int>() != spec.n_u ||
      need(model, "n_z").get<int>() != spec.n_z ||
      need(model, "d").get<int>() != spec.d) {
    bad("model summary disagrees with the scenario configuration");
  }

  const Json& exp = need(root, "export");
  manifest.precision = tensor_dtype_from_name(need_string(exp, "precision"));
  const Json& keep = need(exp, "keep_latents");
  if (!keep.is_boolean()) bad("export.keep_latents must be a boolean");
  manifest.keep_latents = keep.get<bool>();
  const Json& pairs = need(exp, "pmi_pairs");
  if (!pairs.is_array()) bad("export.pmi_pairs must be an array");
  for (const Json& pair : pairs) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      bad("each PMI pair must be a two-label array");
    }
    manifest.pmi_pairs.emplace_back(parse_block_label(pair[0].get<std::string>(), spec.n_z),
                                    parse_block_label(pair[1].get<std::string>(), spec.n_z));
  }

  const Json& mi = need(root, "mutual_information");
  if (!mi.is_array()) bad("mutual_information must be an array");
  for (const Json& row : mi) {
    if (!row.is_object()) bad("each MI entry must be an object");
    ManifestMi entry;
    entry.first = parse_block_label(need_string(row, "first"), spec.n_z);
    entry.second = parse_block_label(need_string(row, "second"), spec.n_z);
    entry.value = mi_value_from_json(need(row, "nats"), need_string(row, "method"));
    manifest.mutual_information.push_back(entry);
  }

  const Json& tensors = need(root, "tensors");
  if (!tensors.is_array()) bad("tensors must be an array");
  for (const Json& row : tensors) {
    if (!row.is_object()) bad("each tensor entry must be an object");
    ManifestTensor t;
    t.name = need_string(row, "name");
    t.file = need_string(row, "file");
    t.dtype = tensor_dtype_from_name(need_string(row, "dtype"));
    const Json& shape = need(row, "shape");
    if (!shape.is_array() || shape.empty()) bad("tensor shape must be a nonempty array");
    for (const Json& extent : shape) {
      if (!extent.is_number_unsigned()) bad("tensor extents must be nonnegative integers");
      t.shape.push_back(extent.get<std::uint64_t>());
    }
    t.sha256 = need_string(row, "sha256");
    if (t.sha256.size() != 64) bad("tensor digest must be 64 hex characters");
    manifest.tensors.push_back(std::move(t));
  }

  return manifest;
}

}  // namespace mmmi
