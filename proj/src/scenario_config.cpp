#include "mmmi/scenario_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <utility>

#include "mmmi/errors.hpp"

namespace mmmi {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SpecError(where + ": " + what);
}

void check_keys(const Json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) fail(where, "unknown key '" + item.key() + "'");
  }
}

const Json* find(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double parse_double(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "must be finite");
  return x;
}

double parse_positive_double(const Json& v, const std::string& where) {
  const double x = parse_double(v, where);
  if (!(x > 0.0)) fail(where, "must be positive");
  return x;
}

std::uint64_t parse_u64(const Json& v, const std::string& where) {
  if (!v.is_number_unsigned()) fail(where, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

int parse_positive_int(const Json& v, const std::string& where) {
  const std::uint64_t x = parse_u64(v, where);
  if (x < 1 || x > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    fail(where, "must be a positive integer in range");
  }
  return static_cast<int>(x);
}

std::int64_t parse_count(const Json& v, const std::string& where) {
  const std::uint64_t x = parse_u64(v, where);
  if (x > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    fail(where, "count is out of range");
  }
  return static_cast<std::int64_t>(x);
}

std::vector<double> parse_double_array(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a nonempty array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_double(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> parse_double_matrix(const Json& v,
                                                     const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a nonempty array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_double_array(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

TemplateSpec parse_template(const Json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected a template object");
  const Json* kind = find(v, "kind");
  if (kind == nullptr || !kind->is_string()) fail(where, "template needs a string 'kind'");
  const std::string name = kind->get<std::string>();
  TemplateSpec t;
  if (name == "ones") {
    check_keys(v, where, {"kind"});
    t.kind = TemplateSpec::Kind::kOnes;
  } else if (name == "zeros") {
    check_keys(v, where, {"kind"});
    t.kind = TemplateSpec::Kind::kZeros;
  } else if (name == "point_mass") {
    check_keys(v, where, {"kind", "index"});
    t.kind = TemplateSpec::Kind::kPointMass;
    const Json* index = find(v, "index");
    if (index == nullptr) fail(where, "point_mass needs 'index'");
    t.index = parse_count(*index, where + ".index");
  } else if (name == "gaussian_bump") {
    check_keys(v, where, {"kind", "center", "width"});
    t.kind = TemplateSpec::Kind::kGaussianBump;
    const Json* center = find(v, "center");
    const Json* width = find(v, "width");
    if (center == nullptr || width == nullptr) {
      fail(where, "gaussian_bump needs 'center' and 'width'");
    }
    t.center = parse_double(*center, where + ".center");
    t.width = parse_positive_double(*width, where + ".width");
  } else if (name == "explicit") {
    check_keys(v, where, {"kind", "values"});
    t.kind = TemplateSpec::Kind::kExplicit;
    const Json* values = find(v, "values");
    if (values == nullptr) fail(where, "explicit needs 'values'");
    t.values = parse_double_array(*values, where + ".values");
  } else {
    fail(where, "unknown template kind '" + name + "'");
  }
  return t;
}

Json template_to_json(const TemplateSpec& t) {
  Json o;
  switch (t.kind) {
    case TemplateSpec::Kind::kOnes:
      o["kind"] = "ones";
      break;
    case TemplateSpec::Kind::kZeros:
      o["kind"] = "zeros";
      break;
    case TemplateSpec::Kind::kPointMass:
      o["kind"] = "point_mass";
      o["index"] = t.index;
      break;
    case TemplateSpec::Kind::kGaussianBump:
      o["kind"] = "gaussian_bump";
      o["center"] = t.center;
      o["width"] = t.width;
      break;
    case TemplateSpec::Kind::kExplicit:
      o["kind"] = "explicit";
      o["values"] = t.values;
      break;
  }
  return o;
}

void parse_generic_model(const Json& m, GenericModelConfig& g) {
  check_keys(m, "model", {"kind", "n_theta", "n_u", "n_z", "d", "eta", "rho_tilde",
                          "rho_hat", "templates"});
  const Json* d = find(m, "d");
  if (d == nullptr) fail("model.d", "generic model requires 'd'");
  g.d = parse_positive_int(*d, "model.d");

  const Json* eta = find(m, "eta");
  if (eta == nullptr) fail("model.eta", "generic model requires 'eta'");
  g.eta = parse_double_array(*eta, "model.eta");
  g.n_theta = static_cast<int>(g.eta.size());

  const Json* rho_tilde = find(m, "rho_tilde");
  if (rho_tilde == nullptr) fail("model.rho_tilde", "generic model requires 'rho_tilde'");
  g.rho_tilde = parse_double_matrix(*rho_tilde, "model.rho_tilde");
  g.n_z = static_cast<int>(g.rho_tilde.size());
  for (std::size_t i = 0; i < g.rho_tilde.size(); ++i) {
    if (static_cast<int>(g.rho_tilde[i].size()) != g.n_theta) {
      fail("model.rho_tilde[" + std::to_string(i) + "]",
           "row length must equal the eta length");
    }
  }

  const Json* rho_hat = find(m, "rho_hat");
  if (rho_hat == nullptr) fail("model.rho_hat", "generic model requires 'rho_hat'");
  g.rho_hat = parse_double_matrix(*rho_hat, "model.rho_hat");
  if (static_cast<int>(g.rho_hat.size()) != g.n_z) {
    fail("model.rho_hat", "needs one row per modality");
  }
  g.n_u = static_cast<int>(g.rho_hat.front().size());
  for (std::size_t i = 0; i < g.rho_hat.size(); ++i) {
    if (static_cast<int>(g.rho_hat[i].size()) != g.n_u) {
      fail("model.rho_hat[" + std::to_string(i) + "]", "rows must have equal length");
    }
  }

  if (const Json* n_theta = find(m, "n_theta")) {
    if (parse_positive_int(*n_theta, "model.n_theta") != g.n_theta) {
      fail("model.n_theta", "disagrees with the eta length");
    }
  }
  if (const Json* n_u = find(m, "n_u")) {
    if (parse_positive_int(*n_u, "model.n_u") != g.n_u) {
      fail("model.n_u", "disagrees with the rho_hat row length");
    }
  }
  if (const Json* n_z = find(m, "n_z")) {
    if (parse_positive_int(*n_z, "model.n_z") != g.n_z) {
      fail("model.n_z", "disagrees with the rho_tilde row count");
    }
  }

  if (const Json* templates = find(m, "templates")) {
    if (!templates->is_array() || static_cast<int>(templates->size()) != g.n_z) {
      fail("model.templates", "needs one row per modality");
    }
    for (std::size_t i = 0; i < templates->size(); ++i) {
      const Json& row = (*templates)[i];
      const std::string where = "model.templates[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != g.n_theta) {
        fail(where, "needs one template per shared cause");
      }
      std::vector<TemplateSpec> specs;
      for (std::size_t k = 0; k < row.size(); ++k) {
        specs.push_back(parse_template(row[k], where + "[" + std::to_string(k) + "]"));
      }
      g.templates.push_back(std::move(specs));
    }
  } else {
    g.templates.assign(static_cast<std::size_t>(g.n_z),
                       std::vector<TemplateSpec>(static_cast<std::size_t>(g.n_theta)));
  }
}

void parse_simple_dag_model(const Json& m, SimpleDagModelConfig& s) {
  check_keys(m, "model", {"kind", "d", "eta", "rho_tilde_11", "rho_tilde_12",
                          "rho_hat_11", "rho_hat_22"});
  if (const Json* v = find(m, "d")) s.d = parse_positive_int(*v, "model.d");
  if (const Json* v = find(m, "eta")) s.eta = parse_double(*v, "model.eta");
  if (const Json* v = find(m, "rho_tilde_11")) s.rho_tilde_11 = parse_double(*v, "model.rho_tilde_11");
  if (const Json* v = find(m, "rho_tilde_12")) s.rho_tilde_12 = parse_double(*v, "model.rho_tilde_12");
  if (const Json* v = find(m, "rho_hat_11")) s.rho_hat_11 = parse_double(*v, "model.rho_hat_11");
  if (const Json* v = find(m, "rho_hat_22")) s.rho_hat_22 = parse_double(*v, "model.rho_hat_22");
}

void parse_blackhole_model(const Json& m, BlackholeModelConfig& b) {
  check_keys(m, "model",
             {"kind", "d", "eta1", "eta2", "rho_tilde_11", "rho_tilde_12",
              "rho_tilde_21", "rho_hat_11", "rho_hat_22", "center_template",
              "diffuse_template"});
  if (const Json* v = find(m, "d")) b.d = parse_positive_int(*v, "model.d");
  if (const Json* v = find(m, "eta1")) b.eta1 = parse_double(*v, "model.eta1");
  if (const Json* v = find(m, "eta2")) b.eta2 = parse_double(*v, "model.eta2");
  if (const Json* v = find(m, "rho_tilde_11")) b.rho_tilde_11 = parse_double(*v, "model.rho_tilde_11");
  if (const Json* v = find(m, "rho_tilde_12")) b.rho_tilde_12 = parse_double(*v, "model.rho_tilde_12");
  if (const Json* v = find(m, "rho_tilde_21")) b.rho_tilde_21 = parse_double(*v, "model.rho_tilde_21");
  if (const Json* v = find(m, "rho_hat_11")) b.rho_hat_11 = parse_double(*v, "model.rho_hat_11");
  if (const Json* v = find(m, "rho_hat_22")) b.rho_hat_22 = parse_double(*v, "model.rho_hat_22");
  if (const Json* v = find(m, "center_template")) {
    b.center_template = parse_template(*v, "model.center_template");
  } else {
    b.center_template.kind = TemplateSpec::Kind::kGaussianBump;
    b.center_template.center = (b.d - 1) / 2.0;
    b.center_template.width = b.d / 8.0;
  }
  if (const Json* v = find(m, "diffuse_template")) {
    b.diffuse_template = parse_template(*v, "model.diffuse_template");
  } else {
    b.diffuse_template.kind = TemplateSpec::Kind::kOnes;
  }
}

void parse_scalable_model(const Json& m, ScalableModelConfig& s) {
  check_keys(m, "model", {"kind", "n_z", "d", "alpha", "beta", "eta",
                          "rho_tilde_base", "rho_hat_base"});
  if (const Json* v = find(m, "n_z")) s.n_z = parse_positive_int(*v, "model.n_z");
  if (const Json* v = find(m, "d")) s.d = parse_positive_int(*v, "model.d");
  if (const Json* v = find(m, "alpha")) s.alpha = parse_double(*v, "model.alpha");
  if (const Json* v = find(m, "beta")) s.beta = parse_double(*v, "model.beta");
  if (const Json* v = find(m, "eta")) s.eta = parse_double(*v, "model.eta");
  if (const Json* v = find(m, "rho_tilde_base")) s.rho_tilde_base = parse_double(*v, "model.rho_tilde_base");
  if (const Json* v = find(m, "rho_hat_base")) s.rho_hat_base = parse_double(*v, "model.rho_hat_base");
}

void parse_sampling(const Json& s, SamplingConfig& out) {
  check_keys(s, "sampling", {"n", "seed", "stream"});
  if (const Json* v = find(s, "n")) out.n = parse_count(*v, "sampling.n");
  if (const Json* v = find(s, "seed")) out.seed = parse_u64(*v, "sampling.seed");
  if (const Json* v = find(s, "stream")) out.stream = parse_u64(*v, "sampling.stream");
}

void parse_transforms(const Json& t, TransformsConfig& out) {
  std::string kind = "identity";
  if (const Json* v = find(t, "kind")) {
    if (!v->is_string()) fail("transforms.kind", "expected a string");
    kind = v->get<std::string>();
  }
  if (kind == "identity") {
    out.kind = TransformKind::kIdentity;
    check_keys(t, "transforms", {"kind", "seed"});
  } else if (kind == "chain") {
    out.kind = TransformKind::kChain;
    check_keys(t, "transforms", {"kind", "depth", "clamp", "seed"});
    if (const Json* v = find(t, "depth")) out.depth = parse_positive_int(*v, "transforms.depth");
    if (const Json* v = find(t, "clamp")) out.clamp = parse_positive_double(*v, "transforms.clamp");
  } else if (kind == "external") {
    out.kind = TransformKind::kExternal;
    check_keys(t, "transforms", {"kind", "seed"});
  } else {
    fail("transforms.kind", "unknown transform kind '" + kind + "'");
  }
  if (const Json* v = find(t, "seed")) out.seed = parse_u64(*v, "transforms.seed");
}

}  // namespace

const char* scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kGeneric: return "generic";
    case ScenarioKind::kSimpleDag: return "simple_dag";
    case ScenarioKind::kBlackhole: return "blackhole";
    case ScenarioKind::kScalable: return "scalable";
  }
  return "unknown";
}

Template TemplateSpec::build(int d) const {
  switch (kind) {
    case Kind::kOnes:
      return Template::ones(d);
    case Kind::kZeros:
      return Template::zeros(d);
    case Kind::kPointMass:
      if (index < 0 || index >= d) {
        throw SpecError("point_mass index " + std::to_string(index) +
                        " is outside dimension " + std::to_string(d));
      }
      return Template::point_mass(d, static_cast<int>(index));
    case Kind::kGaussianBump:
      if (!(width > 0.0)) throw SpecError("gaussian_bump width must be positive");
      return Template::gaussian_bump(d, center, width);
    case Kind::kExplicit: {
      if (static_cast<int>(values.size()) != d) {
        throw SpecError("explicit template has " + std::to_string(values.size()) +
                        " values but the model dimension is " + std::to_string(d));
      }
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v[i] = values[static_cast<std::size_t>(i)];
      return Template::explicit_values(std::move(v));
    }
  }
  throw SpecError("unknown template kind");
}

int ScenarioConfig::n_z() const {
  switch (kind) {
    case ScenarioKind::kGeneric: return generic.n_z;
    case ScenarioKind::kSimpleDag: return 2;
    case ScenarioKind::kBlackhole: return 2;
    case ScenarioKind::kScalable: return scalable.n_z;
  }
  return 0;
}

int ScenarioConfig::d() const {
  switch (kind) {
    case ScenarioKind::kGeneric: return generic.d;
    case ScenarioKind::kSimpleDag: return simple_dag.d;
    case ScenarioKind::kBlackhole: return blackhole.d;
    case ScenarioKind::kScalable: return scalable.d;
  }
  return 0;
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SpecError("config root must be an object");
  check_keys(root, "config", {"model", "sampling", "transforms"});

  const Json* model = find(root, "model");
  if (model == nullptr) throw SpecError("config requires a 'model' section");
  if (!model->is_object()) fail("model", "expected an object");

  ScenarioConfig config;
  std::string kind = "generic";
  if (const Json* v = find(*model, "kind")) {
    if (!v->is_string()) fail("model.kind", "expected a string");
    kind = v->get<std::string>();
  }
  if (kind == "generic") {
    config.kind = ScenarioKind::kGeneric;
    parse_generic_model(*model, config.generic);
  } else if (kind == "simple_dag") {
    config.kind = ScenarioKind::kSimpleDag;
    parse_simple_dag_model(*model, config.simple_dag);
  } else if (kind == "blackhole") {
    config.kind = ScenarioKind::kBlackhole;
    parse_blackhole_model(*model, config.blackhole);
  } else if (kind == "scalable") {
    config.kind = ScenarioKind::kScalable;
    parse_scalable_model(*model, config.scalable);
  } else {
    fail("model.kind", "unknown model kind '" + kind + "'");
  }

  if (const Json* sampling = find(root, "sampling")) {
    if (!sampling->is_object()) fail("sampling", "expected an object");
    parse_sampling(*sampling, config.sampling);
  }
  if (const Json* transforms = find(root, "transforms")) {
    if (!transforms->is_object()) fail("transforms", "expected an object");
    parse_transforms(*transforms, config.transforms);
  }
  return config;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("read error on config file " + path.string());
  return parse_scenario_config(text.str());
}

std::string scenario_config_to_json(const ScenarioConfig& config) {
  Json model;
  model["kind"] = scenario_kind_name(config.kind);
  switch (config.kind) {
    case ScenarioKind::kGeneric: {
      const GenericModelConfig& g = config.generic;
      model["n_theta"] = g.n_theta;
      model["n_u"] = g.n_u;
      model["n_z"] = g.n_z;
      model["d"] = g.d;
      model["eta"] = g.eta;
      model["rho_tilde"] = g.rho_tilde;
      model["rho_hat"] = g.rho_hat;
      Json templates = Json::array();
      for (const auto& row : g.templates) {
        Json json_row = Json::array();
        for (const auto& t : row) json_row.push_back(template_to_json(t));
        templates.push_back(std::move(json_row));
      }
      model["templates"] = std::move(templates);
      break;
    }
    case ScenarioKind::kSimpleDag: {
      const SimpleDagModelConfig& s = config.simple_dag;
      model["d"] = s.d;
      model["eta"] = s.eta;
      model["rho_tilde_11"] = s.rho_tilde_11;
      model["rho_tilde_12"] = s.rho_tilde_12;
      model["rho_hat_11"] = s.rho_hat_11;
      model["rho_hat_22"] = s.rho_hat_22;
      break;
    }
    case ScenarioKind::kBlackhole: {
      const BlackholeModelConfig& b = config.blackhole;
      model["d"] = b.d;
      model["eta1"] = b.eta1;
      model["eta2"] = b.eta2;
      model["rho_tilde_11"] = b.rho_tilde_11;
      model["rho_tilde_12"] = b.rho_tilde_12;
      model["rho_tilde_21"] = b.rho_tilde_21;
      model["rho_hat_11"] = b.rho_hat_11;
      model["rho_hat_22"] = b.rho_hat_22;
      model["center_template"] = template_to_json(b.center_template);
      model["diffuse_template"] = template_to_json(b.diffuse_template);
      break;
    }
    case ScenarioKind::kScalable: {
      const ScalableModelConfig& s = config.scalable;
      model["n_z"] = s.n_z;
      model["d"] = s.d;
      model["alpha"] = s.alpha;
      model["beta"] = s.beta;
      model["eta"] = s.eta;
      model["rho_tilde_base"] = s.rho_tilde_base;
      model["rho_hat_base"] = s.rho_hat_base;
      break;
    }
  }

  Json sampling;
  sampling["n"] = config.sampling.n;
  sampling["seed"] = config.sampling.seed;
  sampling["stream"] = config.sampling.stream;

  Json transforms;
  transforms["kind"] = transform_kind_name(config.transforms.kind);
  if (config.transforms.kind == TransformKind::kChain) {
    transforms["depth"] = config.transforms.depth;
    transforms["clamp"] = config.transforms.clamp;
  }
  transforms["seed"] = config.transforms.seed;

  Json root;
  root["model"] = std::move(model);
  root["sampling"] = std::move(sampling);
  root["transforms"] = std::move(transforms);
  return root.dump(2) + "\n";
}

ModelSpec build_model(const ScenarioConfig& config) {
  switch (config.kind) {
    case ScenarioKind::kGeneric: {
      const GenericModelConfig& g = config.generic;
      ModelSpec spec;
      spec.n_theta = g.n_theta;
      spec.n_u = g.n_u;
      spec.n_z = g.n_z;
      spec.d = g.d;
      spec.eta.resize(g.n_theta);
      for (int k = 0; k < g.n_theta; ++k) spec.eta[k] = g.eta[static_cast<std::size_t>(k)];
      spec.rho_tilde.resize(g.n_z, g.n_theta);
      spec.rho_hat.resize(g.n_z, g.n_u);
      for (int i = 0; i < g.n_z; ++i) {
        for (int k = 0; k < g.n_theta; ++k) {
          spec.rho_tilde(i, k) = g.rho_tilde[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
        for (int j = 0; j < g.n_u; ++j) {
          spec.rho_hat(i, j) = g.rho_hat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
      }
      spec.templates.reserve(static_cast<std::size_t>(g.n_z));
      for (const auto& row : g.templates) {
        std::vector<Template> built;
        built.reserve(row.size());
        for (const auto& t : row) built.push_back(t.build(g.d));
        spec.templates.push_back(std::move(built));
      }
      require_valid(spec);
      return spec;
    }
    case ScenarioKind::kSimpleDag: {
      const SimpleDagModelConfig& s = config.simple_dag;
      return make_simple_dag_spec(s.eta, s.rho_tilde_11, s.rho_tilde_12,
                                  s.rho_hat_11, s.rho_hat_22, s.d);
    }
    case ScenarioKind::kBlackhole: {
      const BlackholeModelConfig& b = config.blackhole;
      BlackholeParams params;
      params.eta1 = b.eta1;
      params.eta2 = b.eta2;
      params.rho_tilde_11 = b.rho_tilde_11;
      params.rho_tilde_12 = b.rho_tilde_12;
      params.rho_tilde_21 = b.rho_tilde_21;
      params.rho_hat_11 = b.rho_hat_11;
      params.rho_hat_22 = b.rho_hat_22;
      return build_blackhole_spec(params, b.center_template.build(b.d),
                                  b.diffuse_template.build(b.d));
    }
    case ScenarioKind::kScalable: {
      const ScalableModelConfig& s = config.scalable;
      ScalableSpecParams params;
      params.alpha = s.alpha;
      params.beta = s.beta;
      params.eta = s.eta;
      params.rho_tilde_base = s.rho_tilde_base;
      params.rho_hat_base = s.rho_hat_base;
      params.n_z = s.n_z;
      params.d = s.d;
      return expand_scalable_spec(params);
    }
  }
  throw SpecError("unknown scenario kind");
}

TransformPlan build_plan(const ScenarioConfig& config) {
  TransformPlan plan;
  plan.seed = config.transforms.seed;
  TransformEntry entry;
  entry.kind = config.transforms.kind;
  entry.depth = config.transforms.kind == TransformKind::kChain ? config.transforms.depth : 0;
  entry.clamp = config.transforms.clamp;
  plan.entries.assign(static_cast<std::size_t>(config.n_z()), entry);
  return plan;
}

const std::vector<ScenarioEntry>& scenario_catalog() {
  static const std::vector<ScenarioEntry> entries = [] {
    std::vector<ScenarioEntry> list;

    {
      ScenarioEntry e;
      e.name = "simple_dag";
      e.summary =
          "Minimal two-modality chain with one scalar cause and closed-form MI.";
      e.details =
          "One shared cause theta feeds both modalities through all-ones\n"
          "templates with private per-modality noise. Every MI value has a\n"
          "closed form; with all coefficients 1 and d=3072 the targets are\n"
          "I(theta;X1) = 0.5 ln 3073 and I(X1;X2) = ln 3073 - 0.5 ln 6145.";
      e.config.kind = ScenarioKind::kSimpleDag;
      e.config.sampling = {1024, 7, 0};
      e.config.transforms = {TransformKind::kChain, 4, 2.0, 101};
      list.push_back(std::move(e));
    }

    {
      ScenarioEntry e;
      e.name = "blackhole";
      e.summary =
          "Two telescopes observing a galactic-center source through shared "
          "and private causes.";
      e.details =
          "Modality 1 is a ground-based radio array, modality 2 a space\n"
          "telescope. Two shared causes exist: the source mass (a centered\n"
          "bump template reaching both instruments) and atmospheric\n"
          "variability (a diffuse template reaching only the ground array).\n"
          "Narrative 1, eta=(1,0): theta is the source mass; it has a causal\n"
          "path to both modalities, so all MI entries are positive.\n"
          "Narrative 2, eta=(0,1): theta is the atmospheric effect; modality\n"
          "2 has no causal path from it, so I(theta;X2) = 0 exactly.\n"
          "I(X1;X2) is identical under both narratives.";
      e.config.kind = ScenarioKind::kBlackhole;
      e.config.blackhole.center_template.kind = TemplateSpec::Kind::kGaussianBump;
      e.config.blackhole.center_template.center = (e.config.blackhole.d - 1) / 2.0;
      e.config.blackhole.center_template.width = e.config.blackhole.d / 8.0;
      e.config.blackhole.diffuse_template.kind = TemplateSpec::Kind::kOnes;
      e.config.sampling = {1024, 7, 0};
      e.config.transforms = {TransformKind::kChain, 4, 2.0, 101};
      list.push_back(std::move(e));
    }

    {
      ScenarioEntry e;
      e.name = "scalable";
      e.summary =
          "Ten modalities from one cause with two decay knobs, alpha and beta.";
      e.details =
          "One shared cause feeds n_z modalities with loading beta^-i, and\n"
          "noise block j reaches modality i with weight alpha^-|i-j|.\n"
          "alpha >= 1 controls cross-modality correlation: as alpha grows,\n"
          "I(X1;Xi) decays faster with the distance |1-i|; as alpha -> 1 the\n"
          "modalities become uniformly correlated. beta >= 1 controls the\n"
          "shared-cause decay: as beta grows, I(theta;Xi) decays faster in\n"
          "i; as beta -> 1 it becomes uniform across modalities.";
      e.config.kind = ScenarioKind::kScalable;
      e.config.sampling = {1024, 7, 0};
      e.config.transforms = {TransformKind::kChain, 4, 2.0, 101};
      list.push_back(std::move(e));
    }

    {
      ScenarioEntry e;
      e.name = "templated";
      e.summary =
          "Two causes with contrasting templates: bump, point mass, uniform.";
      e.details =
          "A generic two-modality model whose templates place the same\n"
          "information in different feature layouts: cause 1 lands as a\n"
          "centered bump in modality 1 but as a single coordinate in\n"
          "modality 2, while cause 2 spreads uniformly in both. Block MI is\n"
          "unchanged by these shapes (for a single cause the template norm\n"
          "is all that matters), so the scenario isolates architectural\n"
          "sensitivity to information layout.";
      e.config.kind = ScenarioKind::kGeneric;
      GenericModelConfig& g = e.config.generic;
      g.n_theta = 2;
      g.n_u = 2;
      g.n_z = 2;
      g.d = 3072;
      g.eta = {1.0, 1.0};
      g.rho_tilde = {{1.0, 1.0}, {1.0, 1.0}};
      g.rho_hat = {{1.0, 0.0}, {0.0, 1.0}};
      TemplateSpec bump;
      bump.kind = TemplateSpec::Kind::kGaussianBump;
      bump.center = (g.d - 1) / 2.0;
      bump.width = g.d / 8.0;
      TemplateSpec point;
      point.kind = TemplateSpec::Kind::kPointMass;
      point.index = 0;
      TemplateSpec ones;
      ones.kind = TemplateSpec::Kind::kOnes;
      g.templates = {{bump, ones}, {point, ones}};
      e.config.sampling = {1024, 7, 0};
      e.config.transforms = {TransformKind::kChain, 4, 2.0, 101};
      list.push_back(std::move(e));
    }

    return list;
  }();
  return entries;
}

const ScenarioEntry* find_scenario(const std::string& name) {
  for (const ScenarioEntry& entry : scenario_catalog()) {
    if (entry.name == name) return &entry;
  }
  return nullptr;
}

}  // namespace mmmi
