#include "ncps/config.hpp"

#include <fstream>
#include <sstream>

namespace ncps::config {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message),
      path_(std::move(path)) {}

Json load_config_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(filename, "cannot open config file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(filename, e.what());
  }
}

namespace {

const Json* maybe(const Json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  const Json* v = maybe(j, key);
  if (!v) throw ConfigError(join(path, key), "missing required field");
  return *v;
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

double require_param(const std::map<std::string, double>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError("params." + name, "missing required parameter");
  return it->second;
}

std::map<std::string, double> parse_params(const Json& cfg) {
  std::map<std::string, double> params;
  if (const Json* p = maybe(cfg, "params")) {
    if (!p->is_object()) throw ConfigError("params", "expected an object");
    for (auto it = p->begin(); it != p->end(); ++it)
      params[it.key()] = number_at(it.value(), "params." + it.key());
  }
  return params;
}

ScalarField field_at(const SpacePtr& space, const Json& j, const std::string& path) {
  const std::string src = string_at(j, path);
  try {
    return expr_field(space, src);
  } catch (const expr::ParseError& e) {
    throw ConfigError(path, e.what());
  } catch (const expr::BindError& e) {
    throw ConfigError(path, e.what());
  }
}

ScalarField field_or_zero(const SpacePtr& space, const Json& cfg, const std::string& key,
                          const std::string& path) {
  if (const Json* j = maybe(cfg, key)) return field_at(space, *j, join(path, key));
  return constant_field(space, 0.0);
}

// n x n matrix of expression strings. When `antisymmetrize` is set the lower
// triangle is derived as the negative of the upper triangle, which enforces
// the pointwise antisymmetry invariant by construction.
MatrixField matrix_at(const SpacePtr& space, const Json& j, int n, const std::string& path,
                      bool antisymmetrize) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(path, "expected a " + std::to_string(n) + "x" + std::to_string(n) +
                                " array of expressions");
  MatrixField m(space, n);
  for (int r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ConfigError(path + "[" + std::to_string(r) + "]",
                        "expected a row of " + std::to_string(n) + " expressions");
    for (int c = 0; c < n; ++c) {
      const std::string cell_path =
          path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      ScalarField f = field_at(space, row[static_cast<std::size_t>(c)], cell_path);
      if (!antisymmetrize) {
        m.set(r, c, std::move(f));
      } else if (r < c) {
        std::vector<std::pair<double, ScalarField>> neg{{-1.0, f}};
        m.set(c, r, linear_combination(space, std::move(neg)));
        m.set(r, c, std::move(f));
      }
      // r >= c entries of an antisymmetrized matrix are derived above
    }
  }
  return m;
}

std::array<ScalarField, 3> triple_at(const SpacePtr& space, const Json& j,
                                     const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path, "expected an array of 3 expressions");
  return {field_at(space, j[0], path + "[0]"), field_at(space, j[1], path + "[1]"),
          field_at(space, j[2], path + "[2]")};
}

}  // namespace

LoadedModel build_model(const Json& cfg) {
  const std::map<std::string, double> params = parse_params(cfg);
  const Json& model_cfg = require(cfg, "model", "");

  std::string preset = "custom";
  if (const Json* p = maybe(model_cfg, "preset")) preset = string_at(*p, "model.preset");

  LoadedModel out;
  out.preset = preset;

  if (preset == "exotic_plane") {
    const double m = require_param(params, "m");
    const double theta = require_param(params, "theta");
    out.space = souriau::exotic_space(params);
    ScalarField b = field_or_zero(out.space, model_cfg, "B", "model");
    ScalarField v = field_or_zero(out.space, model_cfg, "V", "model");
    out.model = souriau::make_exotic_plane(theta, std::move(b), std::move(v), m);
  } else if (preset == "anyon") {
    const double m = require_param(params, "m");
    const double kappa = require_param(params, "kappa");
    auto [model, constraints] = souriau::make_anyon(kappa, m);
    out.space = model.space();
    out.model = std::move(model);
    out.constraints = std::move(constraints);
  } else if (preset == "generalized_lorentz") {
    const double m = require_param(params, "m");
    out.space = souriau::lorentz_space(params);
    std::array<ScalarField, 3> b = {constant_field(out.space, 0.0),
                                    constant_field(out.space, 0.0),
                                    constant_field(out.space, 0.0)};
    if (const Json* j = maybe(model_cfg, "B3")) b = triple_at(out.space, *j, "model.B3");
    MatrixField g(out.space, 3);
    if (const Json* j = maybe(model_cfg, "g"))
      g = matrix_at(out.space, *j, 3, "model.g", /*antisymmetrize=*/true);
    ScalarField phi = field_or_zero(out.space, model_cfg, "phi", "model");
    out.model = souriau::make_generalized_lorentz(std::move(b), std::move(g), std::move(phi), m);
  } else if (preset == "dual_magnetic") {
    const double m = require_param(params, "m");
    const Json& gj = require(model_cfg, "g", "model");
    if (!gj.is_array()) throw ConfigError("model.g", "expected an array");
    const int n = static_cast<int>(gj.size());
    if (n < 1) throw ConfigError("model.g", "empty block");
    out.space = souriau::dual_magnetic_space(n, params);
    MatrixField g = matrix_at(out.space, gj, n, "model.g", /*antisymmetrize=*/true);
    MatrixField f(out.space, n);
    if (const Json* j = maybe(model_cfg, "f"))
      f = matrix_at(out.space, *j, n, "model.f", /*antisymmetrize=*/true);
    if (const Json* h = maybe(cfg, "hamiltonian")) {
      out.model = souriau::make_dual_magnetic(std::move(g), std::move(f),
                                              field_at(out.space, *h, "hamiltonian"));
    } else {
      ScalarField v = field_or_zero(out.space, model_cfg, "V", "model");
      out.model =
          souriau::make_dual_magnetic_newtonian(std::move(g), std::move(f), std::move(v), m);
    }
  } else if (preset == "leibniz") {
    const Json& gj = require(model_cfg, "g", "model");
    if (!gj.is_array()) throw ConfigError("model.g", "expected an array");
    const int n = static_cast<int>(gj.size());
    std::vector<std::string> aliases;
    for (int i = 1; i <= n; ++i) aliases.push_back("x" + std::to_string(i));
    if (const Json* sj = maybe(cfg, "space")) {
      if (const Json* aj = maybe(*sj, "aliases")) {
        aliases.clear();
        for (const auto& a : *aj) aliases.push_back(string_at(a, "space.aliases"));
      }
    }
    out.kind = LoadedModel::Kind::Leibniz;
    out.space = PhaseSpace::make(aliases, params);
    out.leibniz_g = matrix_at(out.space, gj, n, "model.g", /*antisymmetrize=*/false);
    out.leibniz_h = field_at(out.space, require(cfg, "hamiltonian", ""), "hamiltonian");
    return out;
  } else if (preset == "custom") {
    const Json& sj = require(cfg, "space", "");
    const Json& aj = require(sj, "aliases", "space");
    std::vector<std::string> aliases;
    for (const auto& a : aj) aliases.push_back(string_at(a, "space.aliases"));
    if (const Json* dj = maybe(sj, "dim")) {
      const int dim = static_cast<int>(number_at(*dj, "space.dim"));
      if (dim != static_cast<int>(aliases.size()))
        throw ConfigError("space.dim", "dim does not match the alias list");
    }
    if (aliases.size() < 2 || aliases.size() % 2 != 0)
      throw ConfigError("space.aliases", "phase space dimension must be even and >= 2");
    try {
      out.space = PhaseSpace::make(aliases, params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("space.aliases", e.what());
    }
    const int n = static_cast<int>(aliases.size());
    ScalarField h = field_or_zero(out.space, cfg, "hamiltonian", "");
    if (const Json* oj = maybe(model_cfg, "omega")) {
      TwoFormField omega(
          matrix_at(out.space, *oj, n, "model.omega", /*antisymmetrize=*/true));
      out.model = souriau::SouriauModel::form_first("custom", std::move(omega), std::move(h));
    } else if (const Json* lj = maybe(model_cfg, "lambda")) {
      BivectorField lambda(
          matrix_at(out.space, *lj, n, "model.lambda", /*antisymmetrize=*/true));
      out.model =
          souriau::SouriauModel::bivector_first("custom", std::move(lambda), std::move(h));
    } else {
      throw ConfigError("model", "custom model needs an 'omega' or 'lambda' block");
    }
  } else {
    throw ConfigError("model.preset", "unknown preset '" + preset + "'");
  }
  return out;
}

SampleBox probe_box(const Json& cfg, bool seed_override_valid, unsigned seed_override,
                    int probes_override) {
  SampleBox box;
  if (const Json* pj = maybe(cfg, "probe")) {
    if (const Json* bj = maybe(*pj, "box")) {
      if (!bj->is_array() || bj->size() != 2)
        throw ConfigError("probe.box", "expected [lo, hi]");
      box.lo = {number_at((*bj)[0], "probe.box[0]")};
      box.hi = {number_at((*bj)[1], "probe.box[1]")};
      if (!(box.lo[0] < box.hi[0])) throw ConfigError("probe.box", "needs lo < hi");
    }
    if (const Json* cj = maybe(*pj, "count"))
      box.count = static_cast<int>(number_at(*cj, "probe.count"));
    if (const Json* sj = maybe(*pj, "seed"))
      box.seed = static_cast<unsigned>(number_at(*sj, "probe.seed"));
  }
  if (probes_override > 0) box.count = probes_override;
  if (seed_override_valid) box.seed = seed_override;
  if (box.count < 1) throw ConfigError("probe.count", "need at least one probe point");
  return box;
}

std::optional<IntegrateSpec> integrate_spec(const Json& cfg, const LoadedModel& model) {
  const Json* ij = maybe(cfg, "integrate");
  if (!ij) return std::nullopt;

  IntegrateSpec spec;
  if (const Json* sj = maybe(*ij, "scheme")) {
    try {
      spec.cfg.scheme = dynamics::scheme_from_name(string_at(*sj, "integrate.scheme"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("integrate.scheme", e.what());
    }
  }
  spec.cfg.dt = number_at(require(*ij, "dt", "integrate"), "integrate.dt");
  spec.cfg.t_end = number_at(require(*ij, "t_end", "integrate"), "integrate.t_end");
  if (spec.cfg.dt <= 0.0) throw ConfigError("integrate.dt", "dt must be positive");
  if (spec.cfg.t_end <= 0.0) throw ConfigError("integrate.t_end", "t_end must be positive");

  const Json& init = require(*ij, "initial", "integrate");
  if (!init.is_array() || static_cast<int>(init.size()) != model.space->dim())
    throw ConfigError("integrate.initial",
                      "expected " + std::to_string(model.space->dim()) + " coordinates");
  for (std::size_t i = 0; i < init.size(); ++i)
    spec.initial.push_back(number_at(init[i], "integrate.initial"));

  // The model Hamiltonian is always monitored; configured observables follow
  // in declared order.
  if (model.kind == LoadedModel::Kind::Souriau)
    spec.cfg.observables.emplace_back("H", model.model.hamiltonian());
  else
    spec.cfg.observables.emplace_back("H", model.leibniz_h);
  if (const Json* oj = maybe(*ij, "observables")) {
    if (!oj->is_object()) throw ConfigError("integrate.observables", "expected an object");
    for (auto it = oj->begin(); it != oj->end(); ++it) {
      if (it.key() == "H") continue;
      spec.cfg.observables.emplace_back(
          it.key(), field_at(model.space, it.value(), "integrate.observables." + it.key()));
    }
  }
  return spec;
}

FdConfig build_fd(const Json& cfg) {
  const std::map<std::string, double> params = parse_params(cfg);
  const Json& fj = require(cfg, "fd", "");

  FdConfig out;
  out.m = require_param(params, "m");
  out.space = fd::velocity_space(params);

  if (const Json* force = maybe(fj, "force")) {
    fd::ForceLaw fl;
    fl.m = out.m;
    fl.f = triple_at(out.space, *force, "fd.force");
    out.force = std::move(fl);
  }
  if (const Json* fields = maybe(fj, "fields")) {
    auto b = triple_at(out.space, require(*fields, "B", "fd.fields"), "fd.fields.B");
    auto e = triple_at(out.space, require(*fields, "E", "fd.fields"), "fd.fields.E");
    out.fields = std::make_pair(std::move(b), std::move(e));
  }
  if (const Json* nc = maybe(fj, "nc")) {
    MatrixField g = matrix_at(out.space, require(*nc, "g", "fd.nc"), 3, "fd.nc.g",
                              /*antisymmetrize=*/true);
    MatrixField vv = matrix_at(out.space, require(*nc, "bracket_vv", "fd.nc"), 3,
                               "fd.nc.bracket_vv", /*antisymmetrize=*/true);
    out.nc = std::make_pair(std::move(g), std::move(vv));
  }
  if (!out.force && !out.fields && !out.nc)
    throw ConfigError("fd", "need at least one of 'force', 'fields', 'nc'");
  return out;
}

VolflowConfig build_volflow(const Json& cfg) {
  const std::map<std::string, double> params = parse_params(cfg);
  const Json& vj = require(cfg, "volflow", "");
  const int n = static_cast<int>(number_at(require(vj, "n", "volflow"), "volflow.n"));
  if (n < 2) throw ConfigError("volflow.n", "need n >= 2");

  std::vector<std::string> aliases;
  for (int i = 1; i <= 2 * n; ++i) aliases.push_back("x" + std::to_string(i));
  SpacePtr space = PhaseSpace::make(aliases, params);

  VolflowConfig out;
  out.spec.n = n;
  out.spec.g = MatrixField(space, n);
  out.spec.b = MatrixField(space, n);
  if (const Json* gj = maybe(vj, "g"))
    out.spec.g = matrix_at(space, *gj, n, "volflow.g", /*antisymmetrize=*/true);
  if (const Json* bj = maybe(vj, "B"))
    out.spec.b = matrix_at(space, *bj, n, "volflow.B", /*antisymmetrize=*/true);
  if (const Json* pj = maybe(vj, "prefactor")) {
    const std::string p = string_at(*pj, "volflow.prefactor");
    if (p == "eom")
      out.spec.prefactor = volflow::Prefactor::kEquationsOfMotion;
    else if (p == "contraction")
      out.spec.prefactor = volflow::Prefactor::kFormContraction;
    else
      throw ConfigError("volflow.prefactor", "expected 'eom' or 'contraction'");
  }
  return out;
}

PhasePoint parse_point(const std::string& text, int dim) {
  PhasePoint p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ConfigError("--point", "cannot parse coordinate '" + item + "'");
    }
  }
  if (static_cast<int>(p.size()) != dim)
    throw ConfigError("--point", "expected " + std::to_string(dim) + " coordinates, got " +
                                     std::to_string(p.size()));
  return p;
}

}  // namespace ncps::config
