#pragma once

// Model-file loading for the CLI. One chart, one config; every expression is
// compiled against the declared aliases plus the params map.

#include <optional>
#include <string>

#include "ncps/dynamics.hpp"
#include "ncps/fd.hpp"
#include "ncps/fields.hpp"
#include "ncps/report.hpp"
#include "ncps/souriau.hpp"
#include "ncps/volflow.hpp"

#include "json.hpp"

namespace ncps::config {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Json load_config_file(const std::string& filename);

struct LoadedModel {
  enum class Kind { Souriau, Leibniz };
  Kind kind = Kind::Souriau;

  souriau::SouriauModel model;  // Kind::Souriau
  std::optional<souriau::ConstraintSet> constraints;

  MatrixField leibniz_g;  // Kind::Leibniz
  ScalarField leibniz_h;

  SpacePtr space;
  std::string preset;
};

LoadedModel build_model(const Json& cfg);

// probe box with defaults: [-1,1]^dim, 64 points, seed 0
SampleBox probe_box(const Json& cfg, bool seed_override_valid = false,
                    unsigned seed_override = 0, int probes_override = 0);

struct IntegrateSpec {
  dynamics::IntegratorConfig cfg;
  PhasePoint initial;
};

std::optional<IntegrateSpec> integrate_spec(const Json& cfg, const LoadedModel& model);

struct FdConfig {
  SpacePtr space;
  double m = 1.0;
  std::optional<fd::ForceLaw> force;
  std::optional<std::pair<std::array<ScalarField, 3>, std::array<ScalarField, 3>>> fields;
  std::optional<std::pair<MatrixField, MatrixField>> nc;  // g, bracket_vv
};

FdConfig build_fd(const Json& cfg);

struct VolflowConfig {
  volflow::VolumeFlowSpec spec;
};

VolflowConfig build_volflow(const Json& cfg);

PhasePoint parse_point(const std::string& text, int dim);  // comma separated

}  // namespace ncps::config
