// ncps: verification and simulation front end for noncommutative phase-space
// models. One command per process; all output is written deterministically so
// repeated runs with the same config and seed are byte-identical.
//
// Exit codes: 0 success; 1 residuals over tolerance, or a rank problem (a
// degeneracy where nondegeneracy is required, or a nondegenerate form handed
// to `reduce`); 2 config or usage errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"

#include "ncps/config.hpp"
#include "ncps/dynamics.hpp"
#include "ncps/fd.hpp"
#include "ncps/geom.hpp"
#include "ncps/report.hpp"
#include "ncps/souriau.hpp"
#include "ncps/volflow.hpp"

namespace {

using ncps::config::ConfigError;
using ncps::config::Json;
using ncps::config::LoadedModel;

struct CommonFlags {
  std::string config_path;
  double tol = 1e-5;
  double pivot_tol = ncps::geom::kDefaultPivotTol;
  int probes = 0;       // 0: take from config
  long long seed = -1;  // -1: take from config
  std::string out_path;
  std::string point_text;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_point(const ncps::PhasePoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += format_double(p[i]);
  }
  return s + ")";
}

void print_report_table(const ncps::ResidualReport& report) {
  std::printf("%-24s %14s %14s  %s\n", "residual", "max", "mean", "argmax");
  for (const auto& e : report.entries())
    std::printf("%-24s %14.6e %14.6e  %s\n", e.name.c_str(), e.max_abs, e.mean_abs,
                format_point(e.argmax_point).c_str());
}

void print_matrix(const ncps::linalg::Mat& m) {
  for (int r = 0; r < m.rows(); ++r) {
    std::string line = "  [";
    for (int c = 0; c < m.cols(); ++c) {
      if (c) line += ", ";
      line += format_double(m(r, c));
    }
    std::printf("%s]\n", line.c_str());
  }
}

Json matrix_json(const ncps::linalg::Mat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_json(const Json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
}

Json report_header(const std::string& command, double tol, const ncps::SampleBox& box) {
  Json j;
  j["command"] = command;
  j["tol"] = tol;
  j["probes"] = box.count;
  j["seed"] = box.seed;
  return j;
}

int finish_report(const std::string& command, const ncps::ResidualReport& report,
                  const CommonFlags& flags, const ncps::SampleBox& box) {
  print_report_table(report);
  Json j = report_header(command, flags.tol, box);
  j["residuals"] = report.to_json();
  emit_json(j, flags.out_path);
  if (report.within(flags.tol)) {
    std::printf("OK: all residuals within tol %s\n", format_double(flags.tol).c_str());
    return 0;
  }
  const ncps::ResidualEntry* worst = report.worst();
  std::printf("FAIL %s: max |%s| = %s at %s exceeds tol %s\n", command.c_str(),
              worst->name.c_str(), format_double(worst->max_abs).c_str(),
              format_point(worst->argmax_point).c_str(), format_double(flags.tol).c_str());
  return 1;
}

ncps::SampleBox resolve_box(const Json& cfg, const CommonFlags& flags) {
  return ncps::config::probe_box(cfg, flags.seed >= 0,
                                 static_cast<unsigned>(flags.seed >= 0 ? flags.seed : 0),
                                 flags.probes);
}

LoadedModel require_souriau(const Json& cfg, const char* command) {
  LoadedModel loaded = ncps::config::build_model(cfg);
  if (loaded.kind != LoadedModel::Kind::Souriau)
    throw ConfigError("model.preset",
                      std::string("'") + command + "' needs a model with a structure matrix");
  return loaded;
}

// --- subcommands -----------------------------------------------------------

int run_check(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const LoadedModel loaded = require_souriau(cfg, "check");

  const ncps::SampleBox box = resolve_box(cfg, flags);
  const auto points = ncps::sample_points(loaded.space->dim(), box);

  const auto& primary = loaded.model.is_bivector_first()
                            ? static_cast<const ncps::MatrixField&>(loaded.model.lambda())
                            : static_cast<const ncps::MatrixField&>(loaded.model.omega());

  ncps::ResidualReport report;
  const auto anti = ncps::geom::antisymmetry_residual(primary, points);
  const auto closed = ncps::geom::closedness_residual(loaded.model.omega(), points);
  const auto jac = ncps::geom::jacobiator_residual(loaded.model.lambda(), points);
  for (const auto* part : {&anti, &closed, &jac})
    for (const auto& e : part->entries()) report.add_entry(e);
  return finish_report("check", report, flags, box);
}

int run_brackets(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const LoadedModel loaded = require_souriau(cfg, "brackets");

  ncps::PhasePoint point(static_cast<std::size_t>(loaded.space->dim()), 0.0);
  if (!flags.point_text.empty())
    point = ncps::config::parse_point(flags.point_text, loaded.space->dim());

  const ncps::linalg::Mat lambda = loaded.model.lambda_at(point, flags.pivot_tol);

  std::printf("fundamental brackets {xi_a, xi_b} at %s\n", format_point(point).c_str());
  std::string header = "   ";
  for (const auto& a : loaded.space->aliases) header += " " + a;
  std::printf("%s\n", header.c_str());
  print_matrix(lambda);

  Json j;
  j["command"] = "brackets";
  j["point"] = point;
  j["aliases"] = loaded.space->aliases;
  j["brackets"] = matrix_json(lambda);
  emit_json(j, flags.out_path);
  return 0;
}

int run_kernel(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const LoadedModel loaded = require_souriau(cfg, "kernel");

  ncps::PhasePoint point(static_cast<std::size_t>(loaded.space->dim()), 0.0);
  if (!flags.point_text.empty())
    point = ncps::config::parse_point(flags.point_text, loaded.space->dim());

  const ncps::geom::Inversion inv =
      ncps::geom::invert_form(loaded.model.omega(), point, flags.pivot_tol);
  const auto basis = ncps::geom::kernel_basis(loaded.model.omega(), point, flags.pivot_tol);

  std::printf("rank %d of %d at %s; kernel dimension %zu\n", inv.rank, loaded.space->dim(),
              format_point(point).c_str(), basis.size());
  for (const auto& v : basis) std::printf("  %s\n", format_point(v).c_str());

  Json j;
  j["command"] = "kernel";
  j["point"] = point;
  j["rank"] = inv.rank;
  j["kernel"] = basis;
  emit_json(j, flags.out_path);
  return 0;
}

int run_reduce(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const LoadedModel loaded = require_souriau(cfg, "reduce");
  if (loaded.preset != "exotic_plane")
    throw ConfigError("model.preset", "'reduce' applies to the exotic_plane preset");

  const double theta = loaded.space->params.at("theta");

  // B must be constant for the reduction chart; sample it. Entry (q1, q2)
  // of the stored form matrix is +B.
  const auto probes = ncps::sample_points(4, ncps::SampleBox{});
  const auto& entry = loaded.model.omega().at(0, 1);
  const double b0 = entry(ncps::PhasePoint(4, 0.0));
  double bmin = b0, bmax = b0;
  for (const auto& p : probes) {
    const double v = entry(p);
    bmin = std::min(bmin, v);
    bmax = std::max(bmax, v);
  }
  if (bmax - bmin > 1e-12) {
    std::printf("FAIL reduce: B is not constant over the probe box (spread %s)\n",
                format_double(bmax - bmin).c_str());
    return 1;
  }
  if (std::fabs(theta * b0 - 1.0) > 1e-12) {
    std::printf("FAIL reduce: theta*B = %s is not 1; the form is nondegenerate\n",
                format_double(theta * b0).c_str());
    return 1;
  }

  const ncps::souriau::ExoticReduction red =
      ncps::souriau::reduce_degenerate_exotic(theta, b0);

  std::printf("chart: xi1 = q1 + theta*p2, xi2 = q2 - theta*p1 (theta = %s, B = %s)\n",
              format_double(theta).c_str(), format_double(b0).c_str());
  std::printf("reduced 2-form on (xi1, xi2), components of -B dxi1^dxi2:\n");
  print_matrix(red.reduced);
  std::printf("kernel block residual %s; kernel directions in chart:\n",
              format_double(red.kernel_block_residual).c_str());
  for (const auto& v : red.kernel_in_chart) std::printf("  %s\n", format_point(v).c_str());

  Json j;
  j["command"] = "reduce";
  j["theta"] = theta;
  j["B"] = b0;
  j["chart"] = {{"xi1", "q1 + theta*p2"}, {"xi2", "q2 - theta*p1"}};
  j["reduced"] = matrix_json(red.reduced);
  j["transformed"] = matrix_json(red.transformed);
  j["kernel_block_residual"] = red.kernel_block_residual;
  j["kernel_in_chart"] = {red.kernel_in_chart[0], red.kernel_in_chart[1]};
  emit_json(j, flags.out_path);
  return 0;
}

int run_simulate(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const LoadedModel loaded = ncps::config::build_model(cfg);
  const auto spec = ncps::config::integrate_spec(cfg, loaded);
  if (!spec) throw ConfigError("integrate", "missing required section");

  ncps::VectorFieldSpec field =
      loaded.kind == LoadedModel::Kind::Souriau
          ? ncps::souriau::derive_dynamics(loaded.model, flags.pivot_tol)
          : ncps::souriau::leibniz_flow(loaded.leibniz_g, loaded.leibniz_h);

  const ncps::dynamics::Trajectory traj =
      ncps::dynamics::integrate(field, spec->initial, spec->cfg);

  const std::string base = flags.out_path.empty() ? "trajectory" : flags.out_path;
  {
    std::ofstream csv(base + ".csv", std::ios::binary);
    ncps::dynamics::write_csv(traj, *loaded.space, csv);
  }
  {
    std::ofstream js(base + ".json", std::ios::binary);
    js << ncps::dynamics::trajectory_json(traj, *loaded.space).dump(2) << "\n";
  }

  std::vector<std::string> names;
  for (const auto& [name, f] : spec->cfg.observables) names.push_back(name);
  std::printf("%-16s %14s\n", "observable", "max drift");
  for (const auto& [name, drift] : ncps::dynamics::drift_report(traj, names))
    std::printf("%-16s %14.6e\n", name.c_str(), drift);
  std::printf("wrote %s.csv and %s.json (%zu states)\n", base.c_str(), base.c_str(),
              traj.size());

  if (!traj.completed) {
    std::printf("FAIL simulate: aborted: %s\n", traj.abort_reason.c_str());
    return 1;
  }
  return 0;
}

int run_fd_check(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const ncps::config::FdConfig fd_cfg = ncps::config::build_fd(cfg);

  const ncps::SampleBox box = resolve_box(cfg, flags);
  const auto points = ncps::sample_points(6, box);

  ncps::ResidualReport report;
  if (fd_cfg.force) {
    const ncps::fd::EMFields fields = ncps::fd::extract_fields(*fd_cfg.force);
    const auto part = ncps::fd::dyson_consistency(*fd_cfg.force, fields, points);
    for (const auto& e : part.entries()) report.add_entry(e);
  }
  if (fd_cfg.fields) {
    const auto part = ncps::fd::modified_maxwell_residuals(
        fd_cfg.fields->first, fd_cfg.fields->second, fd_cfg.m, points);
    for (const auto& e : part.entries()) report.add_entry(e);
  }
  if (fd_cfg.nc) {
    const auto part =
        ncps::fd::nc_consistency(fd_cfg.nc->first, fd_cfg.nc->second, fd_cfg.m, points);
    for (const auto& e : part.entries()) report.add_entry(e);
  }
  return finish_report("fd-check", report, flags, box);
}

int run_volume_flow(const CommonFlags& flags) {
  const Json cfg = ncps::config::load_config_file(flags.config_path);
  const ncps::config::VolflowConfig vf = ncps::config::build_volflow(cfg);

  const ncps::SampleBox box = resolve_box(cfg, flags);
  const auto points = ncps::sample_points(2 * vf.spec.n, box);

  const ncps::VectorFieldSpec x = ncps::volflow::build_volume_flow(vf.spec);
  ncps::ResidualReport report = ncps::volflow::verify_volume_preservation(x, points);

  if (cfg.contains("integrate")) {
    LoadedModel carrier;
    carrier.kind = LoadedModel::Kind::Leibniz;
    carrier.space = vf.spec.g.space();
    carrier.leibniz_h = ncps::constant_field(carrier.space, 0.0);
    if (auto spec = ncps::config::integrate_spec(cfg, carrier)) {
      const auto traj = ncps::dynamics::integrate(x, spec->initial, spec->cfg);
      const std::string base = flags.out_path.empty() ? "volume_flow" : flags.out_path;
      std::ofstream csv(base + ".csv", std::ios::binary);
      ncps::dynamics::write_csv(traj, *carrier.space, csv);
      std::printf("wrote %s.csv (%zu states)\n", base.c_str(), traj.size());
    }
  }
  return finish_report("volume-flow", report, flags, box);
}

// --- wiring ----------------------------------------------------------------

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_point) {
  cmd->add_option("config", flags.config_path, "model config file (JSON)")->required();
  cmd->add_option("--tol", flags.tol, "acceptance tolerance for residuals");
  cmd->add_option("--pivot-tol", flags.pivot_tol, "relative pivot threshold for rank decisions");
  cmd->add_option("--probes", flags.probes, "number of probe points (overrides config)");
  cmd->add_option("--seed", flags.seed, "probe sequence seed (overrides config)");
  cmd->add_option("--out", flags.out_path, "write the JSON report (or trajectory base name)");
  if (with_point)
    cmd->add_option("--point", flags.point_text, "evaluation point, comma separated");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noncommutative phase-space toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  int rc = 0;

  struct Sub {
    const char* name;
    const char* help;
    bool with_point;
    int (*fn)(const CommonFlags&);
  };
  const Sub subs[] = {
      {"check", "closedness + Jacobi + antisymmetry residual report", false, run_check},
      {"brackets", "fundamental bracket table at a point", true, run_brackets},
      {"simulate", "integrate the model dynamics and write the trajectory", false,
       run_simulate},
      {"kernel", "rank and kernel basis of the 2-form at a point", true, run_kernel},
      {"reduce", "degenerate exotic reduction (constant B, theta*B = 1)", false, run_reduce},
      {"fd-check", "force-law field extraction and consistency residuals", false,
       run_fd_check},
      {"volume-flow", "build the volume-preserving flow and verify divergence", false,
       run_volume_flow},
  };
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags, s.with_point);
    cmd->callback([&flags, &rc, fn = s.fn]() { rc = fn(flags); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ncps::expr::ParseError& e) {
    std::fprintf(stderr, "expression error: %s\n", e.what());
    return 2;
  } catch (const ncps::expr::BindError& e) {
    std::fprintf(stderr, "expression error: %s\n", e.what());
    return 2;
  } catch (const ncps::geom::DegeneracyError& e) {
    std::fprintf(stderr, "degeneracy: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc;
}
