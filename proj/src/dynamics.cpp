#include "ncps/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ncps::dynamics {

Scheme scheme_from_name(const std::string& name) {
  if (name == "rk4" || name == "rk4-fixed") return Scheme::Rk4;
  if (name == "heun") return Scheme::Heun;
  if (name == "euler") return Scheme::Euler;
  throw std::invalid_argument("unknown integrator scheme '" + name + "'");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Rk4: return "rk4";
    case Scheme::Heun: return "heun";
    case Scheme::Euler: return "euler";
  }
  return "?";
}

const std::vector<double>* Trajectory::observable(const std::string& name) const {
  for (const auto& [n, series] : observables)
    if (n == name) return &series;
  return nullptr;
}

namespace {

using Vec = std::vector<double>;

Vec axpy(const Vec& x, double a, const Vec& d) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * d[i];
  return y;
}

bool finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Vec step_state(const VectorFieldSpec& x, const Vec& s, double dt, Scheme scheme) {
  switch (scheme) {
    case Scheme::Euler: {
      return axpy(s, dt, x.eval(s));
    }
    case Scheme::Heun: {
      const Vec k1 = x.eval(s);
      const Vec k2 = x.eval(axpy(s, dt, k1));
      Vec out(s.size());
      for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = s[i] + 0.5 * dt * (k1[i] + k2[i]);
      return out;
    }
    case Scheme::Rk4: {
      const Vec k1 = x.eval(s);
      const Vec k2 = x.eval(axpy(s, 0.5 * dt, k1));
      const Vec k3 = x.eval(axpy(s, 0.5 * dt, k2));
      const Vec k4 = x.eval(axpy(s, dt, k3));
      Vec out(s.size());
      for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      return out;
    }
  }
  throw std::logic_error("unreachable scheme");
}

}  // namespace

Trajectory integrate(const VectorFieldSpec& x, PhasePoint xi0, const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
  if (static_cast<int>(xi0.size()) != x.space()->dim())
    throw std::invalid_argument("integrate: initial state dimension mismatch");

  const long long n_steps = std::max<long long>(1, std::llround(cfg.t_end / cfg.dt));

  Trajectory traj;
  for (const auto& [name, field] : cfg.observables)
    traj.observables.emplace_back(name, std::vector<double>{});

  // evaluate all observables before committing anything, so an evaluation
  // failure leaves times/states/series aligned
  std::vector<double> obs_values(cfg.observables.size());
  auto record = [&](double t, const PhasePoint& s) {
    for (std::size_t k = 0; k < cfg.observables.size(); ++k)
      obs_values[k] = cfg.observables[k].second(s);
    for (std::size_t k = 0; k < cfg.observables.size(); ++k)
      traj.observables[k].second.push_back(obs_values[k]);
    traj.times.push_back(t);
    traj.states.push_back(s);
  };

  PhasePoint state = std::move(xi0);
  try {
    record(0.0, state);
    for (long long i = 1; i <= n_steps; ++i) {
      state = step_state(x, state, cfg.dt, cfg.scheme);
      if (!finite(state)) {
        traj.completed = false;
        traj.abort_reason = "non-finite state at t = " +
                            std::to_string(static_cast<double>(i) * cfg.dt);
        return traj;
      }
      record(static_cast<double>(i) * cfg.dt, state);
    }
  } catch (const std::exception& e) {
    traj.completed = false;
    traj.abort_reason = e.what();
  }
  return traj;
}

std::vector<std::pair<std::string, double>> drift_report(
    const Trajectory& traj, const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& name : names) {
    const std::vector<double>* series = traj.observable(name);
    if (!series) throw std::invalid_argument("drift_report: unknown observable '" + name + "'");
    double drift = 0.0;
    if (!series->empty()) {
      const double v0 = series->front();
      for (double v : *series) drift = std::max(drift, std::fabs(v - v0));
    }
    out.emplace_back(name, drift);
  }
  return out;
}

ConvergenceResult convergence_study(const VectorFieldSpec& x, const PhasePoint& xi0,
                                    double base_dt, double t_end, int levels, Scheme scheme) {
  if (levels < 3) throw std::invalid_argument("convergence_study: need at least 3 levels");

  std::vector<PhasePoint> endpoints;
  double scale = 1.0;
  for (int k = 0; k < levels; ++k) {
    IntegratorConfig cfg;
    cfg.scheme = scheme;
    cfg.dt = base_dt / static_cast<double>(1 << k);
    cfg.t_end = t_end;
    Trajectory t = integrate(x, xi0, cfg);
    if (!t.completed) throw std::runtime_error("convergence_study: " + t.abort_reason);
    endpoints.push_back(t.states.back());
    for (double v : t.states.back()) scale = std::max(scale, std::fabs(v));
  }

  std::vector<double> diffs;
  for (int k = 0; k + 1 < levels; ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < endpoints[static_cast<std::size_t>(k)].size(); ++i)
      d = std::max(d, std::fabs(endpoints[static_cast<std::size_t>(k)][i] -
                                endpoints[static_cast<std::size_t>(k) + 1][i]));
    diffs.push_back(d);
  }

  ConvergenceResult r;
  const double noise_floor = 1e-12 * scale;
  bool all_noise = true;
  for (double d : diffs)
    if (d > noise_floor) all_noise = false;
  if (all_noise) {
    r.exact = true;
    return r;
  }

  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
    if (diffs[k] <= noise_floor || diffs[k + 1] <= noise_floor) continue;
    sum += std::log2(diffs[k] / diffs[k + 1]);
    ++count;
  }
  if (count == 0) {
    r.exact = true;
    return r;
  }
  r.order = sum / static_cast<double>(count);
  return r;
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

void write_csv(const Trajectory& traj, const PhaseSpace& space, std::ostream& out) {
  std::string line = "t";
  for (const auto& a : space.aliases) line += "," + a;
  for (const auto& [name, series] : traj.observables) line += "," + name;
  out << line << "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    line.clear();
    append_g17(line, traj.times[i]);
    for (double v : traj.states[i]) {
      line += ',';
      append_g17(line, v);
    }
    for (const auto& [name, series] : traj.observables) {
      line += ',';
      append_g17(line, series[i]);
    }
    out << line << "\n";
  }
}

nlohmann::ordered_json trajectory_json(const Trajectory& traj, const PhaseSpace& space) {
  nlohmann::ordered_json j;
  j["columns"] = [&] {
    std::vector<std::string> cols{"t"};
    for (const auto& a : space.aliases) cols.push_back(a);
    for (const auto& [name, series] : traj.observables) cols.push_back(name);
    return cols;
  }();
  j["completed"] = traj.completed;
  if (!traj.completed) j["abort_reason"] = traj.abort_reason;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    row.push_back(traj.times[i]);
    for (double v : traj.states[i]) row.push_back(v);
    for (const auto& [name, series] : traj.observables) row.push_back(series[i]);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace ncps::dynamics
