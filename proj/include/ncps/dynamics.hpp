#pragma once

// Fixed-step explicit integration with observable recording. Conservation is
// monitored, never enforced; the structures here are generally non-canonical,
// so no symplectic scheme is pretended.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ncps/fields.hpp"

#include "json.hpp"

namespace ncps::dynamics {

enum class Scheme { Rk4, Heun, Euler };

Scheme scheme_from_name(const std::string& name);  // throws std::invalid_argument
std::string scheme_name(Scheme s);

struct IntegratorConfig {
  Scheme scheme = Scheme::Rk4;
  double dt = 1e-3;
  double t_end = 1.0;
  std::vector<std::pair<std::string, ScalarField>> observables;  // declared order kept
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<std::pair<std::string, std::vector<double>>> observables;

  bool completed = true;
  std::string abort_reason;  // set when !completed

  std::size_t size() const { return times.size(); }
  const std::vector<double>* observable(const std::string& name) const;
};

// Observables are evaluated on accepted states only. A field evaluation
// failure or a non-finite state aborts with the partial trajectory.
Trajectory integrate(const VectorFieldSpec& x, PhasePoint xi0, const IntegratorConfig& cfg);

// max |value - initial value| per requested observable.
std::vector<std::pair<std::string, double>> drift_report(const Trajectory& traj,
                                                         const std::vector<std::string>& names);

struct ConvergenceResult {
  bool exact = false;  // endpoint differences below the noise floor
  double order = 0.0;
};

// Richardson order estimate from endpoints at dt, dt/2, dt/4, ...
ConvergenceResult convergence_study(const VectorFieldSpec& x, const PhasePoint& xi0,
                                    double base_dt, double t_end, int levels,
                                    Scheme scheme = Scheme::Rk4);

// Header row: t, coordinate aliases, observable names; declared column order.
void write_csv(const Trajectory& traj, const PhaseSpace& space, std::ostream& out);

nlohmann::ordered_json trajectory_json(const Trajectory& traj, const PhaseSpace& space);

}  // namespace ncps::dynamics
