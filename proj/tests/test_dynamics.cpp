#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "ncps/dynamics.hpp"
#include "ncps/geom.hpp"
#include "ncps/linalg.hpp"
#include "ncps/souriau.hpp"

using namespace ncps;

namespace {

VectorFieldSpec harmonic_oscillator(const SpacePtr& space, double omega2 = 1.0) {
  return VectorFieldSpec(space, [omega2](PointView p) {
    return std::vector<double>{p[1], -omega2 * p[0]};
  });
}

SpacePtr plane() { return PhaseSpace::make({"q", "p"}); }

}  // namespace

TEST_CASE("exotic free particle: linear motion is integrated exactly") {
  auto space = souriau::exotic_space({{"m", 1.0}, {"theta", 0.4}});
  auto model = souriau::make_exotic_plane(0.4, constant_field(space, 0.0),
                                          constant_field(space, 0.0), 1.0);
  auto x = souriau::derive_dynamics(model);
  dynamics::IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 1.0;
  auto traj = dynamics::integrate(x, {0.0, 0.0, 1.0, 2.0}, cfg);
  REQUIRE(traj.completed);
  const auto& last = traj.states.back();
  CHECK(std::fabs(last[0] - 1.0) <= 1e-10);
  CHECK(std::fabs(last[1] - 2.0) <= 1e-10);
  CHECK(std::fabs(last[2] - 1.0) <= 1e-12);
  CHECK(std::fabs(last[3] - 2.0) <= 1e-12);
}

TEST_CASE("zero field gives a constant trajectory; observables sit on states") {
  auto space = plane();
  auto zero = VectorFieldSpec(space, [](PointView) {
    return std::vector<double>{0.0, 0.0};
  });
  dynamics::IntegratorConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.observables.emplace_back("q", coordinate_field(space, 0));
  auto traj = dynamics::integrate(zero, {0.7, -0.3}, cfg);
  REQUIRE(traj.completed);
  REQUIRE(traj.size() == 11);
  for (const auto& s : traj.states) {
    CHECK(s[0] == 0.7);
    CHECK(s[1] == -0.3);
  }
  const auto* q_series = traj.observable("q");
  REQUIRE(q_series != nullptr);
  for (std::size_t i = 0; i < traj.size(); ++i)
    CHECK((*q_series)[i] == traj.states[i][0]);  // evaluated on states, never extrapolated

  auto drifts = dynamics::drift_report(traj, {"q"});
  CHECK(drifts[0].second == 0.0);
  CHECK_THROWS_AS(dynamics::drift_report(traj, {"missing"}), std::invalid_argument);
}

TEST_CASE("energy drift of the canonical harmonic oscillator stays tiny") {
  auto space = plane();
  auto x = harmonic_oscillator(space);
  dynamics::IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 10.0;
  cfg.observables.emplace_back(
      "H", ScalarField(space, [](PointView p) { return 0.5 * (p[0] * p[0] + p[1] * p[1]); }));
  auto traj = dynamics::integrate(x, {1.0, 0.0}, cfg);
  REQUIRE(traj.completed);
  auto drifts = dynamics::drift_report(traj, {"H"});
  CHECK(drifts[0].second <= 1e-8);
}

TEST_CASE("convergence orders") {
  auto space = plane();
  auto x = harmonic_oscillator(space);
  PhasePoint x0{1.0, 0.0};

  auto rk4 = dynamics::convergence_study(x, x0, 0.05, 1.0, 4, dynamics::Scheme::Rk4);
  CHECK_FALSE(rk4.exact);
  CHECK(rk4.order == doctest::Approx(4.0).epsilon(0.075));

  auto euler = dynamics::convergence_study(x, x0, 0.01, 1.0, 4, dynamics::Scheme::Euler);
  CHECK_FALSE(euler.exact);
  CHECK(euler.order == doctest::Approx(1.0).epsilon(0.2));

  auto heun = dynamics::convergence_study(x, x0, 0.02, 1.0, 4, dynamics::Scheme::Heun);
  CHECK_FALSE(heun.exact);
  CHECK(heun.order == doctest::Approx(2.0).epsilon(0.15));

  // a field with constant rates is integrated exactly at every step size
  auto linear = VectorFieldSpec(space, [](PointView) {
    return std::vector<double>{1.0, -2.0};
  });
  auto exact = dynamics::convergence_study(linear, x0, 0.1, 1.0, 3, dynamics::Scheme::Rk4);
  CHECK(exact.exact);

  CHECK_THROWS_AS(dynamics::convergence_study(x, x0, 0.1, 1.0, 2), std::invalid_argument);
}

TEST_CASE("time reversal returns near the initial state") {
  auto space = plane();
  auto x = harmonic_oscillator(space);
  auto minus_x = VectorFieldSpec(space, [](PointView p) {
    return std::vector<double>{-p[1], p[0]};
  });
  dynamics::IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  auto forward = dynamics::integrate(x, {1.0, 0.0}, cfg);
  REQUIRE(forward.completed);
  auto backward = dynamics::integrate(minus_x, forward.states.back(), cfg);
  REQUIRE(backward.completed);

  // self-convergence error of the forward run at dt and dt/2
  dynamics::IntegratorConfig half = cfg;
  half.dt = cfg.dt / 2.0;
  auto refined = dynamics::integrate(x, {1.0, 0.0}, half);
  double self_err = 0.0;
  for (int i = 0; i < 2; ++i)
    self_err = std::max(self_err, std::fabs(forward.states.back()[static_cast<std::size_t>(i)] -
                                            refined.states.back()[static_cast<std::size_t>(i)]));

  const auto& back = backward.states.back();
  CHECK(std::fabs(back[0] - 1.0) <= 10.0 * self_err + 1e-14);
  CHECK(std::fabs(back[1] - 0.0) <= 10.0 * self_err + 1e-14);
}

TEST_CASE("one-step flow Jacobian of a divergence-free field has unit determinant") {
  auto space = plane();
  // nonlinear pendulum: divergence free, nontrivial fifth-order error term
  auto x = VectorFieldSpec(space, [](PointView p) {
    return std::vector<double>{p[1], -std::sin(p[0])};
  });

  auto one_step_det = [&](double dt) {
    const PhasePoint base{0.8, 0.3};
    dynamics::IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = dt;  // exactly one step
    const double h = 1e-5;
    linalg::Mat jac(2, 2);
    for (int c = 0; c < 2; ++c) {
      PhasePoint plus = base, minus = base;
      plus[static_cast<std::size_t>(c)] += h;
      minus[static_cast<std::size_t>(c)] -= h;
      auto tp = dynamics::integrate(x, plus, cfg);
      auto tm = dynamics::integrate(x, minus, cfg);
      for (int r = 0; r < 2; ++r)
        jac(r, c) = (tp.states.back()[static_cast<std::size_t>(r)] -
                     tm.states.back()[static_cast<std::size_t>(r)]) /
                    (2.0 * h);
    }
    return linalg::determinant(jac);
  };

  // order check at step sizes where dt^5 dominates the finite-difference noise
  const double d1 = std::fabs(one_step_det(0.2) - 1.0);
  const double d2 = std::fabs(one_step_det(0.1) - 1.0);
  CHECK(d1 / d2 == doctest::Approx(32.0).epsilon(0.5));
  // and the spot checks: both tiny, consistent with O(dt^5) + measurement noise
  CHECK(std::fabs(one_step_det(1e-2) - 1.0) <= 1e-8);
  CHECK(std::fabs(one_step_det(1e-3) - 1.0) <= 1e-8);
}

TEST_CASE("abort on non-finite states keeps the partial trajectory") {
  auto space = plane();
  // finite-time blow-up
  auto x = VectorFieldSpec(space, [](PointView p) {
    return std::vector<double>{p[0] * p[0], 0.0};
  });
  dynamics::IntegratorConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 10.0;
  auto traj = dynamics::integrate(x, {1.0, 0.0}, cfg);
  CHECK_FALSE(traj.completed);
  CHECK(traj.size() >= 2);
  CHECK(!traj.abort_reason.empty());
}

TEST_CASE("degeneracy on the path aborts with the partial trajectory and context") {
  // exotic plane with B = q1 and theta = 1: the locus q1 = 1 is degenerate
  auto space = souriau::exotic_space({{"m", 1.0}, {"theta", 1.0}});
  auto b = expr_field(space, "q1");
  auto model = souriau::make_exotic_plane(1.0, b, constant_field(space, 0.0), 1.0);
  auto x = souriau::derive_dynamics(model);
  dynamics::IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 5.0;
  auto traj = dynamics::integrate(x, {1.0, 0.0, 1.0, 0.0}, cfg);
  CHECK_FALSE(traj.completed);
  CHECK(traj.size() == 1);  // the initial state is kept
  CHECK(traj.abort_reason.find("degenerate") != std::string::npos);
  CHECK(traj.abort_reason.find("rank 2") != std::string::npos);
}

TEST_CASE("CSV export: declared column order and full precision") {
  auto space = plane();
  auto zero = VectorFieldSpec(space, [](PointView) {
    return std::vector<double>{0.0, 0.0};
  });
  dynamics::IntegratorConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 1.0;
  cfg.observables.emplace_back("E", constant_field(space, 0.25));
  cfg.observables.emplace_back("A", constant_field(space, -1.0));  // order preserved, not sorted
  auto traj = dynamics::integrate(zero, {0.125, -0.5}, cfg);

  std::ostringstream out;
  dynamics::write_csv(traj, *space, out);
  CHECK(out.str() ==
        "t,q,p,E,A\n"
        "0,0.125,-0.5,0.25,-1\n"
        "0.5,0.125,-0.5,0.25,-1\n"
        "1,0.125,-0.5,0.25,-1\n");

  auto j = dynamics::trajectory_json(traj, *space);
  CHECK(j["columns"] == nlohmann::ordered_json({"t", "q", "p", "E", "A"}));
  CHECK(j["rows"].size() == 3);
}
