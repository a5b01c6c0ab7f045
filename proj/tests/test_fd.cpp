#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "ncps/fd.hpp"
#include "ncps/report.hpp"

using namespace ncps;

namespace {

double eps_ijk(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
      (i == 2 && j == 0 && k == 1))
    return 1.0;
  return -1.0;
}

// F = scale * (e0 + xd x b0) as closures on the velocity space
fd::ForceLaw lorentz_force(const SpacePtr& space, double m, double scale,
                           std::array<double, 3> e0, std::array<double, 3> b0) {
  fd::ForceLaw fl;
  fl.m = m;
  for (int j = 0; j < 3; ++j) {
    fl.f[static_cast<std::size_t>(j)] = ScalarField(space, [j, scale, e0, b0](PointView p) {
      double s = e0[static_cast<std::size_t>(j)];
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += eps_ijk(j, k, l) * p[static_cast<std::size_t>(3 + k)] *
               b0[static_cast<std::size_t>(l)];
      return scale * s;
    });
  }
  return fl;
}

}  // namespace

TEST_CASE("extract_fields: magnetic force recovers its field") {
  auto space = fd::velocity_space();
  const std::array<double, 3> b0{0.3, -0.7, 0.5};
  auto fl = lorentz_force(space, 1.0, 1.0, {0, 0, 0}, b0);
  auto fields = fd::extract_fields(fl);
  auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 16, 0});
  for (const auto& p : pts) {
    for (int k = 0; k < 3; ++k) {
      CHECK(fields.b[static_cast<std::size_t>(k)](p) ==
            doctest::Approx(b0[static_cast<std::size_t>(k)]).epsilon(1e-10));
      CHECK(std::fabs(fields.e[static_cast<std::size_t>(k)](p)) <= 1e-10);
    }
  }
}

TEST_CASE("extract_fields: potential force has no magnetic part") {
  auto space = fd::velocity_space();
  fd::ForceLaw fl;
  fl.m = 1.0;
  // F = -grad phi for phi = x1^2 + x2*x3
  fl.f[0] = expr_field(space, "-2*x1");
  fl.f[1] = expr_field(space, "-x3");
  fl.f[2] = expr_field(space, "-x2");
  auto fields = fd::extract_fields(fl);
  PhasePoint p{0.4, -0.2, 0.7, 0.1, 0.9, -0.3};
  for (int k = 0; k < 3; ++k) {
    CHECK(std::fabs(fields.b[static_cast<std::size_t>(k)](p)) <= 1e-10);
    CHECK(fields.e[static_cast<std::size_t>(k)](p) ==
          doctest::Approx(fl.f[static_cast<std::size_t>(k)](p)).epsilon(1e-10));
  }
}

TEST_CASE("extract_fields scales with the charge factor") {
  auto space = fd::velocity_space();
  const double e = 2.5;
  const std::array<double, 3> e0{0.4, -0.1, 0.8}, b0{-0.6, 0.2, 0.9};
  auto fl = lorentz_force(space, 1.0, e, e0, b0);
  auto fields = fd::extract_fields(fl);
  PhasePoint p{0.3, 0.1, -0.5, 0.7, -0.9, 0.2};
  for (int k = 0; k < 3; ++k) {
    CHECK(fields.b[static_cast<std::size_t>(k)](p) ==
          doctest::Approx(e * b0[static_cast<std::size_t>(k)]).epsilon(1e-9));
    CHECK(fields.e[static_cast<std::size_t>(k)](p) ==
          doctest::Approx(e * e0[static_cast<std::size_t>(k)]).epsilon(1e-9));
  }
}

TEST_CASE("dyson_consistency: constant-field force passes all four checks") {
  auto space = fd::velocity_space();
  auto fl = lorentz_force(space, 1.0, 1.0, {0.2, 0.0, -0.4}, {0.1, 0.5, -0.3});
  auto fields = fd::extract_fields(fl);
  auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 16, 1});
  auto report = fd::dyson_consistency(fl, fields, pts);
  CHECK(report.find("B_velocity_dependence")->max_abs <= 1e-8);
  CHECK(report.find("div_B")->max_abs <= 1e-8);
  CHECK(report.find("rot_E")->max_abs <= 1e-8);
  CHECK(report.find("E_velocity_dependence")->max_abs <= 1e-8);
}

TEST_CASE("dyson_consistency flags an injected monopole field") {
  auto space = fd::velocity_space();
  auto fl = lorentz_force(space, 1.0, 1.0, {0, 0, 0}, {0, 0, 0});
  fd::EMFields fields;
  fields.b = {expr_field(space, "x1"), expr_field(space, "x2"), expr_field(space, "x3")};
  fields.e = {constant_field(space, 0.0), constant_field(space, 0.0),
              constant_field(space, 0.0)};
  auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 8, 0});
  auto report = fd::dyson_consistency(fl, fields, pts);
  CHECK(report.find("div_B")->max_abs == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("dyson_consistency flags quadratic velocity dependence") {
  auto space = fd::velocity_space();
  fd::ForceLaw fl;
  fl.m = 1.0;
  fl.f[0] = expr_field(space, "xd1^2");
  fl.f[1] = constant_field(space, 0.0);
  fl.f[2] = constant_field(space, 0.0);
  auto fields = fd::extract_fields(fl);
  const PhasePoint p{0.0, 0.0, 0.0, 0.5, 0.2, -0.1};
  auto report = fd::dyson_consistency(fl, fields, {p});
  // dE_1/dxd_1 = 2 xd1 = 1 at the probe
  CHECK(report.find("E_velocity_dependence")->max_abs == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("reassembling E + xd x B reproduces a linear force law") {
  auto space = fd::velocity_space();
  auto fl = lorentz_force(space, 1.0, 1.3, {0.3, -0.2, 0.5}, {0.7, 0.1, -0.4});
  auto fields = fd::extract_fields(fl);
  auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 16, 2});
  for (const auto& p : pts) {
    PhasePoint frozen(p.begin(), p.end());
    frozen[3] = frozen[4] = frozen[5] = 0.0;  // E is xd-independent here
    for (int j = 0; j < 3; ++j) {
      double rebuilt = fields.e[static_cast<std::size_t>(j)](frozen);
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          rebuilt += eps_ijk(j, k, l) * p[static_cast<std::size_t>(3 + k)] *
                     fields.b[static_cast<std::size_t>(l)](p);
      CHECK(std::fabs(rebuilt - fl.f[static_cast<std::size_t>(j)](p)) <= 1e-8);
    }
  }
}

TEST_CASE("nc_consistency") {
  auto space = fd::velocity_space();
  auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 12, 0});
  MatrixField zero_vv(space, 3);

  SUBCASE("constant g satisfies every relation") {
    MatrixField g(space, 3);
    g.set(0, 1, constant_field(space, 0.4));
    g.set(1, 0, constant_field(space, -0.4));
    auto report = fd::nc_consistency(g, zero_vv, 1.0, pts);
    CHECK(report.find("bracket_compat")->max_abs <= 1e-12);
    CHECK(report.find("jacobi_xxx")->max_abs <= 1e-12);
  }

  SUBCASE("position-dependent g with commuting velocities is flagged") {
    MatrixField g(space, 3);
    g.set(0, 1, expr_field(space, "x1"));
    g.set(1, 0, expr_field(space, "-x1"));
    auto report = fd::nc_consistency(g, zero_vv, 2.0, pts);
    // R1_121 = -(1/m) dg_12/dx_1 = -0.5 survives
    CHECK(report.find("bracket_compat")->max_abs == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("velocity-only g with vanishing cyclic sums satisfies the combined constraint") {
    // each entry depends only on velocities outside its own cyclic slots, so
    // every d_xd cyclic sum is zero and there is no x dependence at all
    MatrixField g(space, 3);
    g.set(0, 1, expr_field(space, "xd1-2*xd2"));
    g.set(1, 0, expr_field(space, "2*xd2-xd1"));
    g.set(1, 2, expr_field(space, "xd3+xd2"));
    g.set(2, 1, expr_field(space, "-xd3-xd2"));
    g.set(0, 2, expr_field(space, "0.5*xd3"));
    g.set(2, 0, expr_field(space, "-0.5*xd3"));
    auto report = fd::nc_consistency(g, zero_vv, 1.0, pts);
    CHECK(report.find("jacobi_xxx_sn")->max_abs <= 1e-9);  // no x dependence at all
    CHECK(report.find("jacobi_xxx_dxd")->max_abs <= 1e-6);
    CHECK(report.find("jacobi_xxx")->max_abs <= 1e-6);
  }
}

TEST_CASE("modified_maxwell_residuals") {
  auto space = fd::velocity_space();
  const double m = 2.0;

  SUBCASE("velocity-independent Maxwell case vanishes") {
    std::array<ScalarField, 3> b = {expr_field(space, "x2"), expr_field(space, "x3"),
                                    expr_field(space, "x1")};  // div B = 0
    // E = -grad(x1^2 + x2^2 + 0.5*x3^2)
    std::array<ScalarField, 3> e = {expr_field(space, "-2*x1"), expr_field(space, "-2*x2"),
                                    expr_field(space, "-x3")};
    auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 16, 3});
    auto report = fd::modified_maxwell_residuals(b, e, m, pts);
    CHECK(report.find("gauss_mod")->max_abs <= 1e-8);
    CHECK(report.find("faraday_mod")->max_abs <= 1e-8);
  }

  SUBCASE("velocity-dependent B: hand-evaluated Gauss residuals") {
    const double c = 0.7;
    // with B3 = 0 the residual is identically zero
    std::array<ScalarField, 3> b0 = {expr_field(space, "0.7*xd2"), expr_field(space, "-0.7*xd1"),
                                     constant_field(space, 0.0)};
    std::array<ScalarField, 3> e0 = {constant_field(space, 0.0), constant_field(space, 0.0),
                                     constant_field(space, 0.0)};
    const PhasePoint p{0.2, -0.4, 0.6, 0.3, 0.8, -0.5};
    CHECK(fd::modified_maxwell_residuals(b0, e0, m, {p}).find("gauss_mod")->max_abs <= 1e-9);

    // with constant B3 = k the hand value is 2ck/m
    const double k = 0.9;
    std::array<ScalarField, 3> b1 = {expr_field(space, "0.7*xd2"), expr_field(space, "-0.7*xd1"),
                                     constant_field(space, k)};
    auto report = fd::modified_maxwell_residuals(b1, e0, m, {p});
    CHECK(report.find("gauss_mod")->max_abs ==
          doctest::Approx(2.0 * c * k / m).epsilon(1e-8));
  }

  SUBCASE("velocity-dependent E against constant B: hand-evaluated Faraday residual") {
    const double ec = 0.6;
    const std::array<double, 3> bconst{0.5, -0.3, 0.8};
    std::array<ScalarField, 3> b = {constant_field(space, bconst[0]),
                                    constant_field(space, bconst[1]),
                                    constant_field(space, bconst[2])};
    std::array<ScalarField, 3> e = {expr_field(space, "0.6*xd1"), constant_field(space, 0.0),
                                    constant_field(space, 0.0)};
    const PhasePoint p{0.1, 0.2, 0.3, -0.4, 0.5, 0.6};
    auto report = fd::modified_maxwell_residuals(b, e, m, {p});
    // residual_k = (1/m)(B_1 e delta_k1 - e B_k): zero at k=1, else e|B_k|/m
    const double expected = ec * std::max(std::fabs(bconst[1]), std::fabs(bconst[2])) / m;
    CHECK(report.find("faraday_mod")->max_abs == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("epsilon tensor contraction identity, realized numerically") {
  for (int k = 0; k < 3; ++k)
    for (int mm = 0; mm < 3; ++mm) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += eps_ijk(i, j, k) * eps_ijk(i, j, mm);
      CHECK(s == doctest::Approx(k == mm ? 2.0 : 0.0));
    }
}

TEST_CASE("reports are order-independent over probe points") {
  auto space = fd::velocity_space();
  auto fl = lorentz_force(space, 1.0, 1.0, {0.2, 0.1, 0.0}, {0.4, -0.2, 0.6});
  auto fields = fd::extract_fields(fl);
  auto pts = sample_points(6, SampleBox{{-1.0}, {1.0}, 12, 4});
  auto forward = fd::dyson_consistency(fl, fields, pts);
  std::vector<PhasePoint> reversed(pts.rbegin(), pts.rend());
  auto backward = fd::dyson_consistency(fl, fields, reversed);
  for (const auto& e : forward.entries()) {
    const auto* other = backward.find(e.name);
    REQUIRE(other != nullptr);
    CHECK(e.max_abs == doctest::Approx(other->max_abs).epsilon(1e-14));
    CHECK(e.mean_abs == doctest::Approx(other->mean_abs).epsilon(1e-12));
  }
}
