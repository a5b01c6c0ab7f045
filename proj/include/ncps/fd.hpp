#pragma once

// Consistency checker for force laws on the 6-dim (x, xd) velocity phase
// space: extracts the magnetic/electric fields a force law implies under the
// bracket postulates m{x_i, xd_j} = delta_ij, and reports the Maxwell-type
// and noncommutative compatibility residuals. Failures are reported, never
// raised; this module checks, it does not solve.

#include <array>

#include "ncps/fields.hpp"
#include "ncps/report.hpp"

namespace ncps::fd {

// Space aliases are fixed: x1 x2 x3 xd1 xd2 xd3.
SpacePtr velocity_space(std::map<std::string, double> params = {});

struct ForceLaw {
  std::array<ScalarField, 3> f;  // components of m xdd_j = F_j(x, xd)
  double m = 1.0;
};

struct EMFields {
  std::array<ScalarField, 3> b;  // of x in the consistent case
  std::array<ScalarField, 3> e;  // xd-independent in the consistent case
};

// B_k = -1/2 eps_ijk dF_j/dxd_i, then E_j = F_j - eps_jkl xd_k B_l.
EMFields extract_fields(const ForceLaw& fl, const DiffConfig& cfg = {});

// Residual entries, each max/mean over points:
//   B_velocity_dependence : |dB_k/dxd_r|
//   div_B                 : |sum dB_k/dx_k|
//   rot_E                 : |(curl_x E)_k| (autonomous Faraday residual)
//   E_velocity_dependence : |dE_j/dxd_i| (force at most linear in xd)
// Derivatives of extracted fields nest finite differences; pass an outer
// step comfortably above the extraction noise (1e-3 works well).
ResidualReport dyson_consistency(const ForceLaw& fl, const EMFields& fields,
                                 const std::vector<PhasePoint>& points,
                                 const DiffConfig& cfg = {1e-3});

// Compatibility of a position-position bracket block g_ij(x, xd) with given
// velocity-velocity brackets. Entries:
//   bracket_compat : R1_ijk = -(1/m) dg_ij/dx_k + {xd_k, xd_l} dg_ij/dxd_l
//   jacobi_xxx     : R2_ijk = [g,g]-cyclic + (1/m) * d_xd-cyclic (combined)
//   jacobi_xxx_sn  : the [g,g] cyclic part alone
//   jacobi_xxx_dxd : the (1/m) d_xd cyclic part alone
// The separate parts are reported because their joint vanishing is a
// sufficient, not necessary, condition for the combined residual.
ResidualReport nc_consistency(const MatrixField& g, const MatrixField& bracket_vv, double m,
                              const std::vector<PhasePoint>& points,
                              const DiffConfig& cfg = {});

// Noncommutative replacements of Gauss and Faraday laws for fields that may
// depend on velocities. Entries:
//   gauss_mod   : |Div B + (1/m) B . (curl_xd B)|
//   faraday_mod : |(rot_x E)_k + (1/m)((E.grad_xd)B_k + B . dE/dxd_k - (div_xd E) B_k)|
ResidualReport modified_maxwell_residuals(const std::array<ScalarField, 3>& b,
                                          const std::array<ScalarField, 3>& e, double m,
                                          const std::vector<PhasePoint>& points,
                                          const DiffConfig& cfg = {});

}  // namespace ncps::fd
