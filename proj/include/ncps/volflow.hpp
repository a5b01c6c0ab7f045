#pragma once

// Volume-preserving vector fields built from the block data of a Souriau
// form in Darboux coordinates (x_1..x_n positions, x_{n+1}..x_{2n} momenta).
// The built field is divergence free identically: its position components
// only contract position derivatives of the antisymmetric g block, and its
// momentum components only momentum derivatives of the B block, so the
// divergence is a symmetric contraction of an antisymmetric object.

#include "ncps/fields.hpp"
#include "ncps/report.hpp"

namespace ncps::volflow {

// Two normalizations are in circulation for the overall constant; they
// disagree for general n, while volume preservation holds for any constant.
// kEquationsOfMotion is (-1)^n / (n-1); kFormContraction is
// (-1)^{n(n-1)/2} / (n(n-1)).
enum class Prefactor { kEquationsOfMotion, kFormContraction };

double prefactor_value(Prefactor choice, int n);

struct VolumeFlowSpec {
  int n = 2;      // half-dimension, n >= 2
  MatrixField g;  // n x n antisymmetric position block; may depend on all coords
  MatrixField b;  // n x n antisymmetric momentum block; may depend on all coords
  Prefactor prefactor = Prefactor::kEquationsOfMotion;
};

// X_l = c sum_k dg_kl/dx_k, X_{n+l} = -c sum_k dB_kl/dx_{n+k}.
// Throws std::invalid_argument for n < 2 (the construction needs omega0^{n-2}).
VectorFieldSpec build_volume_flow(const VolumeFlowSpec& spec, const DiffConfig& cfg = {});

// max |div X| over points.
ResidualReport verify_volume_preservation(const VectorFieldSpec& x,
                                          const std::vector<PhasePoint>& points,
                                          const DiffConfig& cfg = {});

}  // namespace ncps::volflow
