#pragma once

// Souriau-style models: a phase space, a structure matrix (form-first or
// bivector-first), a Hamiltonian, and the derived dynamics.
//
// Conventions, fixed across presets:
//  - coordinate order is (positions..., momenta/velocities...);
//  - form matrices are stored per the orientation documented in fields.hpp,
//    so the matrix inverse is the bracket table {xi_a, xi_b};
//  - the dual-magnetic model is bivector-first with
//    {q_k,q_l} = f_kl, {q_k,p_l} = delta_kl, {p_k,p_l} = -g_kl,
//    which makes its rates exactly
//      dq_k/dt =  dH/dp_k + f_ki dH/dq_i,
//      dp_k/dt = -dH/dq_k + g_ik dH/dp_i.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncps/dynamics.hpp"
#include "ncps/fields.hpp"
#include "ncps/geom.hpp"
#include "ncps/report.hpp"

namespace ncps::souriau {

struct ConstraintSet {
  std::vector<std::pair<std::string, ScalarField>> constraints;
};

// Remembered inputs of make_dual_magnetic with a Newtonian Hamiltonian;
// needed by modified_newton_residual.
struct DualMagneticBlocks {
  MatrixField g;  // momentum noncommutativity block
  MatrixField f;  // position noncommutativity block
  ScalarField potential;
  double mass = 1.0;
};

// Remembered inputs of make_generalized_lorentz; needed by
// lorentz_constraint_residuals.
struct LorentzBlocks {
  std::array<ScalarField, 3> b;
  MatrixField g;
  ScalarField phi;
  double mass = 1.0;
};

class SouriauModel {
 public:
  SouriauModel() = default;

  static SouriauModel form_first(std::string name, TwoFormField omega, ScalarField h);
  static SouriauModel bivector_first(std::string name, BivectorField lambda, ScalarField h);

  const std::string& name() const { return name_; }
  const SpacePtr& space() const { return omega_or_lambda_space(); }
  const ScalarField& hamiltonian() const { return hamiltonian_; }
  bool is_bivector_first() const { return bivector_first_; }

  // Both sides are always available; the non-primary one inverts pointwise
  // and throws geom::DegeneracyError where the rank drops.
  const TwoFormField& omega() const { return omega_; }
  const BivectorField& lambda() const { return lambda_; }

  linalg::Mat omega_at(PointView p, double pivot_tol = geom::kDefaultPivotTol) const;
  linalg::Mat lambda_at(PointView p, double pivot_tol = geom::kDefaultPivotTol) const;

  std::optional<DualMagneticBlocks> dual_magnetic_blocks;
  std::optional<LorentzBlocks> lorentz_blocks;

 private:
  const SpacePtr& omega_or_lambda_space() const {
    return bivector_first_ ? lambda_.space() : omega_.space();
  }
  std::string name_;
  bool bivector_first_ = false;
  TwoFormField omega_;
  BivectorField lambda_;
  ScalarField hamiltonian_;
};

// --- preset spaces ---------------------------------------------------------

SpacePtr exotic_space(std::map<std::string, double> params);            // q1 q2 p1 p2
SpacePtr anyon_space(std::map<std::string, double> params);             // q1 q2 v1 v2 p1 p2
SpacePtr lorentz_space(std::map<std::string, double> params);           // x1..x3 xd1..xd3
SpacePtr dual_magnetic_space(int n, std::map<std::string, double> params);

// --- model constructors ----------------------------------------------------

// omega_theta - B dq1^dq2 with H = (p1^2+p2^2)/(2m) + V. B and V live on the
// exotic space and may depend on q1, q2.
SouriauModel make_exotic_plane(double theta, ScalarField b, ScalarField v, double m);

// 6-dim Pontryagin-bundle model; regular only for kappa != 0 (throws
// std::invalid_argument otherwise). Constraints lambda_i = p_i - m v_i.
std::pair<SouriauModel, ConstraintSet> make_anyon(double kappa, double m);

// (1/m) dx_i^dxd_i + B_k terms + (1/2) g_ij dxd_i^dxd_j with
// H = xd^2/(2m) + phi(x).
SouriauModel make_generalized_lorentz(std::array<ScalarField, 3> b, MatrixField g,
                                      ScalarField phi, double m);

// Bivector-first dual-magnetic model with an arbitrary Hamiltonian.
SouriauModel make_dual_magnetic(MatrixField g, MatrixField f, ScalarField h);
// Same, with H = p^2/(2m) + V; remembers the blocks for the Newton-law check.
SouriauModel make_dual_magnetic_newtonian(MatrixField g, MatrixField f, ScalarField v,
                                          double m);

// --- operations ------------------------------------------------------------

// X_H from the model's bracket table; exact for bivector-first models,
// pointwise inversion otherwise.
VectorFieldSpec derive_dynamics(const SouriauModel& model,
                                double pivot_tol = geom::kDefaultPivotTol,
                                const DiffConfig& cfg = {});

// Residual of m q_k'' = -dV/dq_k + g_ik p_i/m + m d/dt(f_ki dV/dq_i) along an
// integrated trajectory, by centered differences on interior samples.
// Requires a trajectory of >= 3 states from a dual-magnetic Newtonian model.
ResidualReport modified_newton_residual(const SouriauModel& model,
                                        const dynamics::Trajectory& traj,
                                        const DiffConfig& cfg = {});

// The three second-order compatibility expressions of the generalized
// Lorentz model, reported verbatim (sign asymmetries included) per point.
ResidualReport lorentz_constraint_residuals(const SouriauModel& model,
                                            const std::vector<PhasePoint>& points,
                                            const DiffConfig& cfg = {});

struct ExoticReduction {
  double theta = 0.0;
  double b = 0.0;
  std::array<std::string, 4> chart_aliases;  // xi1, xi2, p1, p2
  linalg::Mat transformed;       // 4x4 chart matrix; p1/p2 rows and columns vanish
  linalg::Mat reduced;           // 2x2 block on (xi1, xi2): [[0,-B],[B,0]]
  double kernel_block_residual;  // max |entry| over the p1/p2 rows and columns
  std::array<std::vector<double>, 2> kernel_in_chart;  // (0,0,1,0) and (0,0,0,1)

  PhasePoint to_chart(PointView qp) const;    // (q1+theta p2, q2-theta p1, p1, p2)
  PhasePoint from_chart(PointView xi) const;  // inverse map
};

// Degenerate reduction of the exotic plane at constant B with theta*B = 1
// (within 1e-12; throws std::invalid_argument otherwise).
ExoticReduction reduce_degenerate_exotic(double theta, double b);

// Leibniz / metriplectic flow X_i = g_ij dh/dx_j; no antisymmetry required,
// the symmetric part of g contributes gradient (dissipative) dynamics.
VectorFieldSpec leibniz_flow(const MatrixField& g, const ScalarField& h,
                             const DiffConfig& cfg = {});

}  // namespace ncps::souriau
