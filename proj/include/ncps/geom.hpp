#pragma once

// Coordinate-level geometric calculus on a single global chart: form/bivector
// inversion with rank reporting, Poisson brackets, Hamiltonian vector fields,
// and the closedness / Jacobi residuals.
//
// All operations are pure given immutable fields; evaluation over sample
// points can run in parallel.

#include <stdexcept>
#include <vector>

#include "ncps/fields.hpp"
#include "ncps/linalg.hpp"
#include "ncps/report.hpp"

namespace ncps::geom {

inline constexpr double kDefaultPivotTol = 1e-9;

struct Inversion {
  bool ok = false;
  linalg::Mat matrix;  // valid when ok
  int rank = 0;        // always valid
};

struct DegeneracyError : std::runtime_error {
  DegeneracyError(int rank_, PhasePoint point_);
  int rank;
  PhasePoint point;
};

// Pointwise inverse of an antisymmetric matrix field. The inverse is
// re-antisymmetrized, (A - A^T)/2, to kill elimination round-off.
Inversion invert_form(const TwoFormField& omega, PointView p,
                      double pivot_tol = kDefaultPivotTol);
Inversion invert_bivector(const BivectorField& lambda, PointView p,
                          double pivot_tol = kDefaultPivotTol);

// Field-level duals; entries evaluate by inverting the whole matrix at the
// point and throw DegeneracyError where the rank drops.
BivectorField bivector_from_form(const TwoFormField& omega,
                                 double pivot_tol = kDefaultPivotTol);
TwoFormField form_from_bivector(const BivectorField& lambda,
                                double pivot_tol = kDefaultPivotTol);

// {f,g} = Lambda(a,b) df/dxi_a dg/dxi_b, summed over a<b in antisymmetrized
// form so that {f,f} is exactly zero.
double poisson_bracket(const BivectorField& lambda, const ScalarField& f,
                       const ScalarField& g, PointView p, const DiffConfig& cfg = {});

// Components (X_h)_a = {xi_a, h} = Lambda(a,b) dh/dxi_b.
VectorFieldSpec hamiltonian_vf(const BivectorField& lambda, const ScalarField& h,
                               const DiffConfig& cfg = {});

// max over points and index triples a<b<c of
// |d_a w_bc - d_b w_ac + d_c w_ab|; zero iff the form is closed.
ResidualReport closedness_residual(const TwoFormField& omega,
                                   const std::vector<PhasePoint>& points,
                                   const DiffConfig& cfg = {});

// Coordinate trivector of the self Schouten bracket (up to a constant
// factor): T^abc = L^al d_l L^bc + L^bl d_l L^ca + L^cl d_l L^ab.
// Zero iff the bivector is Poisson.
ResidualReport jacobiator_residual(const BivectorField& lambda,
                                   const std::vector<PhasePoint>& points,
                                   const DiffConfig& cfg = {});

// Independent oracle for jacobiator_residual: {f,{g,h}} + {h,{f,g}} + {g,{h,f}}
// with the outer bracket differentiating the nested one numerically. The
// outer step should stay well above the inner evaluation noise.
double jacobi_triple_residual(const BivectorField& lambda, const ScalarField& f,
                              const ScalarField& g, const ScalarField& h, PointView p,
                              const DiffConfig& inner = {},
                              const DiffConfig& outer = {1e-4});

// (i(X)w)_b contracted against the stored orientation, matching i(X)w = df
// for the generating-function checks.
std::vector<double> interior_product(const VectorFieldSpec& x, const TwoFormField& omega,
                                     PointView p);

// max over points of the sup norm of i(X)w - df.
ResidualReport verify_generating_function(const VectorFieldSpec& x,
                                          const TwoFormField& omega, const ScalarField& f,
                                          const std::vector<PhasePoint>& points,
                                          const DiffConfig& cfg = {});

// Orthonormal basis of ker w(p); empty when nondegenerate.
std::vector<std::vector<double>> kernel_basis(const TwoFormField& omega, PointView p,
                                              double pivot_tol = kDefaultPivotTol);

// Sum of d X_a / d xi_a (Darboux-coordinate divergence).
double divergence(const VectorFieldSpec& x, PointView p, const DiffConfig& cfg = {});

// max |m(a,b) + m(b,a)| over points; sanity check for stored matrices.
ResidualReport antisymmetry_residual(const MatrixField& m,
                                     const std::vector<PhasePoint>& points);

}  // namespace ncps::geom
