#pragma once

// Coordinate charts, scalar/vector/matrix fields, and numeric derivatives.
//
// Matrix orientation. Form matrices are stored so that the literal matrix
// inverse of a symplectic form is the fundamental bracket table,
// Lambda(a,b) = {xi_a, xi_b}, and trajectories follow xi_a' = Lambda(a,b) dH/dxi_b.
// Equivalently, FormBuilder::wedge(a, b, c) for a term c * dxi_a ^ dxi_b writes
// +c at entry (b,a) and -c at entry (a,b). Bivector matrices carry the bracket
// table directly: BivectorBuilder::pair(a, b, c) adds c to {xi_a, xi_b}.
//
// All fields are immutable once built; evaluation is pure and safe to run
// concurrently over sample points.

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncps/expr.hpp"
#include "ncps/linalg.hpp"

namespace ncps {

using PhasePoint = std::vector<double>;
using PointView = std::span<const double>;

struct PhaseSpace {
  std::vector<std::string> aliases;
  std::map<std::string, double> params;

  int dim() const { return static_cast<int>(aliases.size()); }
  int index_of(const std::string& alias) const;

  // Validates alias uniqueness/shape. Throws std::invalid_argument.
  static std::shared_ptr<const PhaseSpace> make(std::vector<std::string> aliases,
                                                std::map<std::string, double> params = {});
  // q1..qn, p1..pn
  static std::shared_ptr<const PhaseSpace> darboux(int n_pairs,
                                                   std::map<std::string, double> params = {});
};

using SpacePtr = std::shared_ptr<const PhaseSpace>;

struct DiffConfig {
  double h0 = 1e-5;  // relative step: h = h0 * max(1, |xi_a|)
  double step(double coord) const;
};

class ScalarField {
 public:
  using Fn = std::function<double(PointView)>;
  using GradFn = std::function<std::vector<double>(PointView)>;

  ScalarField() = default;
  ScalarField(SpacePtr space, Fn fn, std::string label = {}, GradFn grad = nullptr);

  double operator()(PointView p) const { return fn_(p); }
  const GradFn& analytic_gradient() const { return grad_; }
  const std::string& label() const { return label_; }
  const SpacePtr& space() const { return space_; }
  bool valid() const { return static_cast<bool>(fn_); }

 private:
  SpacePtr space_;
  Fn fn_;
  GradFn grad_;
  std::string label_;
};

ScalarField constant_field(SpacePtr space, double value);
ScalarField coordinate_field(SpacePtr space, int axis);
// Compiles against the space's aliases; params become constants.
ScalarField expr_field(SpacePtr space, const expr::Expr& e);
ScalarField expr_field(SpacePtr space, std::string_view source);
// sum of weight*field pairs; keeps analytic gradients when every part has one
ScalarField linear_combination(SpacePtr space,
                               std::vector<std::pair<double, ScalarField>> parts,
                               std::string label = {});

std::vector<double> gradient(const ScalarField& f, PointView p, const DiffConfig& cfg = {});
double partial(const ScalarField& f, PointView p, int axis, const DiffConfig& cfg = {});

// ---------------------------------------------------------------------------

class MatrixField {
 public:
  using MatFn = std::function<linalg::Mat(PointView)>;

  MatrixField() = default;
  MatrixField(SpacePtr space, int n);

  int n() const { return n_; }
  const SpacePtr& space() const { return space_; }
  const ScalarField& at(int a, int b) const { return entries_[index(a, b)]; }
  void set(int a, int b, ScalarField f) { entries_[index(a, b)] = std::move(f); }

  linalg::Mat eval(PointView p) const;

  // Optional whole-matrix evaluator (used by pointwise-inverse wrappers);
  // entry fields stay consistent with it.
  void set_matrix_fn(MatFn fn);

 private:
  std::size_t index(int a, int b) const { return static_cast<std::size_t>(a) * n_ + b; }
  SpacePtr space_;
  int n_ = 0;
  std::vector<ScalarField> entries_;
  MatFn matrix_fn_;
};

struct TwoFormField : MatrixField {
  TwoFormField() = default;
  TwoFormField(SpacePtr space, int n) : MatrixField(std::move(space), n) {}
  explicit TwoFormField(MatrixField m) : MatrixField(std::move(m)) {}
};

struct BivectorField : MatrixField {
  BivectorField() = default;
  BivectorField(SpacePtr space, int n) : MatrixField(std::move(space), n) {}
  explicit BivectorField(MatrixField m) : MatrixField(std::move(m)) {}
};

class FormBuilder {
 public:
  explicit FormBuilder(SpacePtr space);
  FormBuilder& wedge(int a, int b, ScalarField coeff);  // += coeff dxi_a ^ dxi_b
  FormBuilder& wedge(int a, int b, double coeff);
  TwoFormField build();

 private:
  SpacePtr space_;
  std::vector<std::vector<std::pair<double, ScalarField>>> acc_;
};

class BivectorBuilder {
 public:
  explicit BivectorBuilder(SpacePtr space);
  BivectorBuilder& pair(int a, int b, ScalarField coeff);  // {xi_a, xi_b} += coeff
  BivectorBuilder& pair(int a, int b, double coeff);
  BivectorField build();

 private:
  SpacePtr space_;
  std::vector<std::vector<std::pair<double, ScalarField>>> acc_;
};

// ---------------------------------------------------------------------------

class VectorFieldSpec {
 public:
  using VecFn = std::function<std::vector<double>(PointView)>;

  VectorFieldSpec() = default;
  VectorFieldSpec(SpacePtr space, std::vector<ScalarField> components);
  // Whole-vector evaluator; per-component fields are synthesized from it.
  VectorFieldSpec(SpacePtr space, VecFn eval_all, std::string label = {});

  std::vector<double> eval(PointView p) const;
  const std::vector<ScalarField>& components() const { return components_; }
  const SpacePtr& space() const { return space_; }
  int dim() const { return static_cast<int>(components_.size()); }

 private:
  SpacePtr space_;
  std::vector<ScalarField> components_;
  VecFn eval_all_;
};

}  // namespace ncps
