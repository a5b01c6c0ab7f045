#include "ncps/fields.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace ncps {

namespace {

bool identifier_shaped(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

int PhaseSpace::index_of(const std::string& alias) const {
  for (std::size_t i = 0; i < aliases.size(); ++i)
    if (aliases[i] == alias) return static_cast<int>(i);
  return -1;
}

std::shared_ptr<const PhaseSpace> PhaseSpace::make(std::vector<std::string> aliases,
                                                   std::map<std::string, double> params) {
  if (aliases.empty()) throw std::invalid_argument("phase space needs at least one axis");
  for (std::size_t i = 0; i < aliases.size(); ++i) {
    if (!identifier_shaped(aliases[i]))
      throw std::invalid_argument("alias '" + aliases[i] + "' is not a valid identifier");
    for (std::size_t j = i + 1; j < aliases.size(); ++j)
      if (aliases[i] == aliases[j])
        throw std::invalid_argument("duplicate alias '" + aliases[i] + "'");
  }
  auto s = std::make_shared<PhaseSpace>();
  s->aliases = std::move(aliases);
  s->params = std::move(params);
  return s;
}

std::shared_ptr<const PhaseSpace> PhaseSpace::darboux(int n_pairs,
                                                      std::map<std::string, double> params) {
  if (n_pairs < 1) throw std::invalid_argument("darboux: need n >= 1");
  std::vector<std::string> names;
  for (int i = 1; i <= n_pairs; ++i) names.push_back("q" + std::to_string(i));
  for (int i = 1; i <= n_pairs; ++i) names.push_back("p" + std::to_string(i));
  return make(std::move(names), std::move(params));
}

double DiffConfig::step(double coord) const { return h0 * std::max(1.0, std::fabs(coord)); }

ScalarField::ScalarField(SpacePtr space, Fn fn, std::string label, GradFn grad)
    : space_(std::move(space)), fn_(std::move(fn)), grad_(std::move(grad)),
      label_(std::move(label)) {}

ScalarField constant_field(SpacePtr space, double value) {
  const int n = space->dim();
  return ScalarField(
      std::move(space), [value](PointView) { return value; }, "const",
      [n](PointView) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); });
}

ScalarField coordinate_field(SpacePtr space, int axis) {
  if (axis < 0 || axis >= space->dim())
    throw std::invalid_argument("coordinate_field: axis out of range");
  const int n = space->dim();
  std::string label = space->aliases[static_cast<std::size_t>(axis)];
  return ScalarField(
      std::move(space),
      [axis](PointView p) { return p[static_cast<std::size_t>(axis)]; }, std::move(label),
      [n, axis](PointView) {
        std::vector<double> g(static_cast<std::size_t>(n), 0.0);
        g[static_cast<std::size_t>(axis)] = 1.0;
        return g;
      });
}

ScalarField expr_field(SpacePtr space, const expr::Expr& e) {
  expr::Compiled c = expr::compile(e, space->aliases, space->params);
  std::string label = e.source();
  return ScalarField(std::move(space),
                     [c](PointView p) { return c(p); }, std::move(label));
}

ScalarField expr_field(SpacePtr space, std::string_view source) {
  return expr_field(std::move(space), expr::parse(source));
}

ScalarField linear_combination(SpacePtr space,
                               std::vector<std::pair<double, ScalarField>> parts,
                               std::string label) {
  bool all_grads = true;
  for (const auto& [w, f] : parts)
    if (!f.analytic_gradient()) all_grads = false;

  const int n = space->dim();
  ScalarField::GradFn grad;
  if (all_grads && !parts.empty()) {
    auto shared = std::make_shared<std::vector<std::pair<double, ScalarField>>>(parts);
    grad = [shared, n](PointView p) {
      std::vector<double> g(static_cast<std::size_t>(n), 0.0);
      for (const auto& [w, f] : *shared) {
        auto gi = f.analytic_gradient()(p);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += w * gi[k];
      }
      return g;
    };
  }
  auto shared = std::make_shared<std::vector<std::pair<double, ScalarField>>>(std::move(parts));
  return ScalarField(
      std::move(space),
      [shared](PointView p) {
        double s = 0.0;
        for (const auto& [w, f] : *shared) s += w * f(p);
        return s;
      },
      std::move(label), std::move(grad));
}

std::vector<double> gradient(const ScalarField& f, PointView p, const DiffConfig& cfg) {
  if (f.analytic_gradient()) return f.analytic_gradient()(p);
  std::vector<double> g(p.size());
  PhasePoint x(p.begin(), p.end());
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double x0 = p[a];
    const double h = cfg.step(x0);
    x[a] = x0 + h;
    const double fp = f(x);
    x[a] = x0 - h;
    const double fm = f(x);
    x[a] = x0;
    g[a] = (fp - fm) / ((x0 + h) - (x0 - h));
  }
  return g;
}

double partial(const ScalarField& f, PointView p, int axis, const DiffConfig& cfg) {
  if (f.analytic_gradient()) return f.analytic_gradient()(p)[static_cast<std::size_t>(axis)];
  PhasePoint x(p.begin(), p.end());
  const std::size_t a = static_cast<std::size_t>(axis);
  const double x0 = p[a];
  const double h = cfg.step(x0);
  x[a] = x0 + h;
  const double fp = f(x);
  x[a] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / ((x0 + h) - (x0 - h));
}

// ---------------------------------------------------------------------------

MatrixField::MatrixField(SpacePtr space, int n) : space_(std::move(space)), n_(n) {
  entries_.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) entries_.push_back(constant_field(space_, 0.0));
}

linalg::Mat MatrixField::eval(PointView p) const {
  if (matrix_fn_) return matrix_fn_(p);
  linalg::Mat m(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) m(a, b) = entries_[index(a, b)](p);
  return m;
}

void MatrixField::set_matrix_fn(MatFn fn) {
  matrix_fn_ = std::move(fn);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) {
      auto f = matrix_fn_;
      entries_[index(a, b)] =
          ScalarField(space_, [f, a, b](PointView p) { return f(p)(a, b); });
    }
}

namespace {

std::vector<std::vector<std::pair<double, ScalarField>>> make_acc(int n) {
  return std::vector<std::vector<std::pair<double, ScalarField>>>(
      static_cast<std::size_t>(n) * n);
}

MatrixField accumulate_entries(const SpacePtr& space, int n,
                               std::vector<std::vector<std::pair<double, ScalarField>>> acc) {
  MatrixField m(space, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto& parts = acc[static_cast<std::size_t>(a) * n + b];
      if (parts.empty()) continue;
      if (parts.size() == 1 && parts[0].first == 1.0) {
        m.set(a, b, parts[0].second);
      } else {
        m.set(a, b, linear_combination(space, std::move(parts)));
      }
    }
  return m;
}

}  // namespace

FormBuilder::FormBuilder(SpacePtr space) : space_(std::move(space)), acc_(make_acc(space_->dim())) {}

FormBuilder& FormBuilder::wedge(int a, int b, ScalarField coeff) {
  const int n = space_->dim();
  if (a < 0 || b < 0 || a >= n || b >= n || a == b)
    throw std::invalid_argument("FormBuilder::wedge: bad axis pair");
  acc_[static_cast<std::size_t>(b) * n + a].emplace_back(1.0, coeff);
  acc_[static_cast<std::size_t>(a) * n + b].emplace_back(-1.0, std::move(coeff));
  return *this;
}

FormBuilder& FormBuilder::wedge(int a, int b, double coeff) {
  return wedge(a, b, constant_field(space_, coeff));
}

TwoFormField FormBuilder::build() {
  return TwoFormField(accumulate_entries(space_, space_->dim(), std::move(acc_)));
}

BivectorBuilder::BivectorBuilder(SpacePtr space)
    : space_(std::move(space)), acc_(make_acc(space_->dim())) {}

BivectorBuilder& BivectorBuilder::pair(int a, int b, ScalarField coeff) {
  const int n = space_->dim();
  if (a < 0 || b < 0 || a >= n || b >= n || a == b)
    throw std::invalid_argument("BivectorBuilder::pair: bad axis pair");
  acc_[static_cast<std::size_t>(a) * n + b].emplace_back(1.0, coeff);
  acc_[static_cast<std::size_t>(b) * n + a].emplace_back(-1.0, std::move(coeff));
  return *this;
}

BivectorBuilder& BivectorBuilder::pair(int a, int b, double coeff) {
  return pair(a, b, constant_field(space_, coeff));
}

BivectorField BivectorBuilder::build() {
  return BivectorField(accumulate_entries(space_, space_->dim(), std::move(acc_)));
}

// ---------------------------------------------------------------------------

VectorFieldSpec::VectorFieldSpec(SpacePtr space, std::vector<ScalarField> components)
    : space_(std::move(space)), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != space_->dim())
    throw std::invalid_argument("vector field component count != space dim");
}

VectorFieldSpec::VectorFieldSpec(SpacePtr space, VecFn eval_all, std::string label)
    : space_(std::move(space)), eval_all_(std::move(eval_all)) {
  const int n = space_->dim();
  for (int a = 0; a < n; ++a) {
    auto f = eval_all_;
    components_.emplace_back(
        space_, [f, a](PointView p) { return f(p)[static_cast<std::size_t>(a)]; },
        label.empty() ? std::string{} : label + "[" + std::to_string(a) + "]");
  }
}

std::vector<double> VectorFieldSpec::eval(PointView p) const {
  if (eval_all_) return eval_all_(p);
  std::vector<double> v(components_.size());
  for (std::size_t a = 0; a < components_.size(); ++a) v[a] = components_[a](p);
  return v;
}

}  // namespace ncps
