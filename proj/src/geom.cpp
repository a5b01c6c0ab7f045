#include "ncps/geom.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace ncps::geom {

namespace {

std::string point_string(PointView p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

linalg::Mat antisymmetrized(const linalg::Mat& a) {
  linalg::Mat out(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out(r, c) = 0.5 * (a(r, c) - a(c, r));
  return out;
}

Inversion invert_matrix_field(const MatrixField& m, PointView p, double pivot_tol) {
  linalg::Elimination e = linalg::invert_with_rank(m.eval(p), pivot_tol);
  Inversion out;
  out.rank = e.rank;
  out.ok = e.invertible;
  if (e.invertible) out.matrix = antisymmetrized(e.inverse);
  return out;
}

}  // namespace

DegeneracyError::DegeneracyError(int rank_, PhasePoint point_)
    : std::runtime_error("degenerate structure matrix (rank " + std::to_string(rank_) +
                         ") at " + point_string(point_)),
      rank(rank_), point(std::move(point_)) {}

Inversion invert_form(const TwoFormField& omega, PointView p, double pivot_tol) {
  return invert_matrix_field(omega, p, pivot_tol);
}

Inversion invert_bivector(const BivectorField& lambda, PointView p, double pivot_tol) {
  return invert_matrix_field(lambda, p, pivot_tol);
}

namespace {

MatrixField pointwise_inverse(const MatrixField& src, double pivot_tol) {
  MatrixField out(src.space(), src.n());
  auto shared = std::make_shared<MatrixField>(src);
  out.set_matrix_fn([shared, pivot_tol](PointView p) {
    linalg::Elimination e = linalg::invert_with_rank(shared->eval(p), pivot_tol);
    if (!e.invertible) throw DegeneracyError(e.rank, PhasePoint(p.begin(), p.end()));
    return antisymmetrized(e.inverse);
  });
  return out;
}

}  // namespace

BivectorField bivector_from_form(const TwoFormField& omega, double pivot_tol) {
  return BivectorField(pointwise_inverse(omega, pivot_tol));
}

TwoFormField form_from_bivector(const BivectorField& lambda, double pivot_tol) {
  return TwoFormField(pointwise_inverse(lambda, pivot_tol));
}

double poisson_bracket(const BivectorField& lambda, const ScalarField& f,
                       const ScalarField& g, PointView p, const DiffConfig& cfg) {
  const linalg::Mat l = lambda.eval(p);
  const std::vector<double> gf = gradient(f, p, cfg);
  const std::vector<double> gg = gradient(g, p, cfg);
  const int n = l.rows();
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      s += l(a, b) * (gf[static_cast<std::size_t>(a)] * gg[static_cast<std::size_t>(b)] -
                      gf[static_cast<std::size_t>(b)] * gg[static_cast<std::size_t>(a)]);
  return s;
}

VectorFieldSpec hamiltonian_vf(const BivectorField& lambda, const ScalarField& h,
                               const DiffConfig& cfg) {
  auto lam = std::make_shared<BivectorField>(lambda);
  auto ham = std::make_shared<ScalarField>(h);
  return VectorFieldSpec(
      lambda.space(),
      [lam, ham, cfg](PointView p) {
        const linalg::Mat l = lam->eval(p);
        const std::vector<double> gh = gradient(*ham, p, cfg);
        return l.apply(gh);
      },
      "X_" + (h.label().empty() ? std::string("h") : h.label()));
}

ResidualReport closedness_residual(const TwoFormField& omega,
                                   const std::vector<PhasePoint>& points,
                                   const DiffConfig& cfg) {
  ResidualReport report;
  const int n = omega.n();
  for (const auto& p : points) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          const double t = partial(omega.at(b, c), p, a, cfg) -
                           partial(omega.at(a, c), p, b, cfg) +
                           partial(omega.at(a, b), p, c, cfg);
          report.accumulate("closedness", t, p);
        }
  }
  return report;
}

ResidualReport jacobiator_residual(const BivectorField& lambda,
                                   const std::vector<PhasePoint>& points,
                                   const DiffConfig& cfg) {
  ResidualReport report;
  const int n = lambda.n();
  std::vector<double> dL(static_cast<std::size_t>(n) * n * n);
  auto d = [&](int l, int r, int c) -> double& {
    return dL[(static_cast<std::size_t>(l) * n + r) * n + c];
  };
  for (const auto& p : points) {
    const linalg::Mat l0 = lambda.eval(p);
    for (int l = 0; l < n; ++l)
      for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) {
          const double v = partial(lambda.at(r, c), p, l, cfg);
          d(l, r, c) = v;
          d(l, c, r) = -v;
        }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          double t = 0.0;
          for (int l = 0; l < n; ++l)
            t += l0(a, l) * d(l, b, c) + l0(b, l) * d(l, c, a) + l0(c, l) * d(l, a, b);
          report.accumulate("jacobiator", t, p);
        }
  }
  return report;
}

double jacobi_triple_residual(const BivectorField& lambda, const ScalarField& f,
                              const ScalarField& g, const ScalarField& h, PointView p,
                              const DiffConfig& inner, const DiffConfig& outer) {
  auto lam = std::make_shared<BivectorField>(lambda);
  auto nested = [lam, inner](const ScalarField& u, const ScalarField& v) {
    auto us = std::make_shared<ScalarField>(u);
    auto vs = std::make_shared<ScalarField>(v);
    return ScalarField(lam->space(), [lam, us, vs, inner](PointView q) {
      return poisson_bracket(*lam, *us, *vs, q, inner);
    });
  };
  const double t1 = poisson_bracket(lambda, f, nested(g, h), p, outer);
  const double t2 = poisson_bracket(lambda, h, nested(f, g), p, outer);
  const double t3 = poisson_bracket(lambda, g, nested(h, f), p, outer);
  return t1 + t2 + t3;
}

std::vector<double> interior_product(const VectorFieldSpec& x, const TwoFormField& omega,
                                     PointView p) {
  return omega.eval(p).apply(x.eval(p));
}

ResidualReport verify_generating_function(const VectorFieldSpec& x,
                                          const TwoFormField& omega, const ScalarField& f,
                                          const std::vector<PhasePoint>& points,
                                          const DiffConfig& cfg) {
  ResidualReport report;
  for (const auto& p : points) {
    const std::vector<double> lhs = interior_product(x, omega, p);
    const std::vector<double> rhs = gradient(f, p, cfg);
    double worst = 0.0;
    for (std::size_t a = 0; a < lhs.size(); ++a)
      worst = std::max(worst, std::fabs(lhs[a] - rhs[a]));
    report.accumulate("generating_function", worst, p);
  }
  return report;
}

std::vector<std::vector<double>> kernel_basis(const TwoFormField& omega, PointView p,
                                              double pivot_tol) {
  return linalg::null_space_orthonormal(omega.eval(p), pivot_tol);
}

double divergence(const VectorFieldSpec& x, PointView p, const DiffConfig& cfg) {
  double s = 0.0;
  for (int a = 0; a < x.dim(); ++a)
    s += partial(x.components()[static_cast<std::size_t>(a)], p, a, cfg);
  return s;
}

ResidualReport antisymmetry_residual(const MatrixField& m,
                                     const std::vector<PhasePoint>& points) {
  ResidualReport report;
  for (const auto& p : points) {
    const linalg::Mat v = m.eval(p);
    double worst = 0.0;
    for (int a = 0; a < m.n(); ++a)
      for (int b = a; b < m.n(); ++b)
        worst = std::max(worst, std::fabs(v(a, b) + v(b, a)));
    report.accumulate("antisymmetry", worst, p);
  }
  return report;
}

}  // namespace ncps::geom
