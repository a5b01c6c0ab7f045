#pragma once

// Multivariate polynomials with exact gradients; the test-side source of
// smooth fields whose derivatives are known independently of the library's
// finite differences.

#include <random>
#include <vector>

#include "ncps/fields.hpp"

namespace ncps::testing {

inline std::vector<int> all_axes(int dim) {
  std::vector<int> axes;
  for (int a = 0; a < dim; ++a) axes.push_back(a);
  return axes;
}

struct Monomial {
  double coef = 0.0;
  std::vector<int> exps;  // one exponent per coordinate
};

struct Poly {
  int dim = 0;
  std::vector<Monomial> terms;

  double eval(PointView p) const {
    double s = 0.0;
    for (const auto& t : terms) {
      double v = t.coef;
      for (int a = 0; a < dim; ++a)
        for (int e = 0; e < t.exps[static_cast<std::size_t>(a)]; ++e)
          v *= p[static_cast<std::size_t>(a)];
      s += v;
    }
    return s;
  }

  Poly derivative(int axis) const {
    Poly d;
    d.dim = dim;
    for (const auto& t : terms) {
      const int e = t.exps[static_cast<std::size_t>(axis)];
      if (e == 0) continue;
      Monomial m = t;
      m.coef *= e;
      m.exps[static_cast<std::size_t>(axis)] = e - 1;
      d.terms.push_back(std::move(m));
    }
    return d;
  }

  Poly scaled(double s) const {
    Poly out = *this;
    for (auto& t : out.terms) t.coef *= s;
    return out;
  }

  static Poly constant(int dim, double c) {
    Poly p;
    p.dim = dim;
    if (c != 0.0) p.terms.push_back({c, std::vector<int>(static_cast<std::size_t>(dim), 0)});
    return p;
  }

  static Poly sum(const Poly& a, const Poly& b) {
    Poly out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
  }
};

// Random polynomial of total degree <= max_degree over the given axes only.
inline Poly random_poly(std::mt19937_64& rng, int dim, int max_degree, double coef_scale,
                        const std::vector<int>& axes) {
  std::uniform_real_distribution<double> coef(-coef_scale, coef_scale);
  std::uniform_int_distribution<int> n_terms(1, 3);
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(axes.size()) - 1);

  Poly p;
  p.dim = dim;
  const int terms = n_terms(rng);
  for (int t = 0; t < terms; ++t) {
    Monomial m;
    m.coef = coef(rng);
    m.exps.assign(static_cast<std::size_t>(dim), 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k)
      ++m.exps[static_cast<std::size_t>(axes[static_cast<std::size_t>(pick(rng))])];
    p.terms.push_back(std::move(m));
  }
  return p;
}

inline ScalarField poly_field(const SpacePtr& space, Poly p, bool with_gradient = true) {
  const int n = space->dim();
  ScalarField::GradFn grad;
  if (with_gradient) {
    std::vector<Poly> partials;
    for (int a = 0; a < n; ++a) partials.push_back(p.derivative(a));
    grad = [partials](PointView q) {
      std::vector<double> g;
      g.reserve(partials.size());
      for (const auto& d : partials) g.push_back(d.eval(q));
      return g;
    };
  }
  return ScalarField(
      space, [p](PointView q) { return p.eval(q); }, "poly", std::move(grad));
}

}  // namespace ncps::testing
