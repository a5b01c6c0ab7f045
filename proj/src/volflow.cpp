#include "ncps/volflow.hpp"

#include <memory>
#include <stdexcept>

#include "ncps/geom.hpp"

namespace ncps::volflow {

double prefactor_value(Prefactor choice, int n) {
  const double sign_n = (n % 2 == 0) ? 1.0 : -1.0;
  switch (choice) {
    case Prefactor::kEquationsOfMotion:
      return sign_n / static_cast<double>(n - 1);
    case Prefactor::kFormContraction: {
      const int half = (n * (n - 1)) / 2;
      const double sign = (half % 2 == 0) ? 1.0 : -1.0;
      return sign / static_cast<double>(n * (n - 1));
    }
  }
  throw std::logic_error("unreachable prefactor");
}

VectorFieldSpec build_volume_flow(const VolumeFlowSpec& spec, const DiffConfig& cfg) {
  if (spec.n < 2) throw std::invalid_argument("build_volume_flow: n must be >= 2");
  const int n = spec.n;
  const SpacePtr space = spec.g.space();
  if (space->dim() != 2 * n || spec.g.n() != n || spec.b.n() != n)
    throw std::invalid_argument("build_volume_flow: blocks must be n x n on a 2n space");

  const double c = prefactor_value(spec.prefactor, n);
  auto g = std::make_shared<MatrixField>(spec.g);
  auto b = std::make_shared<MatrixField>(spec.b);

  return VectorFieldSpec(
      space,
      [g, b, n, c, cfg](PointView p) {
        std::vector<double> x(static_cast<std::size_t>(2 * n), 0.0);
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += partial(g->at(k, l), p, k, cfg);
          x[static_cast<std::size_t>(l)] = c * s;
        }
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += partial(b->at(k, l), p, n + k, cfg);
          x[static_cast<std::size_t>(n + l)] = -c * s;
        }
        return x;
      },
      "X_omega");
}

ResidualReport verify_volume_preservation(const VectorFieldSpec& x,
                                          const std::vector<PhasePoint>& points,
                                          const DiffConfig& cfg) {
  ResidualReport report;
  for (const auto& p : points)
    report.accumulate("divergence", geom::divergence(x, p, cfg), p);
  return report;
}

}  // namespace ncps::volflow
