#include "ncps/souriau.hpp"

#include <cmath>
#include <stdexcept>

namespace ncps::souriau {

namespace {

void require_even(const SpacePtr& space, const char* what) {
  if (space->dim() < 2 || space->dim() % 2 != 0)
    throw std::invalid_argument(std::string(what) + ": phase space dimension must be even");
}

ScalarField kinetic_plus(const SpacePtr& space, int first_momentum, int n, double m,
                         const ScalarField& extra, const std::string& label) {
  // H = sum p_i^2 / (2m) + extra, with an analytic gradient when extra has one
  std::vector<std::pair<double, ScalarField>> parts;
  auto kinetic = ScalarField(
      space,
      [first_momentum, n, m](PointView p) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          const double pi = p[static_cast<std::size_t>(first_momentum + i)];
          s += pi * pi;
        }
        return s / (2.0 * m);
      },
      "kinetic",
      [space, first_momentum, n, m](PointView p) {
        std::vector<double> g(static_cast<std::size_t>(space->dim()), 0.0);
        for (int i = 0; i < n; ++i)
          g[static_cast<std::size_t>(first_momentum + i)] =
              p[static_cast<std::size_t>(first_momentum + i)] / m;
        return g;
      });
  parts.emplace_back(1.0, std::move(kinetic));
  parts.emplace_back(1.0, extra);
  return linear_combination(space, std::move(parts), label);
}

}  // namespace

SouriauModel SouriauModel::form_first(std::string name, TwoFormField omega, ScalarField h) {
  require_even(omega.space(), "SouriauModel");
  SouriauModel m;
  m.name_ = std::move(name);
  m.bivector_first_ = false;
  m.lambda_ = geom::bivector_from_form(omega);
  m.omega_ = std::move(omega);
  m.hamiltonian_ = std::move(h);
  return m;
}

SouriauModel SouriauModel::bivector_first(std::string name, BivectorField lambda,
                                          ScalarField h) {
  require_even(lambda.space(), "SouriauModel");
  SouriauModel m;
  m.name_ = std::move(name);
  m.bivector_first_ = true;
  m.omega_ = geom::form_from_bivector(lambda);
  m.lambda_ = std::move(lambda);
  m.hamiltonian_ = std::move(h);
  return m;
}

linalg::Mat SouriauModel::omega_at(PointView p, double pivot_tol) const {
  if (!bivector_first_) return omega_.eval(p);
  geom::Inversion inv = geom::invert_bivector(lambda_, p, pivot_tol);
  if (!inv.ok) throw geom::DegeneracyError(inv.rank, PhasePoint(p.begin(), p.end()));
  return inv.matrix;
}

linalg::Mat SouriauModel::lambda_at(PointView p, double pivot_tol) const {
  if (bivector_first_) return lambda_.eval(p);
  geom::Inversion inv = geom::invert_form(omega_, p, pivot_tol);
  if (!inv.ok) throw geom::DegeneracyError(inv.rank, PhasePoint(p.begin(), p.end()));
  return inv.matrix;
}

// --- preset spaces ---------------------------------------------------------

SpacePtr exotic_space(std::map<std::string, double> params) {
  return PhaseSpace::make({"q1", "q2", "p1", "p2"}, std::move(params));
}

SpacePtr anyon_space(std::map<std::string, double> params) {
  return PhaseSpace::make({"q1", "q2", "v1", "v2", "p1", "p2"}, std::move(params));
}

SpacePtr lorentz_space(std::map<std::string, double> params) {
  return PhaseSpace::make({"x1", "x2", "x3", "xd1", "xd2", "xd3"}, std::move(params));
}

SpacePtr dual_magnetic_space(int n, std::map<std::string, double> params) {
  return PhaseSpace::darboux(n, std::move(params));
}

// --- model constructors ----------------------------------------------------

SouriauModel make_exotic_plane(double theta, ScalarField b, ScalarField v, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("make_exotic_plane: m must be positive");
  const SpacePtr space = b.space();
  if (space->dim() != 4)
    throw std::invalid_argument("make_exotic_plane: fields must live on the 4-dim space");

  FormBuilder fb(space);
  fb.wedge(0, 2, 1.0);     // dq1 ^ dp1
  fb.wedge(1, 3, 1.0);     // dq2 ^ dp2
  fb.wedge(2, 3, -theta);  // -theta dp1 ^ dp2
  std::vector<std::pair<double, ScalarField>> minus_b{{-1.0, b}};
  fb.wedge(0, 1, linear_combination(space, std::move(minus_b), "-B"));  // -B dq1 ^ dq2

  ScalarField h = kinetic_plus(space, 2, 2, m, v, "H");
  return SouriauModel::form_first("exotic_plane", fb.build(), std::move(h));
}

std::pair<SouriauModel, ConstraintSet> make_anyon(double kappa, double m) {
  if (kappa == 0.0)
    throw std::invalid_argument("make_anyon: kappa = 0 gives a degenerate 2-form");
  if (!(m > 0.0)) throw std::invalid_argument("make_anyon: m must be positive");
  const SpacePtr space = anyon_space({{"m", m}, {"kappa", kappa}});

  FormBuilder fb(space);
  fb.wedge(0, 4, 1.0);     // dq1 ^ dp1
  fb.wedge(1, 5, 1.0);     // dq2 ^ dp2
  fb.wedge(2, 3, -kappa);  // -kappa dv1 ^ dv2

  ScalarField h = kinetic_plus(space, 4, 2, m, constant_field(space, 0.0), "H");

  ConstraintSet constraints;
  for (int i = 0; i < 2; ++i) {
    std::vector<std::pair<double, ScalarField>> parts;
    parts.emplace_back(1.0, coordinate_field(space, 4 + i));  // p_i
    parts.emplace_back(-m, coordinate_field(space, 2 + i));   // -m v_i
    constraints.constraints.emplace_back(
        "lambda" + std::to_string(i + 1),
        linear_combination(space, std::move(parts), "lambda" + std::to_string(i + 1)));
  }

  return {SouriauModel::form_first("anyon", fb.build(), std::move(h)),
          std::move(constraints)};
}

SouriauModel make_generalized_lorentz(std::array<ScalarField, 3> b, MatrixField g,
                                      ScalarField phi, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("make_generalized_lorentz: m must be positive");
  const SpacePtr space = phi.space();
  if (space->dim() != 6 || g.n() != 3)
    throw std::invalid_argument("make_generalized_lorentz: expected 6-dim space, 3x3 g");

  FormBuilder fb(space);
  for (int i = 0; i < 3; ++i) fb.wedge(i, 3 + i, 1.0 / m);  // (1/m) dx_i ^ dxd_i
  fb.wedge(1, 2, b[0]);  // B1 dx2 ^ dx3
  fb.wedge(2, 0, b[1]);  // B2 dx3 ^ dx1
  fb.wedge(0, 1, b[2]);  // B3 dx1 ^ dx2
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) fb.wedge(3 + i, 3 + j, g.at(i, j));

  ScalarField h = kinetic_plus(space, 3, 3, m, phi, "H");
  SouriauModel model = SouriauModel::form_first("generalized_lorentz", fb.build(), std::move(h));
  model.lorentz_blocks = LorentzBlocks{std::move(b), std::move(g), std::move(phi), m};
  return model;
}

SouriauModel make_dual_magnetic(MatrixField g, MatrixField f, ScalarField h) {
  const SpacePtr space = h.space();
  const int n = g.n();
  if (f.n() != n || space->dim() != 2 * n)
    throw std::invalid_argument("make_dual_magnetic: block sizes must be n x n on a 2n space");

  BivectorBuilder bb(space);
  for (int k = 0; k < n; ++k) {
    bb.pair(k, n + k, 1.0);  // {q_k, p_k} = 1
    for (int l = k + 1; l < n; ++l) {
      bb.pair(k, l, f.at(k, l));  // {q_k, q_l} = f_kl
      std::vector<std::pair<double, ScalarField>> neg{{-1.0, g.at(k, l)}};
      bb.pair(n + k, n + l, linear_combination(space, std::move(neg)));  // {p_k,p_l} = -g_kl
    }
  }
  return SouriauModel::bivector_first("dual_magnetic", bb.build(), std::move(h));
}

SouriauModel make_dual_magnetic_newtonian(MatrixField g, MatrixField f, ScalarField v,
                                          double m) {
  if (!(m > 0.0)) throw std::invalid_argument("make_dual_magnetic_newtonian: m must be > 0");
  const SpacePtr space = v.space();
  const int n = g.n();
  ScalarField h = kinetic_plus(space, n, n, m, v, "H");
  SouriauModel model = make_dual_magnetic(g, f, std::move(h));
  model.dual_magnetic_blocks = DualMagneticBlocks{std::move(g), std::move(f), std::move(v), m};
  return model;
}

// --- operations ------------------------------------------------------------

VectorFieldSpec derive_dynamics(const SouriauModel& model, double pivot_tol,
                                const DiffConfig& cfg) {
  if (model.is_bivector_first())
    return geom::hamiltonian_vf(model.lambda(), model.hamiltonian(), cfg);
  return geom::hamiltonian_vf(geom::bivector_from_form(model.omega(), pivot_tol),
                              model.hamiltonian(), cfg);
}

ResidualReport modified_newton_residual(const SouriauModel& model,
                                        const dynamics::Trajectory& traj,
                                        const DiffConfig& cfg) {
  if (!model.dual_magnetic_blocks)
    throw std::invalid_argument("modified_newton_residual: model has no dual-magnetic blocks");
  if (traj.size() < 3)
    throw std::invalid_argument("modified_newton_residual: trajectory too short for q''");

  const DualMagneticBlocks& blocks = *model.dual_magnetic_blocks;
  const int n = blocks.g.n();
  const double m = blocks.mass;

  // u_k(t) = f_ki dV/dq_i evaluated on a trajectory state
  auto u_at = [&](std::size_t idx, int k) {
    const PhasePoint& s = traj.states[idx];
    const std::vector<double> gv = gradient(blocks.potential, s, cfg);
    double u = 0.0;
    for (int i = 0; i < n; ++i) u += blocks.f.at(k, i)(s) * gv[static_cast<std::size_t>(i)];
    return u;
  };

  ResidualReport report;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double dt = traj.times[i + 1] - traj.times[i];
    const PhasePoint& s = traj.states[i];
    const std::vector<double> gv = gradient(blocks.potential, s, cfg);
    for (int k = 0; k < n; ++k) {
      const double qpp = (traj.states[i + 1][static_cast<std::size_t>(k)] -
                          2.0 * s[static_cast<std::size_t>(k)] +
                          traj.states[i - 1][static_cast<std::size_t>(k)]) /
                         (dt * dt);
      double g_term = 0.0;
      for (int l = 0; l < n; ++l)
        g_term += blocks.g.at(l, k)(s) * s[static_cast<std::size_t>(n + l)] / m;
      const double dudt = (u_at(i + 1, k) - u_at(i - 1, k)) / (2.0 * dt);
      const double rhs = -gv[static_cast<std::size_t>(k)] + g_term + m * dudt;
      report.accumulate("modified_newton", m * qpp - rhs, s);
    }
  }
  return report;
}

ResidualReport lorentz_constraint_residuals(const SouriauModel& model,
                                            const std::vector<PhasePoint>& points,
                                            const DiffConfig& cfg) {
  if (!model.lorentz_blocks)
    throw std::invalid_argument("lorentz_constraint_residuals: model has no Lorentz blocks");
  const LorentzBlocks& lb = *model.lorentz_blocks;
  const double m = lb.mass;

  ResidualReport report;
  for (const auto& p : points) {
    const std::vector<double> gphi = gradient(lb.phi, p, cfg);
    const double b1 = lb.b[0](p), b2 = lb.b[1](p), b3 = lb.b[2](p);
    const double xd1 = p[3], xd2 = p[4], xd3 = p[5];
    auto g = [&](int i, int j) { return lb.g.at(i, j)(p); };

    // The three compatibility expressions, with their printed sign pattern.
    const double c1 = m * g(1, 0) * (gphi[1] - xd1 * b3 + xd2 * b1) +
                      m * g(2, 0) * (gphi[2] - xd2 * b1 + xd1 * b2);
    const double c2 = m * g(0, 1) * (gphi[0] - xd3 * b2 + xd2 * b3) +
                      m * g(2, 1) * (gphi[2] - xd2 * b1 + xd1 * b2);
    const double c3 = m * g(0, 2) * (gphi[0] - xd3 * b2 + xd2 * b3) +
                      m * g(1, 2) * (gphi[1] - xd1 * b3 + xd3 * b1);
    report.accumulate("constraint1", c1, p);
    report.accumulate("constraint2", c2, p);
    report.accumulate("constraint3", c3, p);
  }
  return report;
}

PhasePoint ExoticReduction::to_chart(PointView qp) const {
  return {qp[0] + theta * qp[3], qp[1] - theta * qp[2], qp[2], qp[3]};
}

PhasePoint ExoticReduction::from_chart(PointView xi) const {
  return {xi[0] - theta * xi[3], xi[1] + theta * xi[2], xi[2], xi[3]};
}

ExoticReduction reduce_degenerate_exotic(double theta, double b) {
  if (std::fabs(theta * b - 1.0) > 1e-12)
    throw std::invalid_argument("reduce_degenerate_exotic: requires theta*B = 1");

  // Form matrix in the original chart, row-major two-form components
  // w(d_a, d_b); the chart map is q1 = xi1 - theta p2, q2 = xi2 + theta p1.
  linalg::Mat w(4, 4);
  w(0, 2) = 1.0;  w(2, 0) = -1.0;   // dq1 ^ dp1
  w(1, 3) = 1.0;  w(3, 1) = -1.0;   // dq2 ^ dp2
  w(2, 3) = -theta; w(3, 2) = theta;
  w(0, 1) = -b;   w(1, 0) = b;      // -B dq1 ^ dq2

  linalg::Mat jac(4, 4);  // d(old)/d(new), columns (xi1, xi2, p1, p2)
  jac(0, 0) = 1.0; jac(0, 3) = -theta;
  jac(1, 1) = 1.0; jac(1, 2) = theta;
  jac(2, 2) = 1.0;
  jac(3, 3) = 1.0;

  const linalg::Mat transformed = jac.transposed() * w * jac;

  ExoticReduction red;
  red.theta = theta;
  red.b = b;
  red.chart_aliases = {"xi1", "xi2", "p1", "p2"};
  red.transformed = transformed;

  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int bb = 2; bb < 4; ++bb) {
      worst = std::max(worst, std::fabs(transformed(a, bb)));
      worst = std::max(worst, std::fabs(transformed(bb, a)));
    }
  red.kernel_block_residual = worst;

  linalg::Mat reduced(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) reduced(r, c) = transformed(r, c);
  red.reduced = reduced;

  // Kernel generators (0, theta, 1, 0) and (-theta, 0, 0, 1) become the
  // p-coordinate directions in the chart.
  for (int i = 0; i < 2; ++i) {
    const std::vector<double> x = i == 0 ? std::vector<double>{0.0, theta, 1.0, 0.0}
                                         : std::vector<double>{-theta, 0.0, 0.0, 1.0};
    // push forward by the inverse Jacobian (chart components of the old vector)
    std::vector<double> out(4, 0.0);
    out[0] = x[0] + theta * x[3];
    out[1] = x[1] - theta * x[2];
    out[2] = x[2];
    out[3] = x[3];
    red.kernel_in_chart[static_cast<std::size_t>(i)] = std::move(out);
  }
  return red;
}

VectorFieldSpec leibniz_flow(const MatrixField& g, const ScalarField& h,
                             const DiffConfig& cfg) {
  auto gm = std::make_shared<MatrixField>(g);
  auto hs = std::make_shared<ScalarField>(h);
  return VectorFieldSpec(
      g.space(),
      [gm, hs, cfg](PointView p) {
        const linalg::Mat m = gm->eval(p);
        const std::vector<double> gh = gradient(*hs, p, cfg);
        return m.apply(gh);
      },
      "X_leibniz");
}

}  // namespace ncps::souriau
