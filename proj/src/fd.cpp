#include "ncps/fd.hpp"

#include <cmath>
#include <memory>

namespace ncps::fd {

namespace {

// Levi-Civita on {0,1,2}
double eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
      (i == 2 && j == 0 && k == 1))
    return 1.0;
  return -1.0;
}

}  // namespace

SpacePtr velocity_space(std::map<std::string, double> params) {
  return PhaseSpace::make({"x1", "x2", "x3", "xd1", "xd2", "xd3"}, std::move(params));
}

EMFields extract_fields(const ForceLaw& fl, const DiffConfig& cfg) {
  const SpacePtr space = fl.f[0].space();
  auto force = std::make_shared<std::array<ScalarField, 3>>(fl.f);

  EMFields out;
  for (int k = 0; k < 3; ++k) {
    out.b[static_cast<std::size_t>(k)] = ScalarField(
        space,
        [force, cfg, k](PointView p) {
          double s = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              const double e = eps(i, j, k);
              if (e == 0.0) continue;
              s += e * partial((*force)[static_cast<std::size_t>(j)], p, 3 + i, cfg);
            }
          return -0.5 * s;
        },
        "B" + std::to_string(k + 1));
  }
  auto b_fields = std::make_shared<std::array<ScalarField, 3>>(out.b);
  for (int j = 0; j < 3; ++j) {
    out.e[static_cast<std::size_t>(j)] = ScalarField(
        space,
        [force, b_fields, j](PointView p) {
          double s = (*force)[static_cast<std::size_t>(j)](p);
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              const double e = eps(j, k, l);
              if (e == 0.0) continue;
              s -= e * p[static_cast<std::size_t>(3 + k)] *
                   (*b_fields)[static_cast<std::size_t>(l)](p);
            }
          return s;
        },
        "E" + std::to_string(j + 1));
  }
  return out;
}

ResidualReport dyson_consistency(const ForceLaw&, const EMFields& fields,
                                 const std::vector<PhasePoint>& points,
                                 const DiffConfig& cfg) {
  // the fields already close over the force law; the parameter pins the API
  ResidualReport report;
  for (const auto& p : points) {
    for (int k = 0; k < 3; ++k)
      for (int r = 0; r < 3; ++r)
        report.accumulate("B_velocity_dependence",
                          partial(fields.b[static_cast<std::size_t>(k)], p, 3 + r, cfg), p);

    double div_b = 0.0;
    for (int k = 0; k < 3; ++k)
      div_b += partial(fields.b[static_cast<std::size_t>(k)], p, k, cfg);
    report.accumulate("div_B", div_b, p);

    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      const double curl_k = partial(fields.e[static_cast<std::size_t>(j)], p, i, cfg) -
                            partial(fields.e[static_cast<std::size_t>(i)], p, j, cfg);
      report.accumulate("rot_E", curl_k, p);
    }

    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        report.accumulate("E_velocity_dependence",
                          partial(fields.e[static_cast<std::size_t>(j)], p, 3 + i, cfg), p);
  }
  return report;
}

ResidualReport nc_consistency(const MatrixField& g, const MatrixField& bracket_vv, double m,
                              const std::vector<PhasePoint>& points, const DiffConfig& cfg) {
  ResidualReport report;
  for (const auto& p : points) {
    const linalg::Mat vv = bracket_vv.eval(p);

    // R1_ijk = -(1/m) dg_ij/dx_k + {xd_k, xd_l} dg_ij/dxd_l
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double r1 = -partial(g.at(i, j), p, k, cfg) / m;
          for (int l = 0; l < 3; ++l) r1 += vv(k, l) * partial(g.at(i, j), p, 3 + l, cfg);
          report.accumulate("bracket_compat", r1, p);
        }

    // R2_ijk = g_il dg_jk/dx_l + g_kl dg_ij/dx_l + g_jl dg_ki/dx_l
    //          + (1/m)(dg_jk/dxd_i + dg_ij/dxd_k + dg_ki/dxd_j)
    const linalg::Mat gm = g.eval(p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          if (i == j || j == k || i == k) continue;
          double sn = 0.0;
          for (int l = 0; l < 3; ++l)
            sn += gm(i, l) * partial(g.at(j, k), p, l, cfg) +
                  gm(k, l) * partial(g.at(i, j), p, l, cfg) +
                  gm(j, l) * partial(g.at(k, i), p, l, cfg);
          const double dxd = (partial(g.at(j, k), p, 3 + i, cfg) +
                              partial(g.at(i, j), p, 3 + k, cfg) +
                              partial(g.at(k, i), p, 3 + j, cfg)) /
                             m;
          report.accumulate("jacobi_xxx_sn", sn, p);
          report.accumulate("jacobi_xxx_dxd", dxd, p);
          report.accumulate("jacobi_xxx", sn + dxd, p);
        }
  }
  return report;
}

ResidualReport modified_maxwell_residuals(const std::array<ScalarField, 3>& b,
                                          const std::array<ScalarField, 3>& e, double m,
                                          const std::vector<PhasePoint>& points,
                                          const DiffConfig& cfg) {
  ResidualReport report;
  for (const auto& p : points) {
    double div_b = 0.0;
    for (int k = 0; k < 3; ++k) div_b += partial(b[static_cast<std::size_t>(k)], p, k, cfg);

    // curl of B in the velocity directions
    std::array<double, 3> curl_xd_b;
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      curl_xd_b[static_cast<std::size_t>(k)] =
          partial(b[static_cast<std::size_t>(j)], p, 3 + i, cfg) -
          partial(b[static_cast<std::size_t>(i)], p, 3 + j, cfg);
    }
    double b_dot_curl = 0.0;
    std::array<double, 3> bv;
    for (int k = 0; k < 3; ++k) {
      bv[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)](p);
      b_dot_curl += bv[static_cast<std::size_t>(k)] * curl_xd_b[static_cast<std::size_t>(k)];
    }
    report.accumulate("gauss_mod", div_b + b_dot_curl / m, p);

    std::array<double, 3> ev;
    double div_xd_e = 0.0;
    for (int j = 0; j < 3; ++j) {
      ev[static_cast<std::size_t>(j)] = e[static_cast<std::size_t>(j)](p);
      div_xd_e += partial(e[static_cast<std::size_t>(j)], p, 3 + j, cfg);
    }

    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      const double rot_e_k = partial(e[static_cast<std::size_t>(j)], p, i, cfg) -
                             partial(e[static_cast<std::size_t>(i)], p, j, cfg);
      double e_gradxd_bk = 0.0;  // (E . grad_xd) B_k
      for (int l = 0; l < 3; ++l)
        e_gradxd_bk +=
            ev[static_cast<std::size_t>(l)] * partial(b[static_cast<std::size_t>(k)], p, 3 + l, cfg);
      double b_dot_de_dxdk = 0.0;  // B . dE/dxd_k
      for (int l = 0; l < 3; ++l)
        b_dot_de_dxdk +=
            bv[static_cast<std::size_t>(l)] * partial(e[static_cast<std::size_t>(l)], p, 3 + k, cfg);
      const double resid =
          rot_e_k + (e_gradxd_bk + b_dot_de_dxdk - div_xd_e * bv[static_cast<std::size_t>(k)]) / m;
      report.accumulate("faraday_mod", resid, p);
    }
  }
  return report;
}

}  // namespace ncps::fd
