#pragma once

#include "bep/fft.hpp"
#include "bep/solver.hpp"

#include <array>
#include <cmath>

namespace bep::test {

/// s * exp(a sin x1 + b cos x2 + c sin x3) with its analytic gradient.
struct ExpTrig {
  double scale, a, b, c;

  double value(double x1, double x2, double x3) const {
    return scale * std::exp(a * std::sin(x1) + b * std::cos(x2) + c * std::sin(x3));
  }
  std::array<double, 3> grad(double x1, double x2, double x3) const {
    const double v = value(x1, x2, x3);
    return {a * std::cos(x1) * v, -b * std::sin(x2) * v, c * std::cos(x3) * v};
  }
};

/// Smooth steady state on the 2 pi box, held fixed by an analytic forcing
/// F = -rhs_continuum(q*). Species 2 density is n1* + 2 phi* so that
/// Lap phi* = n1* - n2* for phi* = e sin x1 cos x2.
struct Manufactured {
  ExpTrig n1{0.1, 0.5, 0.4, 0.3};
  std::array<ExpTrig, 3> u1{ExpTrig{0.05, 0.3, 0.2, 0.4}, ExpTrig{-0.04, 0.2, 0.5, 0.1}, ExpTrig{0.03, 0.4, 0.3, 0.2}};
  std::array<ExpTrig, 3> u2{ExpTrig{-0.02, 0.1, 0.4, 0.3}, ExpTrig{0.06, 0.3, 0.1, 0.5}, ExpTrig{0.01, 0.5, 0.2, 0.2}};
  double e = 0.05;
  PressureLaw pressure{5.0 / 3.0};

  double phi(double x1, double x2, double) const { return e * std::sin(x1) * std::cos(x2); }
  std::array<double, 3> grad_phi(double x1, double x2, double) const {
    return {e * std::cos(x1) * std::cos(x2), -e * std::sin(x1) * std::sin(x2), 0.0};
  }

  struct Point {
    double n[2];
    std::array<double, 3> u[2];
    std::array<double, 3> dn[2];
    std::array<std::array<double, 3>, 3> du[2];  ///< du[i][c][d] = d_d u_c
    std::array<double, 3> dphi;
  };

  Point at(double x1, double x2, double x3) const {
    Point p{};
    p.dphi = grad_phi(x1, x2, x3);
    p.n[0] = n1.value(x1, x2, x3);
    p.dn[0] = n1.grad(x1, x2, x3);
    p.n[1] = p.n[0] + 2.0 * phi(x1, x2, x3);
    for (int d = 0; d < 3; ++d) p.dn[1][d] = p.dn[0][d] + 2.0 * p.dphi[d];
    for (int c = 0; c < 3; ++c) {
      p.u[0][c] = u1[c].value(x1, x2, x3);
      p.u[1][c] = u2[c].value(x1, x2, x3);
      p.du[0][c] = u1[c].grad(x1, x2, x3);
      p.du[1][c] = u2[c].grad(x1, x2, x3);
    }
    return p;
  }

  FluidState state(const Grid& grid) const {
    FluidState s(grid);
    const int n = grid.points_per_axis();
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          const auto idx = grid.point_index(i0, i1, i2);
          const Point p = at(grid.coordinate(i0), grid.coordinate(i1), grid.coordinate(i2));
          s.n1.values()(idx, 0) = p.n[0];
          s.n2.values()(idx, 0) = p.n[1];
          for (int c = 0; c < 3; ++c) {
            s.u1.values()(idx, c) = p.u[0][c];
            s.u2.values()(idx, c) = p.u[1][c];
          }
        }
    return s;
  }

  /// Continuum right-hand side at q*, negated.
  SpectralField forcing(const Grid& grid) const {
    RealField f(grid, kStateRank);
    const int n = grid.points_per_axis();
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          const auto idx = grid.point_index(i0, i1, i2);
          const Point p = at(grid.coordinate(i0), grid.coordinate(i1), grid.coordinate(i2));
          for (int i = 0; i < 2; ++i) {
            const double sign = i == 0 ? 1.0 : -1.0;
            const double div = p.du[i][0][0] + p.du[i][1][1] + p.du[i][2][2];
            double adv_n = 0.0;
            for (int d = 0; d < 3; ++d) adv_n += p.u[i][d] * p.dn[i][d];
            f.values()(idx, 4 * i) = div + adv_n + p.n[i] * div;
            const double h = pressure.enthalpy_defect(p.n[i]);
            for (int c = 0; c < 3; ++c) {
              double adv = 0.0;
              for (int d = 0; d < 3; ++d) adv += p.u[i][d] * p.du[i][c][d];
              const double rhs = -p.u[i][c] - adv - (1.0 + h) * p.dn[i][c] + sign * p.dphi[c];
              f.values()(idx, 4 * i + 1 + c) = -rhs;
            }
          }
        }
    return to_spectral(f);
  }
};

/// Max abs error of the forced run from q* after time t_end at fixed dt.
inline double manufactured_error(int n, double t_end = 0.5, double dt = 0.01) {
  const Manufactured m;
  SolverConfig cfg;
  cfg.grid = Grid(n, 2.0 * M_PI);
  cfg.pressure = m.pressure;
  const SpectralField forcing = m.forcing(cfg.grid);
  cfg.forcing = [forcing](double, const Grid&) { return forcing; };
  const FluidState exact = m.state(cfg.grid);
  SpectralState s = to_spectral(exact);
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i < steps; ++i) s = advance(s, cfg, dt);
  const FluidState got = to_physical(s);
  double err = 0.0;
  err = std::max(err, (got.n1.values() - exact.n1.values()).abs().maxCoeff());
  err = std::max(err, (got.n2.values() - exact.n2.values()).abs().maxCoeff());
  err = std::max(err, (got.u1.values() - exact.u1.values()).abs().maxCoeff());
  err = std::max(err, (got.u2.values() - exact.u2.values()).abs().maxCoeff());
  return err;
}

}  // namespace bep::test
