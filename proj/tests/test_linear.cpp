#include "bep/errors.hpp"
#include "bep/linear.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bep;
using C = std::complex<double>;

namespace {

ModeSystem mode(Branch branch, double rho, C a, C b, C perp = {}) {
  ModeSystem m;
  m.branch = branch;
  m.rho = rho;
  m.a = a;
  m.b = b;
  m.transverse(1) = perp;
  return m;
}

// Least-squares slope of log(value) against log(1 + t) on log-spaced times.
double loglog_slope(const SpectralProfile& p, Branch branch, const NormSpec& spec, double t0, double t1) {
  const int n = 17;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double t = t0 * std::pow(t1 / t0, double(i) / (n - 1));
    const double x = std::log1p(t), y = std::log(linear_norm(p, branch, spec, t));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("eigenvalues") {
  const auto d = eigenvalues(Branch::difference, 1.0);
  CHECK(std::abs(d[0] - C(-0.5, 0.5 * std::sqrt(11.0))) < 1e-15);
  CHECK(std::abs(d[1] - C(-0.5, -0.5 * std::sqrt(11.0))) < 1e-15);
  const auto s = eigenvalues(Branch::sum, 1.0);
  CHECK(std::abs(s[0] - C(-0.5, 0.5 * std::sqrt(3.0))) < 1e-15);

  for (double rho : {1e-4, 0.01, 0.3, 0.5, 0.7, 2.0, 50.0}) {
    for (Branch b : {Branch::sum, Branch::difference}) {
      for (const C& lambda : eigenvalues(b, rho)) {
        CHECK(lambda.real() < 0.0);
        CHECK(std::abs(lambda * lambda + lambda + omega_squared(b, rho)) < 1e-12 * (1.0 + rho * rho));
      }
    }
    CHECK(eigenvalues(Branch::difference, rho)[0].real() == -0.5);
  }
  for (double rho : {1e-5, 1e-3, 0.05, 0.1}) {
    CHECK(std::abs(eigenvalues(Branch::sum, rho)[0].real() + rho * rho) <= 2.0 * std::pow(rho, 4));
  }
  CHECK_THROWS_AS(eigenvalues(Branch::sum, 0.0), PreconditionError);
}

TEST_CASE("propagation basics") {
  const auto m = mode(Branch::sum, 0.8, 1.0, C(0, 0.3), C(0.2, -0.1));
  const auto w = propagate_mode(m, 0.0);
  CHECK(w.a == m.a);
  CHECK(w.b == m.b);
  const auto later = propagate_mode(m, 2.5);
  CHECK(std::abs(later.transverse(1) - std::exp(-2.5) * m.transverse(1)) < 1e-16);
  CHECK_THROWS_AS(propagate_mode(m, -1.0), PreconditionError);
  CHECK_THROWS_AS(propagate_mode(mode(Branch::sum, -1.0, 1.0, 0.0), 1.0), PreconditionError);
}

TEST_CASE("semigroup property across the repeated root") {
  for (double rho : {0.5, 0.5 + 1e-9, 0.5 - 1e-6, 0.5 + 1e-3, 0.1, 3.0}) {
    for (Branch b : {Branch::sum, Branch::difference}) {
      const Eigen::Matrix2d lhs = propagator(b, rho, 7.0);
      const Eigen::Matrix2d rhs = propagator(b, rho, 3.0) * propagator(b, rho, 4.0);
      CHECK((lhs - rhs).norm() < 1e-13 * (1.0 + lhs.norm()) * (1.0 + rho * rho));
    }
  }
  // Continuity through the series switch.
  const Eigen::Matrix2d at = propagator(Branch::sum, 0.5, 30.0);
  const Eigen::Matrix2d near = propagator(Branch::sum, 0.5 + 1e-7, 30.0);
  CHECK((at - near).norm() < 1e-8);
}

TEST_CASE("closed form against the ODE oracle") {
  CHECK(mode_matrix_check(mode(Branch::sum, 0.5, 1.0, 0.5), 0.0) == 0.0);
  CHECK(mode_matrix_check(mode(Branch::sum, 0.5, 1.0, C(0, 0.5), 0.3), 1000.0) < 1e-9);
  CHECK(mode_matrix_check(mode(Branch::difference, 10.0, 1.0, C(0, 10.0)), 100.0) < 1e-9);
  for (double rho : {1e-3, 0.2, 0.4999, 0.5001, 1.0, 3.0}) {
    for (Branch b : {Branch::sum, Branch::difference}) {
      for (double t : {0.5, 10.0, 200.0}) {
        CHECK(mode_matrix_check(mode(b, rho, C(0.3, 1.0), C(-0.2, rho), 0.5), t) < 1e-9);
      }
    }
  }
}

TEST_CASE("mode energy dissipates") {
  for (Branch b : {Branch::sum, Branch::difference}) {
    for (double rho : {0.05, 0.5, 2.0}) {
      const auto m0 = mode(b, rho, C(1.0, 0.2), C(0.0, rho), 0.4);
      const double dt = 1e-4;
      for (double t = 0.0; t < 20.0; t += 0.37) {
        const double e1 = mode_energy(propagate_mode(m0, t));
        const double e2 = mode_energy(propagate_mode(m0, t + dt));
        CHECK((e2 - e1) / dt <= 1e-10);
        const auto m = propagate_mode(m0, t + dt / 2);
        const double rate = -2.0 * std::norm(m.b) / (rho * rho) - 2.0 * m.transverse.squaredNorm();
        CHECK(std::abs((e2 - e1) / dt - rate) < 1e-6 * (1.0 + std::abs(rate)));
      }
    }
  }
}

TEST_CASE("radial norms at t = 0 against closed forms") {
  const double w = 2.0;
  const auto g = SpectralProfile::gaussian(w);
  const double pi = std::numbers::pi;
  // 4 pi int rho^2 exp(-w^2 rho^2/2) = 4 pi (sqrt(pi)/4) (w^2/2)^{-3/2}
  const double l2 = std::sqrt(4.0 * pi * std::sqrt(pi) / 4.0 * std::pow(w * w / 2.0, -1.5));
  CHECK(linear_norm(g, Branch::sum, parse_norm_spec("lp:2,field=density"), 0.0) ==
        doctest::Approx(l2).epsilon(1e-8));
  // 4 pi int exp(-w^2 rho^2/2) = 2 pi sqrt(2 pi) / w
  const double hm1 = std::sqrt(2.0 * pi * std::sqrt(2.0 * pi) / w);
  CHECK(linear_norm(g, Branch::sum, parse_norm_spec("hdot:-1,field=density"), 0.0) ==
        doctest::Approx(hm1).epsilon(1e-8));
  // Power law rho^sigma on [0, 1] with smooth cutoff: compare the L2 norm with
  // 4 pi/(2 sigma + 3) on the part where eta = 1 plus a positive remainder.
  const auto p = SpectralProfile::powerlaw(-1.2);
  const double inner = 4.0 * pi / (2.0 * -1.2 + 3.0);
  const double full = std::pow(linear_norm(p, Branch::sum, parse_norm_spec("lp:2,field=density"), 0.0), 2);
  CHECK(full > inner);
  CHECK(full < inner + 4.0 * pi * (std::pow(2.0, 0.6) - 1.0) / 0.6);
}

TEST_CASE("divergent radial norms are reported") {
  for (double s : {0.0, 0.5, 1.0}) {
    const auto p = SpectralProfile::powerlaw(s - 1.5 + 0.05);
    const auto ok = parse_norm_spec("hdot:" + std::to_string(-s) + ",field=density");
    CHECK(std::isfinite(linear_norm(p, Branch::sum, ok, 0.0)));
    const auto bad = parse_norm_spec("hdot:" + std::to_string(-s - 0.2) + ",field=density");
    CHECK_THROWS_AS(linear_norm(p, Branch::sum, bad, 0.0), InfiniteNormError);
  }
  const auto p = SpectralProfile::powerlaw(-1.45);
  CHECK_THROWS_AS(linear_norm(p, Branch::sum, parse_norm_spec("besov:0.5,field=density"), 0.0),
                  InfiniteNormError);
  CHECK(std::isfinite(linear_norm(p, Branch::sum, parse_norm_spec("besov:0.05,field=density"), 0.0)));
  CHECK_THROWS_AS(linear_norm(p, Branch::sum, parse_norm_spec("lp:2,field=field"), 0.0), PreconditionError);
  CHECK_THROWS_AS(linear_norm(p, Branch::sum, parse_norm_spec("lp:3,field=density"), 0.0), PreconditionError);
}

TEST_CASE("difference branch stays under the e^{-0.45 t} envelope") {
  for (const auto& p : {SpectralProfile::powerlaw(0.05), SpectralProfile::gaussian(1.0),
                        SpectralProfile::powerlaw(-1.0, 4.0)}) {
    const auto spec = parse_norm_spec("lp:2,field=density");
    const double n0 = linear_norm(p, Branch::difference, spec, 0.0);
    for (double t = 1.0; t <= 20.0; t += 0.25) {
      CHECK(linear_norm(p, Branch::difference, spec, t) <= std::exp(-0.45 * t) * n0);
    }
  }
}

TEST_CASE("derivative gain of one half per order") {
  const auto p = SpectralProfile::powerlaw(0.05);
  double prev = 0.0;
  for (int l = 0; l <= 2; ++l) {
    const auto spec = parse_norm_spec("lp:2,field=density,d=" + std::to_string(l));
    const double slope = loglog_slope(p, Branch::sum, spec, 1e2, 1e4);
    if (l > 0) CHECK(std::abs(slope - prev + 0.5) < 0.03);
    prev = slope;
  }
}

TEST_CASE("series sampling") {
  const auto series = norm_evolution(SpectralProfile::gaussian(1.0), Branch::sum,
                                     parse_norm_spec("lp:2,field=total"), {0.0, 1.0, 2.0});
  CHECK(series.size() == 3);
  CHECK(series.values[0] > series.values[2]);
  CHECK_THROWS_AS(norm_evolution(SpectralProfile::gaussian(1.0), Branch::sum,
                                 parse_norm_spec("lp:2"), {1.0, 1.0}),
                  PreconditionError);
}

TEST_CASE("predicted exponents") {
  const DataClass b32{DataClassKind::neg_sobolev, 1.5};
  CHECK(predicted_exponent(0, b32, Quantity::carrier) == -0.75);
  CHECK(predicted_exponent(0, b32, Quantity::disparity) == -1.25);
  CHECK(predicted_exponent(1, DataClass{DataClassKind::lp, 2.0}, Quantity::carrier) == -0.5);
  CHECK(predicted_exponent(0, DataClass{DataClassKind::lp, 1.0}, Quantity::carrier) == -0.75);
  CHECK(predicted_exponent(2, b32, Quantity::carrier) == -1.75);
  CHECK_THROWS_AS(predicted_exponent(2, b32, Quantity::disparity), PreconditionError);
  CHECK_THROWS_AS(predicted_exponent(3, b32, Quantity::carrier), PreconditionError);
  CHECK_THROWS_AS(predicted_exponent(0, DataClass{DataClassKind::neg_sobolev, 1.6}, Quantity::carrier),
                  PreconditionError);
  CHECK_THROWS_AS(predicted_exponent(0, DataClass{DataClassKind::lp, 0.9}, Quantity::carrier),
                  PreconditionError);
}
