#include "support.hpp"

#include "bep/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace bep;
using bep::test::kTwoPi;

TEST_CASE("constant field maps to the zero mode") {
  const Grid grid(8, kTwoPi);
  const auto s = to_spectral(sample(grid, [](double, double, double) { return 2.5; }));
  CHECK(std::abs(s.mean_mode() - Complex(2.5 * std::sqrt(grid.volume()))) < 1e-12);
  CHECK(s.coeffs().bottomRows(s.coeffs().rows() - 1).abs().maxCoeff() < 1e-12);
}

TEST_CASE("single cosine occupies the two modes k = +-(1,0,0)") {
  const Grid grid(8, 3.0);
  const double L = grid.box_length();
  const auto s = to_spectral(sample(grid, [&](double x, double, double) {
    return std::cos(kTwoPi * x / L);
  }));
  const double half = 0.5 * std::sqrt(grid.volume());
  CHECK(std::abs(s.coefficient(1, 0, 0) - half) < 1e-12);
  CHECK(std::abs(s.coefficient(-1, 0, 0) - half) < 1e-12);
  double rest = 0.0;
  for (int k0 = -4; k0 < 4; ++k0)
    for (int k1 = -4; k1 < 4; ++k1)
      for (int k2 = -4; k2 < 4; ++k2)
        if (!(std::abs(k0) == 1 && k1 == 0 && k2 == 0))
          rest = std::max(rest, std::abs(s.coefficient(k0, k1, k2)));
  CHECK(rest < 1e-12);
}

TEST_CASE("round trip, Parseval and linearity on random fields") {
  const Grid grid(16, 7.0);
  const auto f = test::random_field(grid, 3, 11);
  const auto g = test::random_field(grid, 3, 12);
  const auto sf = to_spectral(f);
  const double scale = f.values().abs().maxCoeff();
  CHECK(test::max_abs_diff(to_physical(sf), f) < 1e-12 * scale);
  CHECK(std::abs(l2_norm(sf) - l2_norm(f)) < 1e-12 * l2_norm(f));
  CHECK(sf.hermitian_defect() < 1e-12 * sf.coeffs().abs().maxCoeff());

  RealField combo(grid, f.values() * 2.0 - g.values() * 0.5);
  const auto lhs = to_spectral(combo);
  const auto rhs = 2.0 * sf - 0.5 * to_spectral(g);
  CHECK((lhs.coeffs() - rhs.coeffs()).abs().maxCoeff() < 1e-12 * lhs.coeffs().abs().maxCoeff());
}

TEST_CASE("non-finite samples are rejected") {
  const Grid grid(8, 1.0);
  RealField f(grid, 1);
  f.values()(3, 0) = std::nan("");
  CHECK_THROWS_AS(to_spectral(f), NonFiniteError);
}

TEST_CASE("derivatives") {
  const Grid grid(16, kTwoPi);
  const auto c = to_spectral(sample(grid, [](double x, double, double) { return std::cos(x); }));
  const auto d = to_physical(derivative(c, {1, 0, 0}));
  const auto expect = sample(grid, [](double x, double, double) { return -std::sin(x); });
  CHECK(test::max_abs_diff(d, expect) < 1e-13);

  const auto constant = to_spectral(sample(grid, [](double, double, double) { return 4.0; }));
  CHECK(gradient(constant).coeffs().abs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(derivative(c, {2, 2, 1}), PreconditionError);
  CHECK_NOTHROW(derivative(c, {2, 2, 1}, 5));
}

TEST_CASE("mixed derivative of exp(sin x1 + sin x2) at n = 32") {
  const Grid grid(32, kTwoPi);
  const auto f = sample(grid, [](double x, double y, double) {
    return std::exp(std::sin(x) + std::sin(y));
  });
  const auto exact = sample(grid, [](double x, double y, double) {
    return std::cos(x) * std::cos(y) * std::exp(std::sin(x) + std::sin(y));
  });
  const auto d = to_physical(derivative(to_spectral(f), {1, 1, 0}));
  CHECK(test::max_abs_diff(d, exact) < 1e-10);
}

TEST_CASE("spectral convergence of the derivative of exp(sin x1)") {
  auto error = [](int n) {
    const Grid grid(n, kTwoPi);
    const auto f = sample(grid, [](double x, double, double) { return std::exp(std::sin(x)); });
    const auto exact = sample(grid, [](double x, double, double) {
      return std::cos(x) * std::exp(std::sin(x));
    });
    return test::max_abs_diff(to_physical(derivative(to_spectral(f), {1, 0, 0})), exact);
  };
  const double e16 = error(16);
  const double e32 = error(32);
  CHECK(e16 > 0.0);
  CHECK(e16 / std::max(e32, 1e-300) >= 100.0);
}

TEST_CASE("gradient, divergence and laplacian agree") {
  const Grid grid(16, 5.0);
  const auto f = to_spectral(test::random_field(grid, 1, 3));
  const auto lhs = divergence(gradient(f));
  const auto rhs = laplacian(f);
  CHECK((lhs.coeffs() - rhs.coeffs()).abs().maxCoeff() < 1e-12 * rhs.coeffs().abs().maxCoeff());
}

TEST_CASE("poisson solve") {
  const Grid grid(16, kTwoPi);
  const auto rho = to_spectral(sample(grid, [](double x, double, double) { return std::cos(x); }));
  const auto phi = poisson_solve(rho);
  const auto expect = sample(grid, [](double x, double, double) { return -std::cos(x); });
  CHECK(test::max_abs_diff(to_physical(phi), expect) < 1e-13);
  const auto grad = to_physical(gradient(phi));
  const auto sinx = sample(grid, [](double x, double, double) { return std::sin(x); });
  CHECK((grad.component(0) - sinx.component(0)).abs().maxCoeff() < 1e-13);
  CHECK(grad.component(1).abs().maxCoeff() < 1e-13);

  const SpectralField zero(grid, 1);
  CHECK(poisson_solve(zero).coeffs().abs().maxCoeff() == 0.0);

  // Nyquist modes of the input are not reproduced by the discrete Laplacian,
  // so the random check uses a band-limited field.
  const auto r = to_spectral(test::random_field(grid, 1, 5, 7, true));
  const auto back = laplacian(poisson_solve(r));
  CHECK(l2_norm(back - r) / l2_norm(r) < 1e-12);

  const auto biased = to_spectral(sample(grid, [](double x, double, double) {
    return 0.1 + std::cos(x);
  }));
  CHECK_THROWS_AS(poisson_solve(biased), ChargeImbalanceError);
}

TEST_CASE("poisson tolerance follows the reference scale") {
  const Grid grid(8, kTwoPi);
  SpectralField rho(grid, 1);
  rho.coeffs()(0, 0) = 1e-9;
  CHECK_THROWS_AS(poisson_solve(rho), ChargeImbalanceError);
  CHECK_NOTHROW(poisson_solve(rho, 100.0));
}

TEST_CASE("dealias") {
  const Grid grid(24, kTwoPi);
  const int n = grid.points_per_axis();
  const auto band = to_spectral(test::random_field(grid, 1, 9, n / 3));
  CHECK((dealias(band).coeffs() - band.coeffs()).abs().maxCoeff() < 1e-12 * band.coeffs().abs().maxCoeff());

  const auto high = to_spectral(sample(grid, [&](double x, double, double) {
    return std::cos((n / 2 - 1) * x);
  }));
  CHECK(dealias(high).coeffs().abs().maxCoeff() < 1e-12 * high.coeffs().abs().maxCoeff());

  // Convolution oracle: cos(a.x) cos(b.x) = (cos((a+b).x) + cos((a-b).x)) / 2.
  auto mode = [&](int k0, int k1, int k2) {
    return sample(grid, [=](double x, double y, double z) { return std::cos(k0 * x + k1 * y + k2 * z); });
  };
  const auto f = to_physical(dealias(to_spectral(mode(3, 1, 0))));
  const auto g = to_physical(dealias(to_spectral(mode(2, -2, 1))));
  RealField prod(grid, f.values() * g.values());
  const auto expect = to_spectral(RealField(grid, 0.5 * (mode(5, -1, 1).values() + mode(1, 3, -1).values())));
  CHECK((to_spectral(prod).coeffs() - expect.coeffs()).abs().maxCoeff() < 1e-12 * std::sqrt(grid.volume()));
}

TEST_CASE("inner product matches the physical integral") {
  const Grid grid(16, 4.0);
  const auto f = test::random_field(grid, 3, 21);
  const auto g = test::random_field(grid, 3, 22);
  const double cell = std::pow(grid.spacing(), 3);
  const double physical = (f.values() * g.values()).sum() * cell;
  CHECK(std::abs(inner_product(to_spectral(f), to_spectral(g)) - physical) < 1e-12 * l2_norm(f) * l2_norm(g));
}
