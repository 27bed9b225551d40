#include "bep/spectral.hpp"

#include "bep/errors.hpp"

#include <cmath>
#include <string>

namespace bep {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex i_power(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

SpectralField derivative(const SpectralField& f, const MultiIndex& alpha, int max_order) {
  for (int a : alpha) {
    if (a < 0) throw PreconditionError("derivative: negative multi-index entry");
  }
  const int total = order(alpha);
  if (total > max_order) {
    throw PreconditionError("derivative: order " + std::to_string(total) + " exceeds maximum " +
                            std::to_string(max_order));
  }
  if (total == 0) return f;
  const auto geo = geometry(f.grid());
  Eigen::ArrayXd symbol = Eigen::ArrayXd::Ones(f.grid().num_modes());
  for (int c = 0; c < 3; ++c) {
    for (int p = 0; p < alpha[c]; ++p) symbol *= geo->xi_diff[c];
  }
  SpectralField out(f.grid(), f.rank());
  const Complex phase = i_power(total);
  for (int c = 0; c < f.rank(); ++c) out.component(c) = phase * (symbol * f.component(c));
  return out;
}

SpectralField gradient(const SpectralField& f) {
  if (f.rank() != 1) throw PreconditionError("gradient: scalar field required");
  const auto geo = geometry(f.grid());
  SpectralField out(f.grid(), 3);
  for (int c = 0; c < 3; ++c) out.component(c) = kI * (geo->xi_diff[c] * f.component(0));
  return out;
}

SpectralField divergence(const SpectralField& f) {
  if (f.rank() != 3) throw PreconditionError("divergence: vector field required");
  const auto geo = geometry(f.grid());
  SpectralField out(f.grid(), 1);
  for (int c = 0; c < 3; ++c) out.component(0) += kI * (geo->xi_diff[c] * f.component(c));
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const auto geo = geometry(f.grid());
  SpectralField out(f.grid(), f.rank());
  for (int c = 0; c < f.rank(); ++c) out.component(c) = -(geo->xi_diff_squared * f.component(c));
  return out;
}

SpectralField poisson_solve(const SpectralField& rho_diff, double reference_scale) {
  if (rho_diff.rank() != 1) throw PreconditionError("poisson_solve: scalar field required");
  const double scale = std::max(l2_norm(rho_diff), reference_scale);
  const double mean = std::abs(rho_diff.mean_mode());
  if (mean > 1e-10 * scale) {
    throw ChargeImbalanceError("poisson_solve: n1 - n2 has nonzero mean (zero mode " +
                               std::to_string(mean) + ")");
  }
  const auto geo = geometry(rho_diff.grid());
  SpectralField phi(rho_diff.grid(), 1);
  auto out = phi.component(0);
  auto in = rho_diff.component(0);
  for (Eigen::Index m = 1; m < out.size(); ++m) out(m) = -in(m) / geo->xi_squared(m);
  out(0) = 0.0;
  return phi;
}

void dealias_in_place(SpectralField& f) {
  const auto geo = geometry(f.grid());
  for (int c = 0; c < f.rank(); ++c) {
    f.component(c) = geo->dealias_keep.select(f.component(c), Complex(0.0));
  }
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

void zero_nyquist(SpectralField& f) {
  const auto geo = geometry(f.grid());
  for (int c = 0; c < f.rank(); ++c) {
    f.component(c) = geo->nyquist.select(Complex(0.0), f.component(c));
  }
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  if (f.grid() != g.grid() || f.rank() != g.rank()) {
    throw PreconditionError("inner_product: grid or rank mismatch");
  }
  const auto geo = geometry(f.grid());
  double sum = 0.0;
  for (int c = 0; c < f.rank(); ++c) {
    sum += (geo->weight * (f.component(c).conjugate() * g.component(c)).real()).sum();
  }
  return sum;
}

double l2_norm(const SpectralField& f) {
  const auto geo = geometry(f.grid());
  double sum = 0.0;
  for (int c = 0; c < f.rank(); ++c) sum += (geo->weight * f.component(c).abs2()).sum();
  return std::sqrt(sum);
}

double l2_norm(const RealField& f) {
  const double cell = std::pow(f.grid().spacing(), 3);
  return std::sqrt(f.values().square().sum() * cell);
}

}  // namespace bep
