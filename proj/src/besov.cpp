#include "bep/besov.hpp"

#include "bep/errors.hpp"
#include "bep/spectral.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>

namespace bep {

namespace {

double smooth_step(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

Eigen::ArrayXd block_symbol(const Grid& grid, int j) {
  const auto geo = geometry(grid);
  return geo->xi_abs.unaryExpr([j](double r) { return BesovPartition::phi(j, r); });
}

}  // namespace

double BesovPartition::eta(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = smooth_step(2.0 - r);
  return a / (a + smooth_step(r - 1.0));
}

double BesovPartition::phi(double r) { return eta(r) - eta(2.0 * r); }

double BesovPartition::phi(int j, double r) { return phi(std::ldexp(r, -j)); }

int BesovPartition::j_min(const Grid& grid) {
  return static_cast<int>(std::floor(std::log2(2.0 * std::numbers::pi / grid.box_length()))) - 1;
}

int BesovPartition::j_max(const Grid& grid) {
  return static_cast<int>(
             std::ceil(std::log2(std::numbers::pi * grid.points_per_axis() / grid.box_length()))) +
         1;
}

double BesovPartition::partition_defect(const Grid& grid) {
  const auto geo = geometry(grid);
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(grid.num_modes());
  for (int j = j_min(grid); j <= j_max(grid); ++j) sum += block_symbol(grid, j);
  return (sum.tail(sum.size() - 1) - 1.0).abs().maxCoeff();
}

DyadicBlock dyadic_block(const SpectralField& f, int j) {
  const Eigen::ArrayXd sym = block_symbol(f.grid(), j);
  SpectralField out(f.grid(), f.rank());
  for (int c = 0; c < f.rank(); ++c) out.component(c) = sym * f.component(c);
  return {j, out};
}

std::vector<BlockNorm> besov_blocks(const SpectralField& f) {
  const auto geo = geometry(f.grid());
  Eigen::ArrayXd power = Eigen::ArrayXd::Zero(f.grid().num_modes());
  for (int c = 0; c < f.rank(); ++c) power += geo->weight * f.component(c).abs2();
  std::vector<BlockNorm> out;
  for (int j = BesovPartition::j_min(f.grid()); j <= BesovPartition::j_max(f.grid()); ++j) {
    out.push_back({j, std::sqrt((block_symbol(f.grid(), j).square() * power).sum())});
  }
  return out;
}

double besov_norm(const SpectralField& f, double s) {
  if (!(s > 0.0 && s <= 1.5)) throw PreconditionError("besov_norm: s must be in (0, 3/2]");
  const double scale = l2_norm(f);
  for (int c = 0; c < f.rank(); ++c) {
    if (std::abs(f.mean_mode(c)) > 1e-10 * scale) {
      throw InfiniteNormError("besov_norm: negative order requires a zero-mean field on the torus");
    }
  }
  double sup = 0.0;
  for (const auto& b : besov_blocks(f)) sup = std::max(sup, std::pow(2.0, -s * b.j) * b.norm);
  return sup;
}

double besov_embedding_constant(double s) {
  auto neg = [s](double x) { return -std::pow(x, s) * BesovPartition::phi(x); };
  double best_x = 1.0;
  double best = neg(1.0);
  constexpr int samples = 3000;
  for (int i = 0; i <= samples; ++i) {
    const double x = 0.5 + 1.5 * i / samples;
    if (neg(x) < best) {
      best = neg(x);
      best_x = x;
    }
  }
  const double step = 1.5 / samples;
  const auto r = boost::math::tools::brent_find_minima(neg, std::max(0.5, best_x - step),
                                                       std::min(2.0, best_x + step), 52);
  return -std::min(best, r.second);
}

}  // namespace bep
