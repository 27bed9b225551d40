#include "bep/grid.hpp"

#include "bep/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace bep {

Grid::Grid(int points_per_axis, double box_length) : n_(points_per_axis), length_(box_length) {
  if (n_ < 8 || n_ % 2 != 0) {
    throw PreconditionError("grid: points per axis must be even and >= 8, got " +
                            std::to_string(n_));
  }
  if (!(length_ > 0.0) || !std::isfinite(length_)) {
    throw PreconditionError("grid: box length must be positive and finite");
  }
}

double Grid::frequency(int k) const { return 2.0 * std::numbers::pi * k / length_; }

double Grid::fundamental() const { return 2.0 * std::numbers::pi / length_; }

namespace {

std::shared_ptr<const SpectralGeometry> build_geometry(const Grid& grid) {
  const int n = grid.points_per_axis();
  const int half = grid.half_extent();
  const Eigen::Index modes = grid.num_modes();

  auto g = std::make_shared<SpectralGeometry>();
  for (auto& a : g->xi) a.resize(modes);
  for (auto& a : g->xi_diff) a.resize(modes);
  g->xi_squared.resize(modes);
  g->xi_abs.resize(modes);
  g->xi_diff_squared.resize(modes);
  g->weight.resize(modes);
  g->nyquist.resize(modes);
  g->dealias_keep.resize(modes);

  for (int i0 = 0; i0 < n; ++i0) {
    const int k0 = grid.wavenumber(i0);
    for (int i1 = 0; i1 < n; ++i1) {
      const int k1 = grid.wavenumber(i1);
      for (int i2 = 0; i2 < half; ++i2) {
        const int k2 = i2;
        const Eigen::Index m = grid.mode_index(i0, i1, i2);
        const std::array<int, 3> k{k0, k1, k2};
        bool nyq = false;
        bool keep = true;
        double sq = 0.0;
        for (int c = 0; c < 3; ++c) {
          const double x = grid.frequency(k[c]);
          g->xi[c](m) = x;
          sq += x * x;
          if (std::abs(k[c]) == n / 2) nyq = true;
          if (3 * std::abs(k[c]) > n) keep = false;
        }
        for (int c = 0; c < 3; ++c) g->xi_diff[c](m) = nyq ? 0.0 : g->xi[c](m);
        g->xi_squared(m) = sq;
        g->xi_abs(m) = std::sqrt(sq);
        g->xi_diff_squared(m) = nyq ? 0.0 : sq;
        g->weight(m) = (i2 == 0 || i2 == n / 2) ? 1.0 : 2.0;
        g->nyquist(m) = nyq;
        g->dealias_keep(m) = keep;
      }
    }
  }
  return g;
}

}  // namespace

std::shared_ptr<const SpectralGeometry> geometry(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::shared_ptr<const SpectralGeometry>> cache;
  const std::lock_guard lock(mutex);
  const auto key = std::make_pair(grid.points_per_axis(), grid.box_length());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_geometry(grid)).first;
  return it->second;
}

}  // namespace bep
