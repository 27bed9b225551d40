#pragma once

#include "bep/fft.hpp"
#include "bep/field.hpp"
#include "bep/spectral.hpp"

#include <cmath>
#include <random>

namespace bep::test {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Random real field; when band > 0 only modes with every |k_j| <= band are kept.
inline RealField random_field(const Grid& grid, int rank, std::uint64_t seed, int band = 0,
                              bool zero_mean = false) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  RealField f(grid, rank);
  for (Eigen::Index i = 0; i < f.values().size(); ++i) f.values().data()[i] = normal(gen);
  if (band <= 0 && !zero_mean) return f;
  SpectralField s = to_spectral(f);
  const int n = grid.points_per_axis();
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 <= n / 2; ++i2) {
        const int k0 = grid.wavenumber(i0), k1 = grid.wavenumber(i1), k2 = grid.wavenumber(i2);
        const bool drop = band > 0 && (std::abs(k0) > band || std::abs(k1) > band || std::abs(k2) > band);
        if (drop) s.coeffs().row(grid.mode_index(i0, i1, i2)).setZero();
      }
    }
  }
  if (zero_mean) s.coeffs().row(0).setZero();
  return to_physical(s);
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
  return (a.values() - b.values()).abs().maxCoeff();
}

}  // namespace bep::test
