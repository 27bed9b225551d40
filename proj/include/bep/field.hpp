#pragma once

#include "bep/grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <initializer_list>

namespace bep {

using Complex = std::complex<double>;

/// Samples of a scalar (rank 1) or vector (rank 3) field at the grid points.
/// Column c holds component c, flattened with Grid::point_index.
class RealField {
 public:
  RealField(const Grid& grid, int rank = 1);
  RealField(const Grid& grid, Eigen::ArrayXXd values);

  const Grid& grid() const { return grid_; }
  int rank() const { return static_cast<int>(values_.cols()); }

  const Eigen::ArrayXXd& values() const { return values_; }
  Eigen::ArrayXXd& values() { return values_; }

  auto component(int c) const { return values_.col(c); }
  auto component(int c) { return values_.col(c); }

  bool all_finite() const { return values_.allFinite(); }

 private:
  Grid grid_;
  Eigen::ArrayXXd values_;
};

/// Unitary Fourier coefficients of a real field in the half-spectrum layout.
///
/// c(xi) = V^{-1/2} * integral f(x) exp(-i xi.x) dx, evaluated by the DFT,
/// so sum over the full lattice of |c|^2 equals the physical L2 norm squared.
class SpectralField {
 public:
  SpectralField(const Grid& grid, int rank = 1);
  SpectralField(const Grid& grid, Eigen::ArrayXXcd coeffs);

  const Grid& grid() const { return grid_; }
  int rank() const { return static_cast<int>(coeffs_.cols()); }

  const Eigen::ArrayXXcd& coeffs() const { return coeffs_; }
  Eigen::ArrayXXcd& coeffs() { return coeffs_; }

  auto component(int c) const { return coeffs_.col(c); }
  auto component(int c) { return coeffs_.col(c); }

  /// Coefficient at an arbitrary lattice wavenumber, reconstructing the
  /// negative-k3 half from conjugate symmetry.
  Complex coefficient(int k0, int k1, int k2, int c = 0) const;
  /// Coefficient of the zero frequency.
  Complex mean_mode(int c = 0) const { return coeffs_(0, c); }

  /// Largest |c(-k) - conj(c(k))| over the self-conjugate planes k3 = 0 and
  /// k3 = -n/2 of the half layout. Zero for transforms of real fields.
  double hermitian_defect() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

 private:
  Grid grid_;
  Eigen::ArrayXXcd coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double scale, SpectralField a);

/// Stacks the components of several fields on the same grid into one field.
SpectralField stack(std::initializer_list<const SpectralField*> parts);
RealField stack(std::initializer_list<const RealField*> parts);

/// Scalar field with values fn(x0, x1, x2) at the grid points.
template <class Fn>
RealField sample(const Grid& grid, Fn&& fn) {
  RealField out(grid, 1);
  const int n = grid.points_per_axis();
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        out.values()(grid.point_index(i0, i1, i2), 0) =
            fn(grid.coordinate(i0), grid.coordinate(i1), grid.coordinate(i2));
      }
    }
  }
  return out;
}

}  // namespace bep
