#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>

namespace bep {

/// Periodic cube [0, L)^3 sampled with n points per axis.
///
/// The frequency lattice is xi = 2*pi*k/L for integer triples with
/// -n/2 <= k_j < n/2; the single index k_j = -n/2 is the Nyquist plane.
/// Spectral coefficients use the half-spectrum layout
/// (i0, i1, i2) with 0 <= i2 <= n/2, flattened as (i0 * n + i1) * (n/2 + 1) + i2.
class Grid {
 public:
  Grid(int points_per_axis, double box_length);

  int points_per_axis() const { return n_; }
  double box_length() const { return length_; }

  Eigen::Index num_points() const { return Eigen::Index(n_) * n_ * n_; }
  Eigen::Index num_modes() const { return Eigen::Index(n_) * n_ * (n_ / 2 + 1); }
  int half_extent() const { return n_ / 2 + 1; }

  double spacing() const { return length_ / n_; }
  double volume() const { return length_ * length_ * length_; }

  /// Physical coordinate of sample index i along any axis, in [0, L).
  double coordinate(int i) const { return i * spacing(); }

  /// Signed wavenumber k in [-n/2, n/2) of a full-axis index.
  int wavenumber(int index) const { return index < n_ / 2 ? index : index - n_; }
  /// Inverse of wavenumber(): storage index of a signed wavenumber.
  int axis_index(int k) const { return k >= 0 ? k : k + n_; }

  double frequency(int k) const;
  /// Smallest nonzero frequency magnitude 2*pi/L.
  double fundamental() const;

  Eigen::Index point_index(int i0, int i1, int i2) const {
    return (Eigen::Index(i0) * n_ + i1) * n_ + i2;
  }
  Eigen::Index mode_index(int i0, int i1, int i2) const {
    return (Eigen::Index(i0) * n_ + i1) * half_extent() + i2;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  int n_;
  double length_;
};

/// Per-mode frequency tables for one grid, shared between all fields on it.
struct SpectralGeometry {
  /// Raw frequency components of each half-layout mode.
  std::array<Eigen::ArrayXd, 3> xi;
  /// Frequency components with every Nyquist mode zeroed; used by all
  /// differential operators.
  std::array<Eigen::ArrayXd, 3> xi_diff;
  Eigen::ArrayXd xi_squared;       ///< |xi|^2 (raw)
  Eigen::ArrayXd xi_abs;           ///< |xi| (raw)
  Eigen::ArrayXd xi_diff_squared;  ///< |xi|^2, zero on Nyquist modes
  Eigen::ArrayXd weight;           ///< multiplicity of the mode in full-lattice sums (1 or 2)
  Eigen::Array<bool, Eigen::Dynamic, 1> nyquist;
  Eigen::Array<bool, Eigen::Dynamic, 1> dealias_keep;  ///< every |k_j| <= n/3
};

/// Cached geometry for the grid. Thread-safe; the returned tables are immutable.
std::shared_ptr<const SpectralGeometry> geometry(const Grid& grid);

}  // namespace bep
