#include "bep/field.hpp"

#include "bep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace bep {

RealField::RealField(const Grid& grid, int rank)
    : grid_(grid), values_(Eigen::ArrayXXd::Zero(grid.num_points(), rank)) {
  if (rank < 1) throw PreconditionError("field rank must be positive");
}

RealField::RealField(const Grid& grid, Eigen::ArrayXXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != grid.num_points() || values_.cols() < 1) {
    throw PreconditionError("real field: sample count does not match the grid");
  }
}

SpectralField::SpectralField(const Grid& grid, int rank)
    : grid_(grid), coeffs_(Eigen::ArrayXXcd::Zero(grid.num_modes(), rank)) {
  if (rank < 1) throw PreconditionError("field rank must be positive");
}

SpectralField::SpectralField(const Grid& grid, Eigen::ArrayXXcd coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != grid.num_modes() || coeffs_.cols() < 1) {
    throw PreconditionError("spectral field: coefficient count does not match the grid");
  }
}

Complex SpectralField::coefficient(int k0, int k1, int k2, int c) const {
  const int n = grid_.points_per_axis();
  auto wrap = [n](int k) {
    k %= n;
    if (k < -n / 2) k += n;
    if (k >= n / 2) k -= n;
    return k;
  };
  k0 = wrap(k0);
  k1 = wrap(k1);
  k2 = wrap(k2);
  if (k2 >= 0) {
    return coeffs_(grid_.mode_index(grid_.axis_index(k0), grid_.axis_index(k1), k2), c);
  }
  if (k2 == -n / 2) {
    // The Nyquist plane is stored at i2 = n/2 and is its own conjugate partner.
    return coeffs_(grid_.mode_index(grid_.axis_index(k0), grid_.axis_index(k1), n / 2), c);
  }
  return std::conj(
      coeffs_(grid_.mode_index(grid_.axis_index(wrap(-k0)), grid_.axis_index(wrap(-k1)), -k2), c));
}

double SpectralField::hermitian_defect() const {
  const int n = grid_.points_per_axis();
  double worst = 0.0;
  for (int c = 0; c < rank(); ++c) {
    for (int i2 : {0, n / 2}) {
      for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
          const int j0 = (n - i0) % n;
          const int j1 = (n - i1) % n;
          const Complex a = coeffs_(grid_.mode_index(i0, i1, i2), c);
          const Complex b = coeffs_(grid_.mode_index(j0, j1, i2), c);
          worst = std::max(worst, std::abs(a - std::conj(b)));
        }
      }
    }
  }
  return worst;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (grid_ != other.grid_ || rank() != other.rank()) {
    throw PreconditionError("spectral field sum: grid or rank mismatch");
  }
  coeffs_ += other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (grid_ != other.grid_ || rank() != other.rank()) {
    throw PreconditionError("spectral field difference: grid or rank mismatch");
  }
  coeffs_ -= other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  coeffs_ *= scale;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double scale, SpectralField a) { return a *= scale; }

SpectralField stack(std::initializer_list<const SpectralField*> parts) {
  if (parts.size() == 0) throw PreconditionError("stack: no fields");
  const Grid& grid = (*parts.begin())->grid();
  int rank = 0;
  for (const auto* p : parts) {
    if (p->grid() != grid) throw PreconditionError("stack: grid mismatch");
    rank += p->rank();
  }
  SpectralField out(grid, rank);
  int col = 0;
  for (const auto* p : parts) {
    out.coeffs().middleCols(col, p->rank()) = p->coeffs();
    col += p->rank();
  }
  return out;
}

RealField stack(std::initializer_list<const RealField*> parts) {
  if (parts.size() == 0) throw PreconditionError("stack: no fields");
  const Grid& grid = (*parts.begin())->grid();
  int rank = 0;
  for (const auto* p : parts) {
    if (p->grid() != grid) throw PreconditionError("stack: grid mismatch");
    rank += p->rank();
  }
  RealField out(grid, rank);
  int col = 0;
  for (const auto* p : parts) {
    out.values().middleCols(col, p->rank()) = p->values();
    col += p->rank();
  }
  return out;
}

}  // namespace bep
