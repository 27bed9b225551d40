#pragma once

#include "bep/fft.hpp"
#include "bep/field.hpp"

#include <array>

namespace bep {

using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& alpha) { return alpha[0] + alpha[1] + alpha[2]; }

/// Default cap on derivative order (enough for H^3 plus one).
inline constexpr int kMaxDerivativeOrder = 4;

/// Multiplies every coefficient by (i xi)^alpha. All Nyquist modes are zeroed
/// for nonzero orders; order zero is the identity.
SpectralField derivative(const SpectralField& f, const MultiIndex& alpha,
                         int max_order = kMaxDerivativeOrder);

/// Scalar -> 3-vector.
SpectralField gradient(const SpectralField& f);
/// 3-vector -> scalar.
SpectralField divergence(const SpectralField& f);
/// Componentwise -|xi|^2 multiplier, Nyquist zeroed.
SpectralField laplacian(const SpectralField& f);

/// Solves Lap(phi) = rho_diff with zero-mean gauge: phi(xi) = -rho(xi)/|xi|^2.
///
/// The zero mode of rho_diff must vanish. It is accepted when
/// |rho(0)| <= 1e-10 * max(||rho_diff||_L2, reference_scale); callers that
/// know the size of the individual species densities pass it as
/// reference_scale so roundoff in a nearly cancelled difference is not
/// mistaken for a charge imbalance.
SpectralField poisson_solve(const SpectralField& rho_diff, double reference_scale = 0.0);

/// 2/3 rule: zero every coefficient with some |k_j| > n/3.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);

/// Zeroes every Nyquist mode (any |k_j| = n/2).
void zero_nyquist(SpectralField& f);

/// Real L2 inner product summed over components (equals the physical
/// integral of f . g by Parseval).
double inner_product(const SpectralField& f, const SpectralField& g);

/// sqrt(inner_product(f, f)).
double l2_norm(const SpectralField& f);

/// Rectangle-rule physical L2 norm.
double l2_norm(const RealField& f);

}  // namespace bep
