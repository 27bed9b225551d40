#pragma once

#include "bep/field.hpp"

namespace bep {

/// Forward transform with the unitary normalization of SpectralField.
/// Rejects non-finite samples.
SpectralField to_spectral(const RealField& f);

/// Inverse of to_spectral. The self-conjugate planes are read as Hermitian.
RealField to_physical(const SpectralField& f);

/// Number of threads used by the transform backend. Read once from the
/// BEP_NUM_THREADS environment variable (default 1).
int transform_threads();

}  // namespace bep
