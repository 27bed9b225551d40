#pragma once

#include "bep/field.hpp"
#include "bep/spectral.hpp"

#include <string>
#include <string_view>

namespace bep {

enum class NormKind { lp, sobolev, hdot, besov };

/// One norm request: kind with its parameter, a derivative order applied
/// first, and the state quantity it is taken of.
///
/// param is p for lp (infinity allowed), the integer order k for sobolev,
/// the signed order s for hdot and the positive s of the negative Besov space
/// B^{-s}_{2,inf} for besov.
struct NormSpec {
  NormKind kind = NormKind::lp;
  double param = 2.0;
  int derivative_order = 0;
  std::string field = "total";
  /// Drop the zero mode before evaluating (needed for negative orders on a
  /// state whose components carry a mean).
  bool project_mean = false;

  friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

/// Parses kind[:param][,d=L][,field=Q][,project_mean], kind in
/// {lp, sobolev, hdot, besov}. Throws ConfigError.
NormSpec parse_norm_spec(std::string_view text);
std::string format_norm_spec(const NormSpec& spec);
/// Throws PreconditionError when the parameters are out of range.
void validate(const NormSpec& spec);

/// Rectangle-rule L^p norm of the pointwise Euclidean magnitude.
/// p = infinity gives the max.
double lp_norm(const RealField& f, double p);

/// ||grad^k f||_{L2} with |grad^k f|^2 summed over all ordered index tuples,
/// i.e. the multiplier |xi|^k (Nyquist zeroed for k > 0).
double grad_norm(const SpectralField& f, int k);

/// (sum_{j <= k} ||grad^j f||^2)^{1/2}.
double sobolev_norm(const SpectralField& f, int k);

/// (sum_{xi != 0} |xi|^{2s} |f(xi)|^2)^{1/2}. For s < 0 the zero mode must
/// vanish (relative 1e-10), else InfiniteNormError.
double hdot_norm(const SpectralField& f, double s);

/// Pointwise |grad^k f| = (sum over multi-indices of k!/alpha! |d^alpha f|^2)^{1/2},
/// summed over components.
RealField derivative_magnitude(const SpectralField& f, int k);

/// Evaluates spec on f (derivative order and mean projection included).
double evaluate(const NormSpec& spec, const SpectralField& f);

}  // namespace bep
