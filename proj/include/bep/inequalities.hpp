#pragma once

#include "bep/field.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace bep {

/// ||grad^l f|| / (||grad^{l+1} f||^{1-theta} ||f||_{H^{-s}}^theta),
/// theta = 1/(l + s + 1). All three norms are the pure multipliers |xi|^a
/// over xi != 0, so the ratio is at most 1 and equals 1 on single shells.
double check_neg_sobolev_interpolation(const SpectralField& f, int l, double s);

/// As above with ||f||_{B^{-s}_{2,inf}} in the denominator. Bounded by
/// besov_interpolation_constant(l, s).
double check_besov_interpolation(const SpectralField& f, int l, double s);

/// Upper bound for check_besov_interpolation valid for every field, from a
/// dyadic low/high split (includes a 1% numerical margin). Cached.
double besov_interpolation_constant(int l, double s);

using Profile = std::function<double(double, double, double)>;

struct DilationRatio {
  double width;
  double ratio;
};

/// Samples f_w(x) = profile((x - c)/w), c the box center, for each width and
/// returns ||f_w||_{H^{-s}} / ||f_w||_{L^p} with s = 3(1/p - 1/2), p in (1, 2].
/// Widths below 6 cells or with 4w > L/4 are dropped from the result.
std::vector<DilationRatio> check_hls_embedding(const Grid& grid, const Profile& profile, double p,
                                               const std::vector<double>& widths);

/// Whether a width passes the resolution rule of check_hls_embedding.
bool dilation_resolved(const Grid& grid, double width);

/// ||grad^k f||_p / (||grad^m f||_q^{1-theta} ||grad^l f||_r^theta) with theta
/// from the 3D scaling balance k - 3/p = (1-theta)(m - 3/q) + theta(l - 3/r).
/// When the balance does not determine theta, theta must be supplied.
/// Throws PreconditionError on an exponent mismatch or theta outside [0, 1].
double gagliardo_nirenberg_ratio(const SpectralField& f, int k, int m, int l, double p, double q,
                                 double r, std::optional<double> theta = std::nullopt);

}  // namespace bep
