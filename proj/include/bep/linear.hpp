#pragma once

#include "bep/norms.hpp"
#include "bep/series.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <vector>

namespace bep {

/// Sum variables (n1 + n2, u1 + u2) or difference variables (n1 - n2, u1 - u2).
enum class Branch { sum, difference };

/// Linearized dynamics at one frequency magnitude rho:
///   a' = -b,  b' = -b + omega^2 a,  u_perp' = -u_perp,
/// with a = n-hat, b = i xi . u-hat and omega^2 = rho^2 (sum) or rho^2 + 2
/// (difference).
struct ModeSystem {
  Branch branch = Branch::sum;
  double rho = 1.0;
  std::complex<double> a{};
  std::complex<double> b{};
  Eigen::Vector2cd transverse = Eigen::Vector2cd::Zero();
};

double omega_squared(Branch branch, double rho);

/// Roots of lambda^2 + lambda + omega^2, the slower (larger real part) first.
/// Real roots use the cancellation-free form for the slow one.
std::array<std::complex<double>, 2> eigenvalues(Branch branch, double rho);

/// exp(M t) for M = [[0, -1], [omega^2, -1]]. Stable for large t; the
/// repeated-root neighbourhood uses the series of cosh and sinh(x)/x, which
/// contains the secular t e^{-t/2} term.
Eigen::Matrix2d propagator(Branch branch, double rho, double t);

/// Exact solution at time t. Throws PreconditionError for rho <= 0 or t < 0.
ModeSystem propagate_mode(const ModeSystem& m, double t);

/// (omega^2 |a|^2 + |b|^2)/rho^2 + |u_perp|^2; its derivative along the
/// longitudinal flow is -2|b|^2/rho^2 - 2|u_perp|^2.
double mode_energy(const ModeSystem& m);

/// Max abs difference between propagate_mode and an adaptive Dormand-Prince
/// integration (tol 1e-12) of the same system, relative to the initial state.
double mode_matrix_check(const ModeSystem& m, double t);

/// Radial initial data: a0 = c_n R(rho), b0 = i rho c_u R(rho),
/// |u_perp(0)| = c_perp R(rho).
struct SpectralProfile {
  enum class Family { gaussian, powerlaw };
  Family family = Family::powerlaw;
  double width = 1.0;   ///< gaussian: R = exp(-width^2 rho^2 / 4)
  double sigma = 0.0;   ///< powerlaw: R = rho^sigma eta(rho / cutoff)
  double cutoff = 1.0;
  double density_weight = 1.0;
  double velocity_weight = 0.0;
  double transverse_weight = 0.0;

  static SpectralProfile gaussian(double width);
  static SpectralProfile powerlaw(double sigma, double cutoff = 1.0);

  double radial(double rho) const;
  /// Beyond this rho the profile is zero or below 1e-30 of its scale.
  double support_radius() const;
};

/// Quantities available on the radial level: "density" |a|^2,
/// "velocity" |b|^2/rho^2 + |u_perp|^2, "field" |a|^2/rho^2 (difference branch
/// only), "total" their sum.
double radial_density(const SpectralProfile& profile, Branch branch, const std::string& quantity,
                      double rho, double t);

/// Whole-space norm of the linear solution at time t:
/// ||w||^2 = 4 pi int rho^2 W(rho) Q(rho, t) d rho with W the multiplier of
/// spec (lp with p = 2, sobolev, hdot, besov). Adaptive Gauss-Kronrod on
/// dyadic panels down to rho = 1e-6, plus an analytic power-law tail below.
/// Throws InfiniteNormError when the integral diverges at rho -> 0.
double linear_norm(const SpectralProfile& profile, Branch branch, const NormSpec& spec, double t);

NormSeries norm_evolution(const SpectralProfile& profile, Branch branch, const NormSpec& spec,
                          const std::vector<double>& times);

enum class DataClassKind { neg_sobolev, lp };
struct DataClass {
  DataClassKind kind = DataClassKind::neg_sobolev;
  double value = 0.0;  ///< s or p
  /// The Sobolev index s of the class (s = 3(1/p - 1/2) for L^p).
  double sobolev_index() const;
};
enum class Quantity { carrier, disparity };

/// carrier: -(l + s)/2, disparity: -(l + s + 1)/2.
double predicted_exponent(int l, const DataClass& data, Quantity quantity);

}  // namespace bep
