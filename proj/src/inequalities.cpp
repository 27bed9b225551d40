#include "bep/inequalities.hpp"

#include "bep/besov.hpp"
#include "bep/errors.hpp"
#include "bep/fft.hpp"
#include "bep/norms.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace bep {

namespace {

void require_zero_mean(const SpectralField& f, const char* who) {
  const double scale = l2_norm(f);
  if (scale == 0.0) throw PreconditionError(std::string(who) + ": ratio undefined for the zero field");
  for (int c = 0; c < f.rank(); ++c) {
    if (std::abs(f.mean_mode(c)) > 1e-10 * scale) {
      throw PreconditionError(std::string(who) + ": field must have zero mean");
    }
  }
}

// (sum_{xi != 0} |xi|^{2a} |f|^2)^{1/2} with the raw lattice |xi|.
double shell_norm(const SpectralField& f, double a) {
  const auto geo = geometry(f.grid());
  const Eigen::Index m = f.grid().num_modes() - 1;
  const Eigen::ArrayXd sym = geo->weight.tail(m) * geo->xi_squared.tail(m).pow(a);
  double sum = 0.0;
  for (int c = 0; c < f.rank(); ++c) sum += (sym * f.component(c).tail(m).abs2()).sum();
  return std::sqrt(sum);
}

double interpolation_ratio(double num, double high, double low, double theta, const char* who) {
  if (num == 0.0 || high == 0.0 || low == 0.0) {
    throw PreconditionError(std::string(who) + ": ratio undefined for a degenerate field");
  }
  return std::exp(std::log(num) - (1.0 - theta) * std::log(high) - theta * std::log(low));
}

// Upper bound of ||grad^l f||^2 / ||grad^{l+1} f||^{2(1-theta)} with
// ||f||_{B^{-s}} = 1. Frequencies below R use ||Delta_j f|| <= 2^{sj} and
// sum_j phi_j^2 >= 1/2; those above R use ||grad^{l+1} f||^2 / R^2.
double split_bound(int l, double s, double h, double r) {
  const double q = std::pow(2.0, 2.0 * (l + s));
  const int full_top = static_cast<int>(std::floor(std::log2(r))) - 1;
  double low = std::pow(2.0, 2.0 * l) * std::pow(q, full_top) / (1.0 - 1.0 / q);
  for (int j = full_top + 1; std::ldexp(1.0, j - 1) < r; ++j) {
    low += std::pow(r, 2.0 * l) * std::pow(2.0, 2.0 * s * j);
  }
  return 2.0 * low + h / (r * r);
}

double compute_besov_constant(int l, double s) {
  const double theta = 1.0 / (l + 1 + s);
  const double period = 2.0 * (l + 1 + s);
  constexpr int h_samples = 256;
  constexpr int r_samples = 4000;
  double sup = 0.0;
  for (int i = 0; i < h_samples; ++i) {
    const double h = std::pow(2.0, period * i / h_samples);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= r_samples; ++k) {
      const double r = std::pow(2.0, -4.0 + 12.0 * k / r_samples);
      best = std::min(best, split_bound(l, s, h, r));
    }
    sup = std::max(sup, best / std::pow(h, 1.0 - theta));
  }
  return 1.01 * std::sqrt(sup);
}

}  // namespace

double check_neg_sobolev_interpolation(const SpectralField& f, int l, double s) {
  if (l < 0 || !(s >= 0.0)) throw PreconditionError("interpolation: need l >= 0, s >= 0");
  require_zero_mean(f, "check_neg_sobolev_interpolation");
  const double theta = 1.0 / (l + s + 1.0);
  return interpolation_ratio(shell_norm(f, l), shell_norm(f, l + 1), shell_norm(f, -s), theta,
                             "check_neg_sobolev_interpolation");
}

double check_besov_interpolation(const SpectralField& f, int l, double s) {
  if (l < 0 || !(s > 0.0 && s <= 1.5)) throw PreconditionError("interpolation: need l >= 0, s in (0, 3/2]");
  require_zero_mean(f, "check_besov_interpolation");
  const double theta = 1.0 / (l + s + 1.0);
  return interpolation_ratio(shell_norm(f, l), shell_norm(f, l + 1), besov_norm(f, s), theta,
                             "check_besov_interpolation");
}

double besov_interpolation_constant(int l, double s) {
  if (l < 0 || !(s > 0.0 && s <= 1.5)) throw PreconditionError("interpolation: need l >= 0, s in (0, 3/2]");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({l, s});
  if (it == cache.end()) it = cache.emplace(std::pair{l, s}, compute_besov_constant(l, s)).first;
  return it->second;
}

bool dilation_resolved(const Grid& grid, double width) {
  return width >= 6.0 * grid.spacing() && 4.0 * width <= grid.box_length() / 4.0;
}

std::vector<DilationRatio> check_hls_embedding(const Grid& grid, const Profile& profile, double p,
                                               const std::vector<double>& widths) {
  if (!(p > 1.0 && p <= 2.0)) throw PreconditionError("check_hls_embedding: p must be in (1, 2]");
  const double s = 3.0 * (1.0 / p - 0.5);
  const double center = grid.coordinate(grid.points_per_axis() / 2);
  std::vector<DilationRatio> out;
  for (double w : widths) {
    if (!dilation_resolved(grid, w)) continue;
    const RealField f = sample(grid, [&](double x, double y, double z) {
      return profile((x - center) / w, (y - center) / w, (z - center) / w);
    });
    out.push_back({w, hdot_norm(to_spectral(f), -s) / lp_norm(f, p)});
  }
  return out;
}

double gagliardo_nirenberg_ratio(const SpectralField& f, int k, int m, int l, double p, double q,
                                 double r, std::optional<double> theta) {
  for (double e : {p, q, r}) {
    if (!(e >= 1.0)) throw PreconditionError("gagliardo_nirenberg_ratio: exponents must be >= 1");
  }
  const double ek = k - 3.0 / p, em = m - 3.0 / q, el = l - 3.0 / r;
  const double num = ek - em, den = el - em;
  double t = 0.0;
  if (std::abs(den) < 1e-14) {
    if (std::abs(num) >= 1e-14) throw PreconditionError("gagliardo_nirenberg_ratio: exponent mismatch");
    if (!theta) throw PreconditionError("gagliardo_nirenberg_ratio: theta undetermined, supply it");
    t = *theta;
  } else {
    t = num / den;
    if (theta && std::abs(*theta - t) > 1e-12) {
      throw PreconditionError("gagliardo_nirenberg_ratio: exponent mismatch for supplied theta");
    }
  }
  if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("gagliardo_nirenberg_ratio: theta outside [0, 1]");
  const double a = lp_norm(derivative_magnitude(f, k), p);
  const double b = lp_norm(derivative_magnitude(f, m), q);
  const double c = lp_norm(derivative_magnitude(f, l), r);
  return interpolation_ratio(a, b, c, t, "gagliardo_nirenberg_ratio");
}

}  // namespace bep
