#include "bep/linear.hpp"

#include "bep/besov.hpp"
#include "bep/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <numbers>

namespace bep {

namespace {

constexpr double kRhoMin = 1e-6;
constexpr double kQuadTolerance = 1e-10;

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("linear: rho must be positive");
}

// Integral of g over [lo, hi] in the variable log(rho), on dyadic panels.
template <class G>
double panel_integral(const G& g, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  auto in_log = [&g](double u) {
    const double rho = std::exp(u);
    return g(rho) * rho;
  };
  double sum = 0.0;
  double a = lo;
  while (a < hi) {
    double b = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(a))) + 1);
    if (b <= a * (1.0 + 1e-15)) b = 2.0 * a;
    b = std::min(b, hi);
    sum += gauss_kronrod<double, 31>::integrate(in_log, std::log(a), std::log(b), 15, kQuadTolerance);
    a = b;
  }
  return sum;
}

// Power-law continuation of g below kRhoMin.
template <class G>
double small_rho_tail(const G& g) {
  const double g1 = g(kRhoMin);
  const double g0 = g(0.5 * kRhoMin);
  if (g1 == 0.0 || g0 == 0.0) return 0.0;
  const double alpha = std::log2(g1 / g0);
  if (alpha <= -1.0 + 1e-9) {
    throw InfiniteNormError("linear_norm: radial integrand ~ rho^" + std::to_string(alpha) +
                            " is not integrable at 0");
  }
  return g1 * kRhoMin / (alpha + 1.0);
}

double multiplier(const NormSpec& spec, double rho) {
  const int l = spec.derivative_order;
  switch (spec.kind) {
    case NormKind::lp:
      return std::pow(rho, 2.0 * l);
    case NormKind::sobolev: {
      double w = 0.0;
      for (int j = 0; j <= static_cast<int>(spec.param); ++j) w += std::pow(rho, 2.0 * (l + j));
      return w;
    }
    case NormKind::hdot:
      return std::pow(rho, 2.0 * (l + spec.param));
    case NormKind::besov:
      return std::pow(rho, 2.0 * l);
  }
  return 0.0;
}

}  // namespace

double omega_squared(Branch branch, double rho) {
  return branch == Branch::sum ? rho * rho : rho * rho + 2.0;
}

std::array<std::complex<double>, 2> eigenvalues(Branch branch, double rho) {
  check_rho(rho);
  const double w2 = omega_squared(branch, rho);
  const double disc = 1.0 - 4.0 * w2;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    return {std::complex<double>(-2.0 * w2 / (1.0 + root), 0.0),
            std::complex<double>(-0.5 * (1.0 + root), 0.0)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {std::complex<double>(-0.5, im), std::complex<double>(-0.5, -im)};
}

Eigen::Matrix2d propagator(Branch branch, double rho, double t) {
  check_rho(rho);
  if (t < 0.0) throw PreconditionError("propagator: t must be non-negative");
  const double w2 = omega_squared(branch, rho);
  const double mu2 = 0.25 - w2;
  const double z = mu2 * t * t;
  Eigen::Matrix2d p;
  if (std::abs(z) < 1e-3) {
    const double damp = std::exp(-0.5 * t);
    const double c = damp * (1.0 + z / 2.0 + z * z / 24.0 + z * z * z / 720.0 + z * z * z * z / 40320.0);
    const double s = damp * t *
                     (1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0 + z * z * z * z / 362880.0);
    p << c + 0.5 * s, -s, w2 * s, c - 0.5 * s;
  } else if (mu2 > 0.0) {
    const double mu = std::sqrt(mu2);
    const double slow = std::exp(-w2 / (0.5 + mu) * t);
    const double fast = std::exp(-(0.5 + mu) * t);
    // 1 - 1/(2 mu) without cancellation near rho = 0.
    const double small = -w2 / (mu * (0.5 + mu));
    const double large = 1.0 + 0.5 / mu;
    const double s = (slow - fast) / (2.0 * mu);
    p << 0.5 * (slow * large + fast * small), -s, w2 * s, 0.5 * (slow * small + fast * large);
  } else {
    const double nu = std::sqrt(-mu2);
    const double damp = std::exp(-0.5 * t);
    const double c = damp * std::cos(nu * t);
    const double s = damp * std::sin(nu * t) / nu;
    p << c + 0.5 * s, -s, w2 * s, c - 0.5 * s;
  }
  return p;
}

ModeSystem propagate_mode(const ModeSystem& m, double t) {
  const Eigen::Matrix2d p = propagator(m.branch, m.rho, t);
  ModeSystem out = m;
  out.a = p(0, 0) * m.a + p(0, 1) * m.b;
  out.b = p(1, 0) * m.a + p(1, 1) * m.b;
  out.transverse = std::exp(-t) * m.transverse;
  return out;
}

double mode_energy(const ModeSystem& m) {
  check_rho(m.rho);
  const double w2 = omega_squared(m.branch, m.rho);
  return (w2 * std::norm(m.a) + std::norm(m.b)) / (m.rho * m.rho) + m.transverse.squaredNorm();
}

double mode_matrix_check(const ModeSystem& m, double t) {
  using State = std::array<double, 8>;
  namespace ode = boost::numeric::odeint;
  check_rho(m.rho);
  if (t < 0.0) throw PreconditionError("mode_matrix_check: t must be non-negative");
  const double w2 = omega_squared(m.branch, m.rho);
  State x{m.a.real(), m.a.imag(), m.b.real(), m.b.imag(),
          m.transverse(0).real(), m.transverse(0).imag(), m.transverse(1).real(), m.transverse(1).imag()};
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (t == 0.0 || scale == 0.0) return 0.0;
  auto system = [w2](const State& y, State& dy, double) {
    for (int k = 0; k < 2; ++k) {
      dy[k] = -y[2 + k];
      dy[2 + k] = -y[2 + k] + w2 * y[k];
    }
    for (int k = 4; k < 8; ++k) dy[k] = -y[k];
  };
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-12, 1e-12), system,
                          x, 0.0, t, std::min(1e-3, t));
  const ModeSystem exact = propagate_mode(m, t);
  const State e{exact.a.real(), exact.a.imag(), exact.b.real(), exact.b.imag(),
                exact.transverse(0).real(), exact.transverse(0).imag(),
                exact.transverse(1).real(), exact.transverse(1).imag()};
  double residual = 0.0;
  for (int k = 0; k < 8; ++k) residual = std::max(residual, std::abs(e[k] - x[k]));
  return residual / scale;
}

SpectralProfile SpectralProfile::gaussian(double width) {
  SpectralProfile p;
  p.family = Family::gaussian;
  p.width = width;
  return p;
}

SpectralProfile SpectralProfile::powerlaw(double sigma, double cutoff) {
  SpectralProfile p;
  p.family = Family::powerlaw;
  p.sigma = sigma;
  p.cutoff = cutoff;
  return p;
}

double SpectralProfile::radial(double rho) const {
  if (family == Family::gaussian) return std::exp(-width * width * rho * rho / 4.0);
  return std::pow(rho, sigma) * BesovPartition::eta(rho / cutoff);
}

double SpectralProfile::support_radius() const {
  if (family == Family::gaussian) return 17.0 / width;
  return 2.0 * cutoff;
}

double radial_density(const SpectralProfile& profile, Branch branch, const std::string& quantity,
                      double rho, double t) {
  const double r = profile.radial(rho);
  ModeSystem m;
  m.branch = branch;
  m.rho = rho;
  m.a = profile.density_weight * r;
  m.b = std::complex<double>(0.0, rho * profile.velocity_weight * r);
  m.transverse(0) = profile.transverse_weight * r;
  const ModeSystem w = propagate_mode(m, t);
  const double density = std::norm(w.a);
  const double velocity = std::norm(w.b) / (rho * rho) + w.transverse.squaredNorm();
  if (quantity == "density") return density;
  if (quantity == "velocity") return velocity;
  if (quantity == "field" || quantity == "total") {
    if (branch != Branch::difference) {
      if (quantity == "total") return density + velocity;
      throw PreconditionError("radial_density: the field exists only on the difference branch");
    }
    const double field = density / (rho * rho);
    return quantity == "field" ? field : density + velocity + field;
  }
  throw PreconditionError("radial_density: unknown quantity '" + quantity + "'");
}

double linear_norm(const SpectralProfile& profile, Branch branch, const NormSpec& spec, double t) {
  validate(spec);
  if (spec.kind == NormKind::lp && spec.param != 2.0) {
    throw PreconditionError("linear_norm: only p = 2 has a radial form");
  }
  const double rho_max = profile.support_radius();
  auto integrand = [&](double rho, auto&& weight) {
    return rho * rho * weight(rho) * radial_density(profile, branch, spec.field, rho, t);
  };
  const double four_pi = 4.0 * std::numbers::pi;

  if (spec.kind != NormKind::besov) {
    auto g = [&](double rho) { return integrand(rho, [&](double r) { return multiplier(spec, r); }); };
    return std::sqrt(four_pi * (panel_integral(g, kRhoMin, rho_max) + small_rho_tail(g)));
  }

  const double s = spec.param;
  const int j_hi = static_cast<int>(std::ceil(std::log2(rho_max))) + 1;
  const int j_lo = static_cast<int>(std::floor(std::log2(kRhoMin))) + 1;
  std::vector<double> weighted;  // index 0 is j_hi, descending
  for (int j = j_hi; j >= j_lo; --j) {
    auto g = [&](double rho) {
      return integrand(rho, [&](double r) {
        const double p = BesovPartition::phi(j, r);
        return p * p * multiplier(spec, r);
      });
    };
    const double lo = std::max(std::ldexp(1.0, j - 1), kRhoMin);
    const double block = std::sqrt(four_pi * panel_integral(g, lo, std::ldexp(1.0, j + 1)));
    weighted.push_back(std::pow(2.0, -s * j) * block);
  }
  // The lowest block is truncated at kRhoMin; growth between the next two
  // means the weighted blocks are unbounded as j -> -inf.
  const std::size_t n = weighted.size();
  if (weighted[n - 2] > weighted[n - 3] * (1.0 + 1e-3)) {
    throw InfiniteNormError("linear_norm: Besov blocks grow without bound at low frequency");
  }
  double sup = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) sup = std::max(sup, weighted[k]);
  return sup;
}

NormSeries norm_evolution(const SpectralProfile& profile, Branch branch, const NormSpec& spec,
                          const std::vector<double>& times) {
  NormSeries series;
  series.spec = spec;
  series.source = SeriesSource::linear;
  series.provenance = std::string("linear ") + (branch == Branch::sum ? "sum" : "difference");
  for (double t : times) series.push(t, linear_norm(profile, branch, spec, t));
  return series;
}

double DataClass::sobolev_index() const {
  if (kind == DataClassKind::neg_sobolev) return value;
  return 3.0 * (1.0 / value - 0.5);
}

double predicted_exponent(int l, const DataClass& data, Quantity quantity) {
  if (data.kind == DataClassKind::neg_sobolev && !(data.value >= 0.0 && data.value <= 1.5)) {
    throw PreconditionError("predicted_exponent: s must be in [0, 3/2]");
  }
  if (data.kind == DataClassKind::lp && !(data.value >= 1.0 && data.value <= 2.0)) {
    throw PreconditionError("predicted_exponent: p must be in [1, 2]");
  }
  const int l_max = quantity == Quantity::carrier ? 2 : 1;
  if (l < 0 || l > l_max) throw PreconditionError("predicted_exponent: l out of range");
  const double s = data.sobolev_index();
  return quantity == Quantity::carrier ? -(l + s) / 2.0 : -(l + s + 1.0) / 2.0;
}

}  // namespace bep
