#include "bep/norms.hpp"

#include "bep/besov.hpp"
#include "bep/errors.hpp"
#include "bep/fft.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

namespace bep {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& text, std::string_view what) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("norm spec: bad " + std::string(what) + " '" + text + "'");
  }
  return value;
}

std::string number_text(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void require_zero_mean(const SpectralField& f, const char* who) {
  const double scale = l2_norm(f);
  for (int c = 0; c < f.rank(); ++c) {
    if (std::abs(f.mean_mode(c)) > 1e-10 * scale) {
      throw InfiniteNormError(std::string(who) +
                              ": negative order requires a zero-mean field on the torus");
    }
  }
}

// sqrt(sum_xi weight(xi) * |f(xi)|^2) summed over components.
double multiplier_norm(const SpectralField& f, const Eigen::ArrayXd& symbol_squared) {
  const auto geo = geometry(f.grid());
  double sum = 0.0;
  for (int c = 0; c < f.rank(); ++c) {
    sum += (geo->weight * symbol_squared * f.component(c).abs2()).sum();
  }
  return std::sqrt(sum);
}

Eigen::ArrayXd power_symbol(const Grid& grid, int derivative_order, double s) {
  const auto geo = geometry(grid);
  Eigen::ArrayXd sym = Eigen::ArrayXd::Ones(grid.num_modes());
  if (derivative_order > 0) sym *= geo->xi_diff_squared.pow(derivative_order);
  if (s != 0.0) {
    sym.tail(sym.size() - 1) *= geo->xi_squared.tail(sym.size() - 1).pow(s);
    sym(0) = 0.0;
  }
  return sym;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

NormSpec parse_norm_spec(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    parts.push_back(trim(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.empty() || parts[0].empty()) throw ConfigError("norm spec: empty");

  NormSpec spec;
  const auto colon = parts[0].find(':');
  const std::string kind = trim(parts[0].substr(0, colon));
  const bool has_param = colon != std::string::npos;
  const std::string param = has_param ? trim(parts[0].substr(colon + 1)) : std::string();
  if (kind == "lp") {
    spec.kind = NormKind::lp;
    spec.param = has_param ? parse_number(param, "exponent") : 2.0;
  } else if (kind == "sobolev" || kind == "hdot" || kind == "besov") {
    if (!has_param) throw ConfigError("norm spec: '" + kind + "' needs a parameter");
    spec.kind = kind == "sobolev" ? NormKind::sobolev
                : kind == "hdot"  ? NormKind::hdot
                                  : NormKind::besov;
    spec.param = parse_number(param, "order");
  } else {
    throw ConfigError("norm spec: unknown kind '" + kind + "'");
  }

  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& opt = parts[i];
    if (opt == "project_mean") {
      spec.project_mean = true;
    } else if (opt.rfind("d=", 0) == 0) {
      const double d = parse_number(opt.substr(2), "derivative order");
      if (d != std::floor(d)) throw ConfigError("norm spec: derivative order must be an integer");
      spec.derivative_order = static_cast<int>(d);
    } else if (opt.rfind("field=", 0) == 0) {
      spec.field = opt.substr(6);
      if (spec.field.empty()) throw ConfigError("norm spec: empty field");
    } else {
      throw ConfigError("norm spec: unknown option '" + opt + "'");
    }
  }
  try {
    validate(spec);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

std::string format_norm_spec(const NormSpec& spec) {
  static const char* names[] = {"lp", "sobolev", "hdot", "besov"};
  std::string out = names[static_cast<int>(spec.kind)];
  out += ":" + number_text(spec.param);
  if (spec.derivative_order != 0) out += ",d=" + std::to_string(spec.derivative_order);
  if (spec.field != "total") out += ",field=" + spec.field;
  if (spec.project_mean) out += ",project_mean";
  return out;
}

void validate(const NormSpec& spec) {
  if (spec.derivative_order < 0 || spec.derivative_order > kMaxDerivativeOrder) {
    throw PreconditionError("norm spec: derivative order out of range [0, 4]");
  }
  switch (spec.kind) {
    case NormKind::lp:
      if (!(spec.param >= 1.0)) throw PreconditionError("norm spec: lp exponent must be in [1, inf]");
      break;
    case NormKind::sobolev:
      if (spec.param != std::floor(spec.param) || spec.param < 0 ||
          spec.param + spec.derivative_order > kMaxDerivativeOrder) {
        throw PreconditionError("norm spec: sobolev order must be an integer with k + d <= 4");
      }
      break;
    case NormKind::hdot:
      if (!(spec.param > -1.5) || !std::isfinite(spec.param)) {
        throw PreconditionError("norm spec: hdot order must be finite and > -3/2");
      }
      break;
    case NormKind::besov:
      if (!(spec.param > 0.0 && spec.param <= 1.5)) {
        throw PreconditionError("norm spec: besov order must be in (0, 3/2]");
      }
      break;
  }
}

double lp_norm(const RealField& f, double p) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm: p must be in [1, inf]");
  const Eigen::ArrayXd mag = f.values().square().rowwise().sum().sqrt();
  if (std::isinf(p)) return mag.maxCoeff();
  const double cell = std::pow(f.grid().spacing(), 3);
  if (p == 2.0) return std::sqrt(mag.square().sum() * cell);
  if (p == 1.0) return mag.sum() * cell;
  return std::pow(mag.pow(p).sum() * cell, 1.0 / p);
}

double grad_norm(const SpectralField& f, int k) {
  if (k < 0) throw PreconditionError("grad_norm: negative order");
  if (k == 0) return l2_norm(f);
  return multiplier_norm(f, power_symbol(f.grid(), k, 0.0));
}

double sobolev_norm(const SpectralField& f, int k) {
  if (k < 0) throw PreconditionError("sobolev_norm: negative order");
  double sum = 0.0;
  for (int j = 0; j <= k; ++j) sum += std::pow(grad_norm(f, j), 2);
  return std::sqrt(sum);
}

double hdot_norm(const SpectralField& f, double s) {
  if (s == 0.0) return l2_norm(f);
  if (s < 0.0) require_zero_mean(f, "hdot_norm");
  return multiplier_norm(f, power_symbol(f.grid(), 0, s));
}

RealField derivative_magnitude(const SpectralField& f, int k) {
  if (k < 0 || k > kMaxDerivativeOrder) {
    throw PreconditionError("derivative_magnitude: order out of range");
  }
  const auto& grid = f.grid();
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(grid.num_points());
  for (int a0 = 0; a0 <= k; ++a0) {
    for (int a1 = 0; a0 + a1 <= k; ++a1) {
      const int a2 = k - a0 - a1;
      const double mult = factorial(k) / (factorial(a0) * factorial(a1) * factorial(a2));
      const RealField d = to_physical(derivative(f, {a0, a1, a2}));
      sum += mult * d.values().square().rowwise().sum();
    }
  }
  RealField out(grid, 1);
  out.component(0) = sum.sqrt();
  return out;
}

double evaluate(const NormSpec& spec, const SpectralField& f) {
  validate(spec);
  SpectralField g = f;
  if (spec.project_mean) g.coeffs().row(0).setZero();
  const int l = spec.derivative_order;
  switch (spec.kind) {
    case NormKind::lp:
      return lp_norm(derivative_magnitude(g, l), spec.param);
    case NormKind::sobolev: {
      double sum = 0.0;
      for (int j = 0; j <= static_cast<int>(spec.param); ++j) sum += std::pow(grad_norm(g, l + j), 2);
      return std::sqrt(sum);
    }
    case NormKind::hdot:
      if (l == 0) return hdot_norm(g, spec.param);
      return multiplier_norm(g, power_symbol(g.grid(), l, spec.param));
    case NormKind::besov: {
      if (l == 0) return besov_norm(g, spec.param);
      SpectralField d(g.grid(), g.rank());
      const Eigen::ArrayXd sym = power_symbol(g.grid(), l, 0.0).sqrt();
      for (int c = 0; c < g.rank(); ++c) d.component(c) = sym * g.component(c);
      return besov_norm(d, spec.param);
    }
  }
  return 0.0;
}

}  // namespace bep
