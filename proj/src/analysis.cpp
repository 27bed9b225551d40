#include "bep/analysis.hpp"

#include "bep/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bep {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

template <class X>
LineFit fit_line(const NormSeries& series, double t0, double t1, std::size_t min_samples, X&& abscissa) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t < t0 || t > t1) continue;
    if (!(series.values[i] > 0.0)) throw PreconditionError("fit: non-positive value in window");
    xs.push_back(abscissa(t));
    ys.push_back(std::log(series.values[i]));
  }
  if (xs.size() < min_samples) {
    throw PreconditionError("fit: " + std::to_string(xs.size()) + " samples in window, need " +
                            std::to_string(min_samples));
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[i];
    y(i) = ys[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  LineFit out;
  out.intercept = coef(0);
  out.slope = coef(1);
  out.rms = std::sqrt((a * coef - y).squaredNorm() / n);
  out.samples = xs.size();
  return out;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DecayFit fit_decay(const NormSeries& series, double t0, double t1) {
  if (!(t0 >= 1.0 && t1 > t0)) throw PreconditionError("fit_decay: need t1 > t0 >= 1");
  const LineFit line = fit_line(series, t0, t1, 8, [](double t) { return std::log1p(t); });
  DecayFit fit;
  fit.exponent = line.slope;
  fit.intercept = line.intercept;
  fit.t0 = t0;
  fit.t1 = t1;
  fit.rms_residual = line.rms;
  fit.samples = line.samples;
  return fit;
}

SlidingFit sliding_fit(const NormSeries& series, double t0, double t1, int windows) {
  if (windows < 2) throw PreconditionError("sliding_fit: need at least two windows");
  SlidingFit out;
  const double x0 = std::log1p(t0), x1 = std::log1p(t1);
  for (int k = 0; k < windows; ++k) {
    const double a = std::expm1(x0 + (x1 - x0) * k / windows);
    const double b = std::expm1(x0 + (x1 - x0) * (k + 1) / windows);
    out.fits.push_back(fit_decay(series, k == 0 ? t0 : a, k + 1 == windows ? t1 : b));
  }
  out.drift = out.fits.back().exponent - out.fits.front().exponent;
  bool down = true, up = true;
  for (std::size_t k = 1; k < out.fits.size(); ++k) {
    const double d = out.fits[k].exponent - out.fits[k - 1].exponent;
    down = down && d < 0.0;
    up = up && d > 0.0;
  }
  out.monotone = down || up;
  return out;
}

ExponentialFit fit_exponential(const NormSeries& series, double t0, double t1) {
  if (!(t1 > t0)) throw PreconditionError("fit_exponential: need t1 > t0");
  if (series.size() == 0) throw PreconditionError("fit_exponential: empty series");
  const LineFit line = fit_line(series, t0, t1, 8, [](double t) { return t; });
  ExponentialFit fit;
  fit.rate = line.slope;
  fit.intercept = line.intercept;
  fit.rms_residual = line.rms;
  const double t_ref = series.times.front();
  const double v_ref = series.values.front();
  fit.envelope_rate = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t < t0 || t > t1 || t <= t_ref) continue;
    fit.envelope_rate = std::max(fit.envelope_rate, std::log(series.values[i] / v_ref) / (t - t_ref));
  }
  return fit;
}

TrustWindow TrustWindow::make(double box_length, double data_radius, double margin) {
  const double t = (box_length / 2.0 - data_radius) / (1.0 + std::sqrt(2.0) * margin);
  if (!(t > 0.0)) throw PreconditionError("TrustWindow: data support reaches the periodic images");
  return {t};
}

std::string format_data_class(const DataClass& data) {
  return (data.kind == DataClassKind::neg_sobolev ? "s=" : "p=") + number(data.value);
}

Verdict compare_to_prediction(const DecayFit& fit, SeriesSource source, int l, const DataClass& data,
                              Quantity quantity, const Tolerances& tol) {
  if (!fit.trusted) throw PreconditionError("compare_to_prediction: fit outside the trust window");
  Verdict v;
  v.check = "decay";
  v.quantity = quantity == Quantity::carrier ? "carrier" : "disparity";
  v.l = l;
  v.data_class = format_data_class(data);
  v.predicted = predicted_exponent(l, data, quantity);
  v.measured = fit.exponent;
  v.tolerance = source == SeriesSource::linear ? tol.linear : tol.nonlinear;
  v.t0 = fit.t0;
  v.t1 = fit.t1;
  const bool one_sided = source == SeriesSource::nonlinear && quantity == Quantity::disparity;
  if (one_sided) v.check = "decay-upper";
  v.pass = one_sided ? v.measured <= v.predicted + v.tolerance
                     : std::abs(v.measured - v.predicted) <= v.tolerance;
  return v;
}

Verdict compare_exponents(const DecayFit& disparity, const DecayFit& carrier, double gap) {
  if (!disparity.trusted || !carrier.trusted) {
    throw PreconditionError("compare_exponents: fit outside the trust window");
  }
  Verdict v;
  v.check = "gap";
  v.quantity = "disparity-vs-carrier";
  v.predicted = carrier.exponent - gap;
  v.measured = disparity.exponent;
  v.tolerance = gap;
  v.pass = disparity.exponent <= carrier.exponent - gap;
  v.t0 = std::max(disparity.t0, carrier.t0);
  v.t1 = std::min(disparity.t1, carrier.t1);
  return v;
}

Verdict negative_norm_monitor(const NormSeries& series, double t_end, double t_transient, double factor) {
  if (series.size() == 0) throw PreconditionError("negative_norm_monitor: missing series");
  const auto& t = series.times;
  const auto& y = series.values;
  if (t_transient < t.front() || t_transient > t.back()) {
    throw PreconditionError("negative_norm_monitor: transient time outside the series");
  }
  std::size_t k = 0;
  while (k + 1 < t.size() && t[k + 1] < t_transient) ++k;
  double reference = y[k];
  if (k + 1 < t.size() && t[k] < t_transient) {
    const double w = (t_transient - t[k]) / (t[k + 1] - t[k]);
    reference = (1.0 - w) * y[k] + w * y[k + 1];
  }
  double peak = reference;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_transient && t[i] <= t_end) peak = std::max(peak, y[i]);
  }
  Verdict v;
  v.check = "bounded";
  v.quantity = format_norm_spec(series.spec);
  v.data_class = "-";
  v.predicted = factor * reference;
  v.measured = peak;
  v.tolerance = factor - 1.0;
  v.pass = peak <= factor * reference;
  v.t0 = t_transient;
  v.t1 = t_end;
  return v;
}

std::string format_report(const std::vector<Verdict>& verdicts) {
  std::ostringstream out;
  out << "check\tquantity\tl\tclass\tpredicted\tmeasured\ttolerance\tverdict\tt0\tt1\n";
  for (const auto& v : verdicts) {
    out << v.check << '\t' << v.quantity << '\t' << v.l << '\t' << v.data_class << '\t'
        << number(v.predicted) << '\t' << number(v.measured) << '\t' << number(v.tolerance) << '\t'
        << (v.pass ? "PASS" : "FAIL") << '\t' << number(v.t0) << '\t' << number(v.t1) << '\n';
  }
  return out.str();
}

std::vector<Verdict> parse_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Verdict> out;
  if (!std::getline(in, line) || line.rfind("check\t", 0) != 0) {
    throw PreconditionError("parse_report: missing header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, '\t')) cols.push_back(cell);
    if (cols.size() != 10) throw PreconditionError("parse_report: bad row '" + line + "'");
    Verdict v;
    try {
      v.check = cols[0];
      v.quantity = cols[1];
      v.l = std::stoi(cols[2]);
      v.data_class = cols[3];
      v.predicted = std::stod(cols[4]);
      v.measured = std::stod(cols[5]);
      v.tolerance = std::stod(cols[6]);
      v.t0 = std::stod(cols[8]);
      v.t1 = std::stod(cols[9]);
    } catch (const std::exception&) {
      throw PreconditionError("parse_report: bad number in '" + line + "'");
    }
    if (cols[7] != "PASS" && cols[7] != "FAIL") throw PreconditionError("parse_report: bad verdict");
    v.pass = cols[7] == "PASS";
    out.push_back(v);
  }
  return out;
}

}  // namespace bep
