#pragma once

#include "bep/linear.hpp"
#include "bep/series.hpp"

#include <string>
#include <vector>

namespace bep {

/// Power-law fit value ~ C (1 + t)^exponent over [t0, t1].
struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;  ///< log C
  double t0 = 0.0;
  double t1 = 0.0;
  double rms_residual = 0.0;  ///< in log value
  std::size_t samples = 0;
  bool trusted = true;
};

/// Least squares of log(value) on log(1 + t) over the samples in [t0, t1].
/// Needs t1 > t0 >= 1 and at least 8 samples, all positive.
DecayFit fit_decay(const NormSeries& series, double t0, double t1);

struct SlidingFit {
  std::vector<DecayFit> fits;
  double drift = 0.0;  ///< last exponent minus first
  bool monotone = false;
};

/// Fits on `windows` consecutive subwindows of equal length in log(1 + t).
/// A steady drift of the exponent means the series is not a power law.
SlidingFit sliding_fit(const NormSeries& series, double t0, double t1, int windows = 4);

/// Exponential fit value ~ C exp(rate t) over [t0, t1] (least squares in log value).
struct ExponentialFit {
  double rate = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  /// Smallest k with value(t) <= value(t_ref) exp(k (t - t_ref)) on the window,
  /// t_ref being the first sample of the series.
  double envelope_rate = 0.0;
};
ExponentialFit fit_exponential(const NormSeries& series, double t0, double t1);

/// Time before waves leaving the data support reach the periodic images:
/// t_wrap = (L/2 - data_radius) / (1 + sqrt(2) margin).
struct TrustWindow {
  double t_wrap = 0.0;
  static TrustWindow make(double box_length, double data_radius, double margin = 1.0);
};

struct Tolerances {
  double linear = 0.03;
  double nonlinear = 0.15;
};

/// One verdict row of a report.
struct Verdict {
  std::string check;
  std::string quantity;
  int l = 0;
  std::string data_class;
  double predicted = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double t0 = 0.0;
  double t1 = 0.0;
};

/// |measured - predicted| <= tol(source); one-sided (measured <= predicted + tol)
/// for the disparity of nonlinear series. Refuses untrusted fits.
Verdict compare_to_prediction(const DecayFit& fit, SeriesSource source, int l, const DataClass& data,
                              Quantity quantity, const Tolerances& tol = {});

/// PASS when the disparity exponent is at most the carrier exponent minus gap.
Verdict compare_exponents(const DecayFit& disparity, const DecayFit& carrier, double gap = 0.3);

/// PASS when max over [t_transient, t_end] <= factor * value(t_transient)
/// (value at t_transient interpolated linearly).
Verdict negative_norm_monitor(const NormSeries& series, double t_end, double t_transient = 1.0,
                              double factor = 1.1);

/// Tab-separated report with a header line; parse_report reads it back.
std::string format_report(const std::vector<Verdict>& verdicts);
std::vector<Verdict> parse_report(const std::string& text);

std::string format_data_class(const DataClass& data);

}  // namespace bep
