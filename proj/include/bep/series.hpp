#pragma once

#include "bep/norms.hpp"

#include <string>
#include <vector>

namespace bep {

enum class SeriesSource { linear, nonlinear };

/// Sampled time series of one norm. Times strictly increase; values are >= 0.
struct NormSeries {
  NormSpec spec;
  SeriesSource source = SeriesSource::linear;
  std::string provenance;
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  /// Appends a sample; throws PreconditionError if t does not increase or
  /// the value is negative or not finite.
  void push(double t, double value);
};

}  // namespace bep
