#include "bep/series.hpp"

#include "bep/errors.hpp"

#include <cmath>

namespace bep {

void NormSeries::push(double t, double value) {
  if (!times.empty() && !(t > times.back())) {
    throw PreconditionError("NormSeries: times must strictly increase");
  }
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw PreconditionError("NormSeries: values must be finite and non-negative");
  }
  times.push_back(t);
  values.push_back(value);
}

}  // namespace bep
