#include "bep/analysis.hpp"
#include "bep/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace bep;

namespace {

NormSeries synthetic(double t0, double t1, int n, double (*fn)(double)) {
  NormSeries s;
  for (int i = 0; i < n; ++i) {
    const double t = t0 * std::pow(t1 / t0, double(i) / (n - 1));
    s.push(t, fn(t));
  }
  return s;
}

std::vector<double> log_times(double t0, double t1, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(t0 * std::pow(t1 / t0, double(i) / (n - 1)));
  return t;
}

}  // namespace

TEST_CASE("fit is exact on power laws") {
  const auto s = synthetic(1.0, 1e4, 40, [](double t) { return std::pow(1.0 + t, -0.75); });
  const auto fit = fit_decay(s, 1.0, 1e4);
  CHECK(std::abs(fit.exponent + 0.75) < 1e-10);
  CHECK(fit.rms_residual < 1e-10);
  CHECK(fit.samples == 40);

  NormSeries scaled = s;
  for (auto& v : scaled.values) v *= 37.0;
  const auto fs = fit_decay(scaled, 1.0, 1e4);
  CHECK(std::abs(fs.exponent - fit.exponent) < 1e-12);
  CHECK(std::abs(fs.intercept - fit.intercept - std::log(37.0)) < 1e-10);

  NormSeries half;
  for (std::size_t i = 0; i < s.size(); i += 2) half.push(s.times[i], s.values[i]);
  CHECK(std::abs(fit_decay(half, 1.0, 1e4).exponent - fit.exponent) <= 1e-10 + 4.0 * fit.rms_residual);
}

TEST_CASE("fit preconditions") {
  const auto s = synthetic(1.0, 100.0, 7, [](double t) { return 1.0 / t; });
  CHECK_THROWS_AS(fit_decay(s, 1.0, 100.0), PreconditionError);
  const auto ok = synthetic(1.0, 100.0, 9, [](double t) { return 1.0 / t; });
  CHECK_THROWS_AS(fit_decay(ok, 0.5, 100.0), PreconditionError);
  CHECK_THROWS_AS(fit_decay(ok, 10.0, 10.0), PreconditionError);
  NormSeries zero;
  for (int i = 1; i <= 10; ++i) zero.push(i, 0.0);
  CHECK_THROWS_AS(fit_decay(zero, 1.0, 10.0), PreconditionError);
}

TEST_CASE("sliding fit flags an exponential") {
  const auto e = synthetic(1.0, 60.0, 64, [](double t) { return std::exp(-t / 2); });
  const auto sliding = sliding_fit(e, 1.0, 60.0, 4);
  CHECK(sliding.monotone);
  CHECK(sliding.drift < -1.0);
  const auto p = synthetic(1.0, 60.0, 64, [](double t) { return std::pow(1.0 + t, -1.25); });
  CHECK(std::abs(sliding_fit(p, 1.0, 60.0, 4).drift) < 1e-10);

  const auto fit = fit_exponential(e, 1.0, 60.0);
  CHECK(fit.rate == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.envelope_rate == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("linear sum-branch density decay for powerlaw(0.05)") {
  // For |a0|^2 ~ rho^{2 sigma} the density norm behaves like t^{-(3 + 2 sigma)/4}:
  // -0.775 at sigma = 0.05, within 0.03 of the borderline rate -3/4.
  const auto series = norm_evolution(SpectralProfile::powerlaw(0.05), Branch::sum,
                                     parse_norm_spec("lp:2,field=density"), log_times(1e2, 1e4, 33));
  const auto fit = fit_decay(series, 1e2, 1e4);
  CHECK(std::abs(fit.exponent + 0.775) < 0.005);
  const auto v = compare_to_prediction(fit, SeriesSource::linear, 0,
                                       DataClass{DataClassKind::neg_sobolev, 1.5}, Quantity::carrier);
  CHECK(v.pass);
}

TEST_CASE("trust window") {
  CHECK(TrustWindow::make(100.0, 15.0).t_wrap == doctest::Approx(35.0 / (1.0 + std::sqrt(2.0))));
  CHECK(TrustWindow::make(100.0, 15.0, 0.0).t_wrap == doctest::Approx(35.0));
  CHECK_THROWS_AS(TrustWindow::make(10.0, 6.0), PreconditionError);
}

TEST_CASE("verdicts") {
  DecayFit fit;
  fit.t0 = 100;
  fit.t1 = 1e4;
  fit.exponent = -0.76;
  const DataClass b{DataClassKind::neg_sobolev, 1.5};
  CHECK(compare_to_prediction(fit, SeriesSource::linear, 0, b, Quantity::carrier).pass);
  fit.exponent = -0.70;
  CHECK(!compare_to_prediction(fit, SeriesSource::linear, 0, b, Quantity::carrier).pass);
  CHECK(compare_to_prediction(fit, SeriesSource::nonlinear, 0, b, Quantity::carrier).pass);

  // One-sided disparity check: faster decay always passes.
  fit.exponent = -3.0;
  CHECK(compare_to_prediction(fit, SeriesSource::nonlinear, 0, b, Quantity::disparity).pass);
  CHECK(!compare_to_prediction(fit, SeriesSource::linear, 0, b, Quantity::disparity).pass);
  fit.exponent = -1.0;
  CHECK(!compare_to_prediction(fit, SeriesSource::nonlinear, 0, b, Quantity::disparity).pass);

  fit.trusted = false;
  CHECK_THROWS_AS(compare_to_prediction(fit, SeriesSource::linear, 0, b, Quantity::carrier), PreconditionError);

  DecayFit c, d;
  c.exponent = -0.7;
  d.exponent = -1.1;
  CHECK(compare_exponents(d, c).pass);
  d.exponent = -0.9;
  CHECK(!compare_exponents(d, c).pass);

  // Same inputs, same verdict.
  c.exponent = -0.74;
  const auto v1 = compare_to_prediction(c, SeriesSource::linear, 0, b, Quantity::carrier);
  const auto v2 = compare_to_prediction(c, SeriesSource::linear, 0, b, Quantity::carrier);
  CHECK(format_report({v1}) == format_report({v2}));
}

TEST_CASE("negative norm monitor") {
  NormSeries zero;
  for (int i = 0; i <= 10; ++i) zero.push(i, 0.0);
  CHECK(negative_norm_monitor(zero, 10.0).pass);

  const auto series = norm_evolution(SpectralProfile::powerlaw(-0.95), Branch::sum,
                                     parse_norm_spec("hdot:-0.5,field=total"), log_times(0.1, 50.0, 30));
  CHECK(negative_norm_monitor(series, 50.0).pass);
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series.times[i] > 1.0) CHECK(series.values[i] <= series.values[i - 1] * (1.0 + 1e-12));
  }

  NormSeries growing;
  for (int i = 0; i <= 10; ++i) growing.push(i, 1.0 + 0.05 * i);
  CHECK(!negative_norm_monitor(growing, 10.0).pass);
  CHECK(negative_norm_monitor(growing, 2.0).pass);
  CHECK_THROWS_AS(negative_norm_monitor(NormSeries{}, 10.0), PreconditionError);
}

TEST_CASE("report round trip") {
  Verdict v;
  v.check = "decay";
  v.quantity = "carrier";
  v.l = 2;
  v.data_class = "s=1.5";
  v.predicted = -1.75;
  v.measured = -1.7741234567890123;
  v.tolerance = 0.03;
  v.pass = true;
  v.t0 = 100;
  v.t1 = 10000;
  const auto text = format_report({v, v});
  const auto back = parse_report(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].measured == v.measured);
  CHECK(back[1].pass);
  CHECK(format_report(back) == text);
  CHECK_THROWS_AS(parse_report("nope\n"), PreconditionError);
}
