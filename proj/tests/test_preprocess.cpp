#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"
#include "lognokit/preprocess.hpp"
#include "test_util.hpp"

using namespace lognokit;

TEST_CASE("detrend removes a pure line") {
  std::vector<double> x;
  for (int i = 0; i < 200; ++i) x.push_back(2.0 * (i / 100.0) + 3.0);
  for (double v : detrend(x)) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("detrend of a constant is zero") {
  std::vector<double> x(64, 5.0);
  for (double v : detrend(x)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("detrend subtracts the independently fitted LS line") {
  std::vector<double> t, x;
  for (int i = 0; i < 100; ++i) {
    t.push_back(static_cast<double>(i));
    x.push_back(std::sin(2.0 * M_PI * i / 100.0) + 0.3 * i - 2.0);
  }
  // oracle: explicit least-squares line on the same index grid
  const auto [slope, intercept] = fit_line(t, x);
  const auto res = detrend(x);
  for (int i = 0; i < 100; ++i)
    CHECK(res[i] ==
          doctest::Approx(x[i] - slope * t[i] - intercept).epsilon(1e-9));
  // residual has no linear trend left
  const auto [res_slope, res_icept] = fit_line(t, res);
  CHECK(std::abs(res_slope) < 1e-9);
  CHECK(std::abs(res_icept) < 1e-9);
}

TEST_CASE("detrend is a projection") {
  Rng rng(5);
  std::vector<double> x;
  for (int i = 0; i < 128; ++i) x.push_back(rng.gaussian(0, 3));
  const auto once = detrend(x);
  const auto twice = detrend(once);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(twice[i] - once[i]) < 1e-12);
}

TEST_CASE("detrend needs two samples") {
  CHECK_THROWS_AS(detrend(std::vector<double>{1.0}), TooFewSamples);
}

TEST_CASE("lowpass passes constants with unit DC gain") {
  std::vector<double> x(400, 7.0);
  for (double v : lowpass(x, 100.0, 10.0)) CHECK(v == doctest::Approx(7.0).epsilon(1e-6));
}

namespace {

// steady-state amplitude of a (near) sinusoid: sqrt(2)*rms over whole periods
double measured_amplitude(const std::vector<double>& y, double rate,
                          double freq) {
  const std::size_t period = static_cast<std::size_t>(std::lround(rate / freq));
  const std::size_t mid = y.size() / 2;
  const std::size_t n_per = std::max<std::size_t>(1, (y.size() / 4) / period);
  const std::size_t len = n_per * period;
  double ss = 0.0;
  for (std::size_t i = mid - len / 2; i < mid + len - len / 2; ++i)
    ss += y[i] * y[i];
  return std::sqrt(2.0 * ss / static_cast<double>(len));
}

}  // namespace

TEST_CASE("lowpass attenuates the cutoff frequency to one half") {
  const double rate = 100.0, cutoff = 5.0;
  std::vector<double> x;
  for (int i = 0; i < 4000; ++i)
    x.push_back(std::sin(2.0 * M_PI * cutoff * i / rate));
  const auto y = lowpass(x, rate, cutoff);
  CHECK(measured_amplitude(y, rate, cutoff) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("lowpass leaves the deep passband untouched") {
  const double rate = 100.0, cutoff = 5.0, f = 0.05 * cutoff;
  std::vector<double> x;
  for (int i = 0; i < 24000; ++i)
    x.push_back(std::sin(2.0 * M_PI * f * i / rate));
  const auto y = lowpass(x, rate, cutoff);
  CHECK(measured_amplitude(y, rate, f) >= 0.99);
}

TEST_CASE("lowpass is linear") {
  Rng rng(17);
  std::vector<double> x, y;
  for (int i = 0; i < 500; ++i) {
    x.push_back(rng.gaussian());
    y.push_back(rng.gaussian());
  }
  const double a = 2.5, b = -1.25;
  std::vector<double> mix(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * y[i];
  const auto fx = lowpass(x, 100.0, 8.0);
  const auto fy = lowpass(y, 100.0, 8.0);
  const auto fmix = lowpass(mix, 100.0, 8.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(fmix[i] - (a * fx[i] + b * fy[i])) < 1e-9);
}

TEST_CASE("lowpass validates the cutoff") {
  std::vector<double> x(16, 0.0);
  CHECK_THROWS_AS(lowpass(x, 100.0, 0.0), InvalidCutoff);
  CHECK_THROWS_AS(lowpass(x, 100.0, 50.0), InvalidCutoff);
  CHECK_THROWS_AS(lowpass(x, 100.0, -3.0), InvalidCutoff);
}

TEST_CASE("integrate_velocity of zero acceleration is zero") {
  std::vector<Vec3> acc(100);
  const VelocityProfile p = integrate_velocity(acc, 100.0);
  for (double s : p.speed) CHECK(s == 0.0);
}

TEST_CASE("constant acceleration is absorbed by the boundary correction") {
  // The raw integral is a ramp; the ramp IS the line through the endpoints,
  // so the corrected velocity vanishes identically.
  std::vector<Vec3> acc(101, Vec3{1.0, 0.0, 0.0});
  const VelocityProfile p = integrate_velocity(acc, 100.0);
  for (double s : p.speed) CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("integrate_velocity matches the analytic antiderivative") {
  // acc_x = A cos(2 pi t) over one period integrates to (A/2pi) sin(2 pi t)
  const double A = 2.0, rate = 100.0;
  std::vector<Vec3> acc;
  for (int k = 0; k <= 100; ++k)
    acc.push_back({A * std::cos(2.0 * M_PI * k / rate), 0, 0});
  const VelocityProfile p = integrate_velocity(acc, rate);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double expected = A / (2.0 * M_PI) * std::sin(2.0 * M_PI * p.t[k]);
    CHECK(std::abs(p.v[k].x - expected) < 1e-3);
  }
}

TEST_CASE("integrated velocity is exactly zero at both ends") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> acc;
    const int n = 50 + static_cast<int>(rng.below(400));
    for (int k = 0; k < n; ++k)
      acc.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
    const VelocityProfile p = integrate_velocity(acc, 100.0);
    CHECK(p.v.front().norm() == 0.0);
    CHECK(p.v.back().norm() == 0.0);
    // speed really is the norm of v
    for (std::size_t k = 0; k < p.size(); ++k)
      CHECK(std::abs(p.speed[k] - p.v[k].norm()) < 1e-12);
  }
}

TEST_CASE("speed is invariant under a fixed rotation of the input") {
  Rng rng(29);
  std::vector<Vec3> acc;
  for (int k = 0; k < 300; ++k)
    acc.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
  const auto rot = testutil::random_rotation(rng);
  std::vector<Vec3> acc_rot;
  for (const auto& a : acc) acc_rot.push_back(testutil::rotate(rot, a));

  const VelocityProfile p = integrate_velocity(acc, 100.0);
  const VelocityProfile q = integrate_velocity(acc_rot, 100.0);
  for (std::size_t k = 0; k < p.size(); ++k)
    CHECK(p.speed[k] == doctest::Approx(q.speed[k]).epsilon(1e-9));
}
