#include "lognokit/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

namespace lognokit {

std::vector<double> detrend(std::span<const double> x) {
  if (x.size() < 2) throw TooFewSamples();
  std::vector<double> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = static_cast<double>(i);
  const auto [slope, intercept] = fit_line(t, x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = x[i] - (slope * t[i] + intercept);
  return out;
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Bilinear-transform Butterworth low-pass, -3 dB at cutoff by prewarp.
Biquad butterworth_lowpass(double rate_hz, double cutoff_hz) {
  const double k = std::tan(M_PI * cutoff_hz / rate_hz);
  const double sqrt2 = std::sqrt(2.0);
  const double norm = 1.0 / (1.0 + sqrt2 * k + k * k);
  Biquad q;
  q.b0 = k * k * norm;
  q.b1 = 2.0 * q.b0;
  q.b2 = q.b0;
  q.a1 = 2.0 * (k * k - 1.0) * norm;
  q.a2 = (1.0 - sqrt2 * k + k * k) * norm;
  return q;
}

// Direct form II transposed, state seeded for step steady state at x0.
void filt_in_place(const Biquad& q, std::vector<double>& x) {
  // Steady-state response to a constant x0 is x0 (DC gain 1); the matching
  // internal state removes the startup transient for constant inputs.
  const double x0 = x.empty() ? 0.0 : x.front();
  double z1 = x0 * (q.b1 + q.b2 - (q.a1 + q.a2));
  double z2 = x0 * (q.b2 - q.a2);
  for (double& v : x) {
    const double in = v;
    const double out = q.b0 * in + z1;
    z1 = q.b1 * in - q.a1 * out + z2;
    z2 = q.b2 * in - q.a2 * out;
    v = out;
  }
}

}  // namespace

std::vector<double> lowpass(std::span<const double> x, double rate_hz,
                            double cutoff_hz) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate_hz / 2.0))
    throw InvalidCutoff(cutoff_hz, rate_hz);
  if (x.size() < 2) return std::vector<double>(x.begin(), x.end());

  const Biquad q = butterworth_lowpass(rate_hz, cutoff_hz);

  // Odd-reflection padding on both ends shields the signal from the
  // filter's edge transients.
  const std::size_t pad =
      std::min<std::size_t>(x.size() - 1,
                            static_cast<std::size_t>(3.0 * rate_hz / cutoff_hz));
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i)
    ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i)
    ext.push_back(2.0 * x.back() - x[x.size() - 1 - i]);

  filt_in_place(q, ext);
  std::reverse(ext.begin(), ext.end());
  filt_in_place(q, ext);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<long>(pad),
                             ext.begin() + static_cast<long>(pad + x.size()));
}

VelocityProfile integrate_velocity(std::span<const Vec3> acc, double rate_hz) {
  for (const Vec3& a : acc)
    if (!a.finite()) throw Error("acceleration contains non-finite values");
  if (acc.size() < 2) throw TooFewSamples();
  const double dt = 1.0 / rate_hz;
  const std::size_t n = acc.size();

  VelocityProfile p;
  p.t.resize(n);
  p.v.resize(n);
  p.speed.resize(n);

  Vec3 v{};
  p.v[0] = v;
  for (std::size_t i = 1; i < n; ++i) {
    v += (acc[i - 1] + acc[i]) * (0.5 * dt);
    p.v[i] = v;
  }
  // Remove the line through the endpoints: rest-to-rest gestures must start
  // and end with zero velocity, and this pins residual integration drift.
  const Vec3 v_end = p.v[n - 1];
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    p.t[i] = static_cast<double>(i) * dt;
    p.v[i] -= v_end * (static_cast<double>(i) / denom);
    p.speed[i] = p.v[i].norm();
  }
  p.v[0] = Vec3{};
  p.v[n - 1] = Vec3{};
  p.speed[0] = 0.0;
  p.speed[n - 1] = 0.0;
  return p;
}

VelocityProfile velocity_from_log(const SensorLog& log, const Segment& seg,
                                  const PreprocessOptions& opt) {
  if (seg.end > log.size() || seg.start >= seg.end)
    throw Error("segment out of range");
  const std::size_t n = seg.length();
  std::vector<double> axis(n);
  std::vector<Vec3> acc(n);

  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& v = log.samples[seg.start + i].acc;
      axis[i] = a == 0 ? v.x : (a == 1 ? v.y : v.z);
    }
    std::vector<double> y = opt.detrend ? detrend(axis) : axis;
    if (opt.cutoff_hz > 0.0 && opt.cutoff_hz < log.rate_hz / 2.0)
      y = lowpass(y, log.rate_hz, opt.cutoff_hz);
    for (std::size_t i = 0; i < n; ++i) {
      if (a == 0)
        acc[i].x = y[i];
      else if (a == 1)
        acc[i].y = y[i];
      else
        acc[i].z = y[i];
    }
  }
  return integrate_velocity(acc, log.rate_hz);
}

}  // namespace lognokit
