#pragma once

#include <span>
#include <vector>

#include "lognokit/types.hpp"

namespace lognokit {

/// 3D velocity reconstruction on a uniform grid; speed[k] = |v[k]|.
struct VelocityProfile {
  std::vector<double> t;
  std::vector<Vec3> v;
  std::vector<double> speed;

  std::size_t size() const { return t.size(); }
};

/// Subtract the least-squares line from the signal. The residual has zero
/// mean and zero linear trend. Throws TooFewSamples for length < 2.
std::vector<double> detrend(std::span<const double> x);

/// Zero-phase second-order Butterworth low-pass: the biquad is applied
/// forward then backward over an odd-reflection padded copy, so the net
/// phase is zero and the effective attenuation at cutoff is -6 dB
/// (two passes of -3 dB). DC gain is 1. Throws InvalidCutoff unless
/// 0 < cutoff_hz < rate_hz/2.
std::vector<double> lowpass(std::span<const double> x, double rate_hz,
                            double cutoff_hz);

/// Cumulative trapezoidal integration of user acceleration per axis, then
/// subtraction of the line through the endpoints so that v(start) = v(end)
/// = 0 exactly (discrete gestures begin and end at rest). Throws
/// TooFewSamples for length < 2.
VelocityProfile integrate_velocity(std::span<const Vec3> acc, double rate_hz);

struct PreprocessOptions {
  double cutoff_hz = 10.0;
  bool detrend = true;
};

/// detrend -> lowpass -> integrate for one segment of a log.
VelocityProfile velocity_from_log(const SensorLog& log, const Segment& seg,
                                  const PreprocessOptions& opt = {});

}  // namespace lognokit
