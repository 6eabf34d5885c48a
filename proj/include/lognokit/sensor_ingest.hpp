#pragma once

#include <string_view>
#include <vector>

#include "lognokit/types.hpp"

namespace lognokit {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2 per g

/// Parse a sensor CSV document.
///
/// Expected header: `t,ax,ay,az,gx,gy,gz,mx,my,mz,roll,pitch,yaw`.
/// A magnetometer-less variant (`t,ax,ay,az,gx,gy,gz,roll,pitch,yaw`) is
/// accepted; the mag channels are filled with zeros.
///
/// Throws MalformedHeader, NonFiniteValue(row) for unparsable or non-finite
/// fields, NonMonotonicTime(row) for non-increasing or negative timestamps
/// (row numbers are 1-based over data rows). The nominal rate is inferred
/// from the median timestamp step (default 100 Hz for single-sample logs).
SensorLog parse_log(std::string_view text, const SessionMeta& meta);

/// Multiply the acceleration channel in place (g -> m/s^2 conversions).
void scale_acceleration(SensorLog& log, double factor);

/// Resample every channel onto the uniform grid t_first + k/rate_hz by
/// linear interpolation. Throws TooFewSamples for logs shorter than 2.
SensorLog resample_uniform(const SensorLog& log, double rate_hz);

struct SyncResult {
  SensorLog a;
  SensorLog b;
  double lag_s = 0.0;  // time by which b lagged a
};

/// Align two same-rate logs by maximizing the normalized cross-correlation
/// of their acceleration magnitudes over integer sample lags |lag| <=
/// max_lag_s, then crop both to the common span (timestamps rebased to 0).
/// Throws FlatSignal when either magnitude has zero variance and
/// InsufficientOverlap when fewer than 1 s of samples remain at every lag.
SyncResult synchronize_pair(const SensorLog& a, const SensorLog& b,
                            double max_lag_s);

/// Sidecar metadata: keys subject_id, cohort, wrist, scenario, session_index.
SessionMeta meta_from_json(std::string_view text);

/// Label file rows `start_s,end_s,class` with class in {M1,M2,M3,M4,NONE}.
std::vector<LabeledSpan> labels_from_csv(std::string_view text);

/// Convert labeled spans to sample-index segments for a log at rate_hz.
std::vector<Segment> segments_from_labels(const std::vector<LabeledSpan>& spans,
                                          std::size_t log_len, double rate_hz);

}  // namespace lognokit
