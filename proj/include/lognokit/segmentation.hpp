#pragma once

#include <span>
#include <string>
#include <vector>

#include "lognokit/types.hpp"

namespace lognokit {

/// Tile [0, log_len) with non-overlapping windows of round(window_s*rate_hz)
/// samples. A trailing remainder shorter than half a window is dropped,
/// otherwise kept as a final shorter segment. Throws WindowLongerThanLog.
std::vector<Segment> window_segments(std::size_t log_len, double window_s,
                                     double rate_hz);

/// Gesture spotting: local maxima of the speed profile above
/// mean + k_sigma*std. Peaks closer than min_sep_s are merged keeping the
/// larger; each surviving peak yields a segment of +-half_width_s around it,
/// clamped to the signal. An empty result is legal.
std::vector<Segment> spot_gestures(std::span<const double> speed,
                                   double rate_hz, double k_sigma = 2.0,
                                   double min_sep_s = 1.0,
                                   double half_width_s = 2.0);

/// Segment listing `start_s,end_s,source`.
std::string segments_to_csv(const std::vector<Segment>& segments,
                            double rate_hz);

}  // namespace lognokit
