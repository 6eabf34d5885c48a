#include "lognokit/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

namespace lognokit {

std::vector<Segment> window_segments(std::size_t log_len, double window_s,
                                     double rate_hz) {
  const std::size_t w =
      static_cast<std::size_t>(std::llround(window_s * rate_hz));
  if (w == 0 || log_len < w) throw WindowLongerThanLog();

  std::vector<Segment> out;
  std::size_t start = 0;
  while (start + w <= log_len) {
    out.push_back({start, start + w, SegmentSource::Window, std::nullopt});
    start += w;
  }
  const std::size_t rem = log_len - start;
  if (rem * 2 >= w && rem > 0)
    out.push_back({start, log_len, SegmentSource::Window, std::nullopt});
  return out;
}

std::vector<Segment> spot_gestures(std::span<const double> speed,
                                   double rate_hz, double k_sigma,
                                   double min_sep_s, double half_width_s) {
  std::vector<Segment> out;
  if (speed.size() < 3) return out;

  const double threshold = mean(speed) + k_sigma * population_std(speed);

  // Local maxima above threshold (plateaus count once, at their left edge).
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < speed.size(); ++i) {
    if (speed[i] > threshold && speed[i] > speed[i - 1] &&
        speed[i] >= speed[i + 1])
      peaks.push_back(i);
  }

  // Greedy suppression: keep the tallest, drop anything within min_sep_s.
  std::vector<std::size_t> order(peaks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return speed[peaks[a]] > speed[peaks[b]];
  });
  const double min_sep = min_sep_s * rate_hz;
  std::vector<bool> alive(peaks.size(), true);
  std::vector<std::size_t> kept;
  for (std::size_t oi : order) {
    if (!alive[oi]) continue;
    kept.push_back(peaks[oi]);
    for (std::size_t oj = 0; oj < peaks.size(); ++oj) {
      if (oj == oi || !alive[oj]) continue;
      if (std::abs(static_cast<double>(peaks[oi]) -
                   static_cast<double>(peaks[oj])) < min_sep)
        alive[oj] = false;
    }
  }
  std::sort(kept.begin(), kept.end());

  const long half = static_cast<long>(std::llround(half_width_s * rate_hz));
  for (std::size_t p : kept) {
    Segment seg;
    const long lo = static_cast<long>(p) - half;
    const long hi = static_cast<long>(p) + half;
    seg.start = static_cast<std::size_t>(std::max<long>(0, lo));
    seg.end = std::min<std::size_t>(speed.size(),
                                    static_cast<std::size_t>(std::max<long>(0, hi)));
    seg.source = SegmentSource::Spotted;
    if (seg.start < seg.end) out.push_back(seg);
  }
  return out;
}

std::string segments_to_csv(const std::vector<Segment>& segments,
                            double rate_hz) {
  std::string out = "start_s,end_s,source\n";
  char buf[96];
  for (const auto& s : segments) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%s\n",
                  static_cast<double>(s.start) / rate_hz,
                  static_cast<double>(s.end) / rate_hz,
                  s.source == SegmentSource::Window ? "window" : "spotted");
    out += buf;
  }
  return out;
}

}  // namespace lognokit
