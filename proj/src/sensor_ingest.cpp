#include "lognokit/sensor_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

namespace lognokit {

namespace {

constexpr std::string_view kFullHeader =
    "t,ax,ay,az,gx,gy,gz,mx,my,mz,roll,pitch,yaw";
constexpr std::string_view kNoMagHeader = "t,ax,ay,az,gx,gy,gz,roll,pitch,yaw";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// Splits into at most max_fields comma-separated views; returns count.
std::size_t split_csv(std::string_view line, std::string_view* out,
                      std::size_t max_fields) {
  std::size_t n = 0;
  while (n < max_fields) {
    const auto comma = line.find(',');
    out[n++] = trim(comma == std::string_view::npos ? line
                                                    : line.substr(0, comma));
    if (comma == std::string_view::npos) return n;
    line.remove_prefix(comma + 1);
  }
  return n;
}

bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

SensorLog parse_log(std::string_view text, const SessionMeta& meta) {
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    return true;
  };

  std::string_view header;
  if (!next_line(header)) throw MalformedHeader("<empty document>");
  bool has_mag = true;
  if (header == kFullHeader) {
    has_mag = true;
  } else if (header == kNoMagHeader) {
    has_mag = false;
  } else {
    throw MalformedHeader(std::string(header));
  }
  const std::size_t n_fields = has_mag ? 13 : 10;

  SensorLog log;
  log.meta = meta;
  std::string_view line;
  std::size_t row = 0;
  while (next_line(line)) {
    if (line.empty()) continue;
    ++row;
    std::string_view fields[13];
    if (split_csv(line, fields, 13) != n_fields) throw NonFiniteValue(row);
    double v[13] = {};
    for (std::size_t i = 0; i < n_fields; ++i) {
      if (!parse_double(fields[i], v[i]) || !std::isfinite(v[i]))
        throw NonFiniteValue(row);
    }
    ImuSample s;
    s.t = v[0];
    s.acc = {v[1], v[2], v[3]};
    s.gyro = {v[4], v[5], v[6]};
    if (has_mag) {
      s.mag = {v[7], v[8], v[9]};
      s.euler = {v[10], v[11], v[12]};
    } else {
      s.euler = {v[7], v[8], v[9]};
    }
    // Negative time violates t >= 0; reported as an ordering defect since
    // the error vocabulary has no dedicated case.
    if (s.t < 0.0) throw NonMonotonicTime(row);
    if (!log.samples.empty() && s.t <= log.samples.back().t)
      throw NonMonotonicTime(row);
    log.samples.push_back(s);
  }

  if (log.samples.size() >= 2) {
    std::vector<double> dts;
    dts.reserve(log.samples.size() - 1);
    for (std::size_t i = 1; i < log.samples.size(); ++i)
      dts.push_back(log.samples[i].t - log.samples[i - 1].t);
    std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
    const double median_dt = dts[dts.size() / 2];
    log.rate_hz = 1.0 / median_dt;
  }
  return log;
}

void scale_acceleration(SensorLog& log, double factor) {
  for (auto& s : log.samples) s.acc = s.acc * factor;
}

namespace {

ImuSample lerp_sample(const ImuSample& a, const ImuSample& b, double t) {
  const double w = (t - a.t) / (b.t - a.t);
  auto mix = [w](const Vec3& u, const Vec3& v) { return u + (v - u) * w; };
  ImuSample out;
  out.t = t;
  out.acc = mix(a.acc, b.acc);
  out.gyro = mix(a.gyro, b.gyro);
  out.mag = mix(a.mag, b.mag);
  out.euler = mix(a.euler, b.euler);
  return out;
}

}  // namespace

SensorLog resample_uniform(const SensorLog& log, double rate_hz) {
  if (log.samples.size() < 2) throw TooFewSamples();
  const double t0 = log.samples.front().t;
  const double span = log.samples.back().t - t0;
  const std::size_t k_max =
      static_cast<std::size_t>(std::floor(span * rate_hz + 1e-9));

  SensorLog out;
  out.meta = log.meta;
  out.rate_hz = rate_hz;
  out.samples.reserve(k_max + 1);
  std::size_t j = 0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double t = t0 + static_cast<double>(k) / rate_hz;
    while (j + 2 < log.samples.size() && log.samples[j + 1].t <= t) ++j;
    const ImuSample& a = log.samples[j];
    const ImuSample& b = log.samples[j + 1];
    if (t == a.t) {
      ImuSample s = a;
      out.samples.push_back(s);
    } else if (t == b.t) {
      ImuSample s = b;
      out.samples.push_back(s);
    } else {
      out.samples.push_back(lerp_sample(a, b, t));
    }
  }
  return out;
}

SyncResult synchronize_pair(const SensorLog& a, const SensorLog& b,
                            double max_lag_s) {
  const double rate = a.rate_hz;
  std::vector<double> ma(a.size()), mb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ma[i] = a.samples[i].acc.norm();
  for (std::size_t i = 0; i < b.size(); ++i) mb[i] = b.samples[i].acc.norm();

  if (population_variance(ma) == 0.0 || population_variance(mb) == 0.0)
    throw FlatSignal();

  const long max_lag = static_cast<long>(std::floor(max_lag_s * rate + 1e-9));
  const long min_overlap = static_cast<long>(std::ceil(rate));  // 1 s

  // b[k + L] against a[k]; L > 0 means b lags a.
  double best_corr = -std::numeric_limits<double>::infinity();
  long best_lag = 0;
  bool any = false;
  for (long lag = -max_lag; lag <= max_lag; ++lag) {
    const long k_lo = std::max<long>(0, -lag);
    const long k_hi = std::min<long>(static_cast<long>(ma.size()),
                                     static_cast<long>(mb.size()) - lag);
    const long n = k_hi - k_lo;
    if (n < min_overlap) continue;
    any = true;
    double sa = 0, sb = 0;
    for (long k = k_lo; k < k_hi; ++k) {
      sa += ma[k];
      sb += mb[k + lag];
    }
    const double mean_a = sa / n, mean_b = sb / n;
    double num = 0, da = 0, db = 0;
    for (long k = k_lo; k < k_hi; ++k) {
      const double u = ma[k] - mean_a;
      const double v = mb[k + lag] - mean_b;
      num += u * v;
      da += u * u;
      db += v * v;
    }
    if (da == 0.0 || db == 0.0) continue;
    const double corr = num / std::sqrt(da * db);
    if (corr > best_corr) {
      best_corr = corr;
      best_lag = lag;
    }
  }
  if (!any || !std::isfinite(best_corr)) throw InsufficientOverlap();

  const long k_lo = std::max<long>(0, -best_lag);
  const long k_hi = std::min<long>(static_cast<long>(ma.size()),
                                   static_cast<long>(mb.size()) - best_lag);

  SyncResult r;
  r.lag_s = static_cast<double>(best_lag) / rate;
  r.a.meta = a.meta;
  r.a.rate_hz = rate;
  r.b.meta = b.meta;
  r.b.rate_hz = rate;
  for (long k = k_lo; k < k_hi; ++k) {
    ImuSample sa = a.samples[k];
    ImuSample sb = b.samples[k + best_lag];
    const double t = static_cast<double>(k - k_lo) / rate;
    sa.t = t;
    sb.t = t;
    r.a.samples.push_back(sa);
    r.b.samples.push_back(sb);
  }
  return r;
}

SessionMeta meta_from_json(std::string_view text) {
  SessionMeta meta;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad metadata JSON: ") + e.what());
  }
  if (j.contains("subject_id")) meta.subject_id = j["subject_id"].get<std::string>();
  if (j.contains("cohort")) {
    auto c = cohort_from_string(j["cohort"].get<std::string>());
    if (!c) throw Error("bad metadata cohort");
    meta.cohort = *c;
  }
  if (j.contains("wrist")) {
    auto w = wrist_from_string(j["wrist"].get<std::string>());
    if (!w) throw Error("bad metadata wrist");
    meta.wrist = *w;
  }
  if (j.contains("scenario")) {
    auto s = scenario_from_string(j["scenario"].get<std::string>());
    if (!s) throw Error("bad metadata scenario");
    meta.scenario = *s;
  }
  if (j.contains("session_index")) {
    meta.session_index = j["session_index"].get<int>();
    if (meta.session_index < 1) throw Error("session_index must be positive");
  }
  return meta;
}

std::vector<LabeledSpan> labels_from_csv(std::string_view text) {
  std::vector<LabeledSpan> spans;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "start_s,end_s,class") continue;  // header optional
    }
    std::string_view fields[3];
    if (split_csv(line, fields, 3) != 3)
      throw Error("bad label row: " + std::string(line));
    LabeledSpan span;
    if (!parse_double(fields[0], span.start_s) ||
        !parse_double(fields[1], span.end_s) || span.end_s <= span.start_s)
      throw Error("bad label span: " + std::string(line));
    auto cls = movement_class_from_string(fields[2]);
    if (!cls) throw Error("bad label class: " + std::string(fields[2]));
    span.cls = *cls;
    spans.push_back(span);
  }
  return spans;
}

std::vector<Segment> segments_from_labels(const std::vector<LabeledSpan>& spans,
                                          std::size_t log_len, double rate_hz) {
  std::vector<Segment> out;
  for (const auto& span : spans) {
    Segment seg;
    seg.start = static_cast<std::size_t>(
        std::max(0.0, std::round(span.start_s * rate_hz)));
    seg.end = std::min<std::size_t>(
        log_len, static_cast<std::size_t>(std::round(span.end_s * rate_hz)));
    if (seg.start >= seg.end) continue;
    seg.source = SegmentSource::Window;
    seg.label = span.cls;
    out.push_back(seg);
  }
  return out;
}

}  // namespace lognokit
