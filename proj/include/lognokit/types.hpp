#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lognokit {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double squared_norm() const { return x * x + y * y + z * z; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

enum class Cohort { Healthy, Patient };
enum class Wrist { Left, Right };
enum class Scenario { L1, L2 };

/// The four Fugl-Meyer-inspired target movements plus the L2 reject class.
enum class MovementClass {
  M1_ShoulderExtFlex = 0,
  M2_ShoulderAddAbd = 1,
  M3_ShoulderRotation = 2,
  M4_ElbowFlexExt = 3,
  NonTarget = 4,
};

inline constexpr int kNumClasses = 5;

std::string to_string(Cohort c);
std::string to_string(Wrist w);
std::string to_string(Scenario s);
std::string to_string(MovementClass m);  // M1..M4, NONE

std::optional<Cohort> cohort_from_string(std::string_view s);
std::optional<Wrist> wrist_from_string(std::string_view s);
std::optional<Scenario> scenario_from_string(std::string_view s);
std::optional<MovementClass> movement_class_from_string(std::string_view s);

struct SessionMeta {
  std::string subject_id = "unknown";
  Cohort cohort = Cohort::Healthy;
  Wrist wrist = Wrist::Left;
  Scenario scenario = Scenario::L1;
  int session_index = 1;
};

/// One 100 Hz record: user acceleration (gravity removed), rotation rate,
/// magnetic field and device attitude as Euler angles (roll, pitch, yaw).
struct ImuSample {
  double t = 0.0;  // seconds since session start
  Vec3 acc;        // m/s^2
  Vec3 gyro;       // rad/s
  Vec3 mag;        // microtesla
  Vec3 euler;      // rad, x=roll y=pitch z=yaw
};

struct SensorLog {
  std::vector<ImuSample> samples;
  double rate_hz = 100.0;
  SessionMeta meta;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return samples.size() < 2 ? 0.0 : samples.back().t - samples.front().t;
  }
};

enum class SegmentSource { Window, Spotted };

/// Half-open sample-index range [start, end) within one log.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  SegmentSource source = SegmentSource::Window;
  std::optional<MovementClass> label;

  std::size_t length() const { return end - start; }
};

/// Ground-truth span from a label file, in seconds.
struct LabeledSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  MovementClass cls = MovementClass::NonTarget;
};

}  // namespace lognokit
