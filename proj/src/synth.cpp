#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"
#include "lognokit/report.hpp"
#include "lognokit/siglognormal.hpp"

namespace lognokit {

namespace {

constexpr double kRate = 100.0;

// Per-class stroke geometry: base azimuth/elevation, azimuth swing per
// stroke, and Euler-channel gains (roll, pitch, yaw). These make the four
// movements statistically distinct in both acceleration and attitude.
struct ClassProfile {
  double theta_base;
  double phi_base;
  double theta_swing;
  double phi_swing;
  double amp;
  double gain_roll, gain_pitch, gain_yaw;
};

const ClassProfile kProfiles[4] = {
    {0.0, 0.10, 0.35, 0.10, 1.00, 0.15, 0.90, 0.10},   // M1
    {M_PI_2, -0.15, 0.55, 0.15, 1.10, 0.85, 0.10, 0.20}, // M2
    {M_PI, 0.35, 1.10, 0.05, 0.80, 0.20, 0.15, 0.95},  // M3
    {-M_PI_2, 0.00, 0.25, 0.20, 0.90, 0.50, 0.45, 0.10}, // M4
};

}  // namespace

SynthCohort synth_cohort(const SynthCohortConfig& cfg, Cohort cohort) {
  if (cfg.n_subjects <= 0 || cfg.movements_per_subject <= 0)
    throw InvalidConfig("counts must be positive");
  if (cfg.duration_mean_s <= 0.0 || cfg.duration_std_s < 0.0)
    throw InvalidConfig("bad duration distribution");
  if (cfg.components_mean <= 0.0 || cfg.components_std < 0.0)
    throw InvalidConfig("bad component-count distribution");
  if (std::isnan(cfg.noise_snr_db))
    throw InvalidConfig("noise_snr_db must be finite or +inf");

  Rng rng(cfg.seed);
  SynthCohort out;

  for (int subj = 0; subj < cfg.n_subjects; ++subj) {
    char sid[32];
    std::snprintf(sid, sizeof(sid), "%s%02d",
                  cohort == Cohort::Healthy ? "H" : "P", subj + 1);
    for (int mv = 0; mv < cfg.movements_per_subject; ++mv) {
      const int cls_idx = (subj * cfg.movements_per_subject + mv) % 4;
      const ClassProfile& prof = kProfiles[cls_idx];

      const double duration = std::clamp(
          rng.gaussian(cfg.duration_mean_s, cfg.duration_std_s), 1.5, 10.0);
      const int n_comp = std::clamp(
          static_cast<int>(std::lround(
              rng.gaussian(cfg.components_mean, cfg.components_std))),
          1, 60);

      // Strokes of alternating direction spread over the movement span.
      SigmaLognormalModel model;
      const double span_lo = 0.10 * duration;
      const double span_hi = 0.72 * duration;
      const double amp = prof.amp * rng.uniform(0.6, 1.4);
      const double theta_jitter = rng.gaussian(0.0, 0.15);
      const double phi_jitter = rng.gaussian(0.0, 0.08);
      for (int i = 0; i < n_comp; ++i) {
        LognormalComponent3D c;
        const double slot = (static_cast<double>(i) + rng.uniform(0.15, 0.85)) /
                            static_cast<double>(n_comp);
        c.t0 = span_lo + slot * (span_hi - span_lo);
        c.sigma = rng.uniform(0.32, 0.45);
        // Draw the stroke's time width directly: slow enough that the
        // sampled differentiate-integrate cycle is transparent at 100 Hz,
        // short enough to fit the recording.
        const double width_s =
            std::min(rng.uniform(0.21, 0.33), duration / 11.0);
        c.mu = std::log(width_s / c.sigma);
        // keep the stroke inside the recording, tails included
        const double tail = std::exp(c.mu + 3.5 * c.sigma);
        if (c.t0 + tail > 0.97 * duration)
          c.t0 = std::max(0.02 * duration, 0.97 * duration - tail);
        c.D = amp * rng.uniform(0.5, 1.5) / std::sqrt(double(n_comp));
        const double flip = (i % 2 == 0) ? 0.0 : M_PI;
        c.theta_s = prof.theta_base + theta_jitter + flip +
                    rng.gaussian(0.0, 0.12);
        c.theta_e = c.theta_s + prof.theta_swing * rng.gaussian(1.0, 0.3);
        c.phi_s = std::clamp(
            prof.phi_base + phi_jitter + rng.gaussian(0.0, 0.06), -1.3, 1.3);
        c.phi_e = std::clamp(
            c.phi_s + prof.phi_swing * rng.gaussian(1.0, 0.3) *
                          ((i % 2 == 0) ? 1.0 : -1.0),
            -M_PI_2, M_PI_2);
        model.components.push_back(c);
      }
      std::stable_sort(model.components.begin(), model.components.end(),
                       [](const auto& a, const auto& b) { return a.t0 < b.t0; });

      const std::size_t n_samples =
          static_cast<std::size_t>(std::lround(duration * kRate)) + 1;
      std::vector<double> t(n_samples);
      for (std::size_t k = 0; k < n_samples; ++k)
        t[k] = static_cast<double>(k) / kRate;
      const std::vector<Vec3> v_true = synthesize_velocity(model, t);

      // central differences back to acceleration
      std::vector<Vec3> acc(n_samples);
      acc[0] = (v_true[1] - v_true[0]) * kRate;
      acc[n_samples - 1] =
          (v_true[n_samples - 1] - v_true[n_samples - 2]) * kRate;
      for (std::size_t k = 1; k + 1 < n_samples; ++k)
        acc[k] = (v_true[k + 1] - v_true[k - 1]) * (0.5 * kRate);

      if (std::isfinite(cfg.noise_snr_db)) {
        double power = 0.0;
        for (const auto& a : acc) power += a.squared_norm();
        power /= static_cast<double>(3 * n_samples);
        const double sigma_n =
            std::sqrt(power * std::pow(10.0, -cfg.noise_snr_db / 10.0));
        for (auto& a : acc) {
          a.x += rng.gaussian(0.0, sigma_n);
          a.y += rng.gaussian(0.0, sigma_n);
          a.z += rng.gaussian(0.0, sigma_n);
        }
      }
      if (cfg.drift_slope != 0.0) {
        Vec3 dir{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        const double norm = dir.norm();
        if (norm > 0.0) dir = dir * (1.0 / norm);
        for (std::size_t k = 0; k < n_samples; ++k)
          acc[k] += dir * (cfg.drift_slope * (t[k] - duration / 2.0));
      }

      // Attitude swings with the signed stroke progress, class-scaled.
      double d_total = 0.0;
      for (const auto& c : model.components) d_total += c.D;
      const double gr = prof.gain_roll * rng.gaussian(1.0, 0.12);
      const double gp = prof.gain_pitch * rng.gaussian(1.0, 0.12);
      const double gy = prof.gain_yaw * rng.gaussian(1.0, 0.12);
      std::vector<Vec3> euler(n_samples);
      for (std::size_t k = 0; k < n_samples; ++k) {
        double w = 0.0;
        for (std::size_t ci = 0; ci < model.components.size(); ++ci) {
          const double sgn = (ci % 2 == 0) ? 1.0 : -1.0;
          w += sgn * model.components[ci].D *
               cumulative_fraction(model.components[ci], t[k]);
        }
        w /= std::max(d_total, 1e-12);
        euler[k] = {gr * w + rng.gaussian(0.0, 0.02),
                    gp * w + rng.gaussian(0.0, 0.02),
                    gy * w + rng.gaussian(0.0, 0.02)};
      }

      SensorLog log;
      log.rate_hz = kRate;
      log.meta.subject_id = sid;
      log.meta.cohort = cohort;
      log.meta.wrist = (mv % 2 == 0) ? Wrist::Left : Wrist::Right;
      log.meta.scenario = Scenario::L1;
      log.meta.session_index = 1;
      log.samples.resize(n_samples);
      for (std::size_t k = 0; k < n_samples; ++k) {
        ImuSample& s = log.samples[k];
        s.t = t[k];
        s.acc = acc[k];
        s.euler = euler[k];
        if (k == 0)
          s.gyro = (euler[1] - euler[0]) * kRate;
        else if (k + 1 == n_samples)
          s.gyro = (euler[k] - euler[k - 1]) * kRate;
        else
          s.gyro = (euler[k + 1] - euler[k - 1]) * (0.5 * kRate);
        s.mag = {30.0 + rng.gaussian(0.0, 0.5), 5.0 + rng.gaussian(0.0, 0.5),
                 -20.0 + rng.gaussian(0.0, 0.5)};
      }

      out.logs.push_back(std::move(log));
      out.truth.push_back(std::move(model));
      out.classes.push_back(static_cast<MovementClass>(cls_idx));
    }
  }
  return out;
}

}  // namespace lognokit
