#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lognokit/siglognormal.hpp"
#include "lognokit/types.hpp"

namespace lognokit {

struct CohortStats {
  std::size_t n_samples = 0;
  double duration_mean = 0.0, duration_std = 0.0;
  double n_logn_mean = 0.0, n_logn_std = 0.0;
  double snr_mean = 0.0, snr_std = 0.0;
};

/// Sample mean / sample std (n-1) of duration, component count and SNR.
/// Throws TooFewReports for fewer than 2 reports.
CohortStats cohort_stats(std::span<const ReconstructionResult> reports);

enum class RankMethod { Exact, NormalApprox };

struct RankTestResult {
  double u_statistic = 0.0;  // U of the first sample
  double p_two_sided = 1.0;  // in (0, 1]
  RankMethod method = RankMethod::Exact;
};

/// Mann-Whitney U with midrank ties. Exact two-sided p by full enumeration
/// of rank splits when n1+n2 <= 12 and the pooled values are tie-free;
/// otherwise the tie-corrected normal approximation with continuity
/// correction. Throws EmptySample.
RankTestResult mann_whitney_u(std::span<const double> a,
                              std::span<const double> b);

// --- synthetic cohorts -------------------------------------------------------

struct SynthCohortConfig {
  int n_subjects = 20;
  int movements_per_subject = 10;
  double duration_mean_s = 4.1;
  double duration_std_s = 1.0;
  double components_mean = 17.3;
  double components_std = 4.7;
  double noise_snr_db = 24.0;  // +inf means noiseless
  double drift_slope = 0.02;   // m/s^3
  std::uint64_t seed = 1;
};

struct SynthCohort {
  std::vector<SensorLog> logs;
  std::vector<SigmaLognormalModel> truth;
  std::vector<MovementClass> classes;
};

/// Deterministic synthetic movements: Sigma-Lognormal strokes are drawn per
/// movement, synthesized to velocity, differentiated to acceleration
/// (central differences), and corrupted with white noise at noise_snr_db
/// plus a linear drift of drift_slope along a random direction. Euler-angle
/// channels swing with class-dependent gains so window statistics separate
/// the four movements. Throws InvalidConfig.
SynthCohort synth_cohort(const SynthCohortConfig& cfg,
                         Cohort cohort = Cohort::Healthy);

/// Demo cohort configs used by `lognokit synth --demo` and the bundled data.
SynthCohortConfig demo_healthy_config();
SynthCohortConfig demo_patient_config();

/// Parse a `key = value` generator config ('#' comments, `inf` accepted for
/// noise_snr_db). Unknown keys throw InvalidConfig.
SynthCohortConfig synth_config_from_file(const std::string& path);

// --- serialization -----------------------------------------------------------

/// Sensor CSV writer (the inverse of parse_log up to 1e-9 per field).
std::string log_to_csv(const SensorLog& log);

std::string meta_to_json(const SessionMeta& meta);

std::string labels_to_csv(const std::vector<LabeledSpan>& spans);

/// Static SVG polyline plot: observed speed, reconstructed speed, and each
/// component's profile in light strokes.
std::string speed_svg(std::span<const double> t, std::span<const Vec3> v_obs,
                      const ReconstructionResult& rec);

// --- pipeline ----------------------------------------------------------------

struct PipelineConfig {
  std::uint64_t seed = 42;
  Scenario scenario = Scenario::L1;
  std::string segmenter = "given";  // given | spot | window
  double rate_hz = 100.0;
  double cutoff_hz = 10.0;
  bool detrend = true;
  std::string acc_unit = "ms2";  // ms2 | g
  double window_s = 4.0;
  double k_sigma = 2.0;
  double min_sep_s = 1.0;
  double half_width_s = 2.0;
  double target_snr_db = 25.0;
  std::size_t max_components = 40;
  std::string model_path;  // optional SVM model for spot/window segments
  bool svg = true;
};

/// Parse a `key = value` config file ('#' comments). Unknown keys throw
/// InvalidConfig.
PipelineConfig pipeline_config_from_file(const std::string& path);

struct MovementRecord {
  std::string log_name;
  std::string subject_id;
  Cohort cohort = Cohort::Healthy;
  MovementClass cls = MovementClass::NonTarget;
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_s = 0.0;
  std::size_t n_components = 0;
  double snr_db = 0.0;
};

struct PipelineResult {
  std::vector<MovementRecord> movements;
  std::map<std::string, CohortStats> cohorts;
  std::map<std::string, RankTestResult> rank_tests;
  std::string report_json;  // bytes written to report.json
};

/// ingest -> preprocess -> segment -> (classify | labels) -> extract ->
/// report. Reads every *.csv in input_dir (sorted by name) with optional
/// `<name>.meta.json` / `<name>.labels.csv` sidecars, writes report.json,
/// cohort_table.csv, per_movement.csv and one SVG per movement into out_dir.
/// Throws Error subclasses with file context on failure.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::string& input_dir,
                            const std::string& out_dir);

}  // namespace lognokit
