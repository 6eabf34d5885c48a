#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lognokit/classify.hpp"
#include "lognokit/errors.hpp"
#include "lognokit/preprocess.hpp"
#include "lognokit/report.hpp"
#include "lognokit/segmentation.hpp"
#include "lognokit/sensor_ingest.hpp"
#include "lognokit/siglognormal.hpp"

namespace fs = std::filesystem;

namespace lognokit {

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

nlohmann::ordered_json stats_json(const CohortStats& s) {
  nlohmann::ordered_json j;
  j["n_samples"] = s.n_samples;
  j["duration_mean"] = s.duration_mean;
  j["duration_std"] = s.duration_std;
  j["n_logn_mean"] = s.n_logn_mean;
  j["n_logn_std"] = s.n_logn_std;
  j["snr_mean"] = s.snr_mean;
  j["snr_std"] = s.snr_std;
  return j;
}

nlohmann::ordered_json rank_json(const RankTestResult& r) {
  nlohmann::ordered_json j;
  j["u_statistic"] = r.u_statistic;
  j["p_two_sided"] = r.p_two_sided;
  j["method"] = r.method == RankMethod::Exact ? "exact" : "normal_approx";
  return j;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::string& input_dir,
                            const std::string& out_dir) {
  if (!fs::is_directory(input_dir))
    throw Error("input directory not found: " + input_dir);
  fs::create_directories(out_dir);

  // Collect sensor logs (sorted by name; sidecars are not logs).
  std::vector<fs::path> log_files;
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path p = entry.path();
    if (p.extension() != ".csv") continue;
    const std::string stem = p.stem().string();
    if (stem.size() > 7 && stem.ends_with(".labels")) continue;
    log_files.push_back(p);
  }
  std::sort(log_files.begin(), log_files.end());
  if (log_files.empty())
    throw Error("found 0 sensor logs (*.csv) in " + input_dir);

  std::optional<SvmModel> svm;
  if (!config.model_path.empty())
    svm = svm_from_json(slurp(config.model_path));

  PipelineResult result;
  std::map<std::string, std::vector<ReconstructionResult>> by_cohort;
  std::map<std::string, std::vector<double>> snr_by_cohort, dur_by_cohort,
      nc_by_cohort;

  const PreprocessOptions pre_opt{config.cutoff_hz, config.detrend};
  const ExtractConfig extract_cfg{config.target_snr_db, config.max_components};

  for (const auto& path : log_files) {
    const std::string name = path.filename().string();
    try {
      SessionMeta meta;
      const fs::path meta_path =
          path.parent_path() / (path.stem().string() + ".meta.json");
      if (fs::exists(meta_path)) meta = meta_from_json(slurp(meta_path));

      SensorLog log = parse_log(slurp(path), meta);
      if (config.acc_unit == "g") scale_acceleration(log, kStandardGravity);
      log = resample_uniform(log, config.rate_hz);

      // Segmentation: ground-truth labels, spotting, or plain windows.
      std::vector<Segment> segments;
      if (config.segmenter == "given") {
        const fs::path label_path =
            path.parent_path() / (path.stem().string() + ".labels.csv");
        if (!fs::exists(label_path))
          throw Error("label file missing: " + label_path.string());
        segments = segments_from_labels(labels_from_csv(slurp(label_path)),
                                        log.size(), log.rate_hz);
      } else if (config.segmenter == "spot") {
        Segment whole{0, log.size(), SegmentSource::Window, std::nullopt};
        const VelocityProfile vp = velocity_from_log(log, whole, pre_opt);
        segments = spot_gestures(vp.speed, log.rate_hz, config.k_sigma,
                                 config.min_sep_s, config.half_width_s);
      } else {
        segments = window_segments(log.size(), config.window_s, log.rate_hz);
      }

      for (auto& seg : segments) {
        if (!seg.label && svm)
          seg.label = predict(*svm, extract_features(log, seg));
        if (seg.label && *seg.label == MovementClass::NonTarget) continue;
        if (seg.length() < static_cast<std::size_t>(log.rate_hz * 0.5) + 1)
          continue;  // shorter than the extractor's minimum span

        const VelocityProfile vp = velocity_from_log(log, seg, pre_opt);
        ReconstructionResult rec = extract_model(vp.v, vp.t, extract_cfg);

        MovementRecord rec_row;
        rec_row.log_name = name;
        rec_row.subject_id = log.meta.subject_id;
        rec_row.cohort = log.meta.cohort;
        rec_row.cls = seg.label.value_or(MovementClass::NonTarget);
        rec_row.start_s = static_cast<double>(seg.start) / log.rate_hz;
        rec_row.end_s = static_cast<double>(seg.end) / log.rate_hz;
        rec_row.duration_s = rec.duration_s;
        rec_row.n_components = rec.n_components;
        rec_row.snr_db = rec.snr_db;
        result.movements.push_back(rec_row);

        const std::string cohort_key = to_string(log.meta.cohort);
        snr_by_cohort[cohort_key].push_back(rec.snr_db);
        dur_by_cohort[cohort_key].push_back(rec.duration_s);
        nc_by_cohort[cohort_key].push_back(
            static_cast<double>(rec.n_components));

        if (config.svg) {
          char svg_name[128];
          std::snprintf(svg_name, sizeof(svg_name), "%s_seg%03zu.svg",
                        path.stem().string().c_str(),
                        result.movements.size() - 1);
          spit(fs::path(out_dir) / svg_name, speed_svg(vp.t, vp.v, rec));
        }
        by_cohort[cohort_key].push_back(std::move(rec));
      }
    } catch (const Error& e) {
      throw Error(name + ": " + e.what());
    }
  }

  for (const auto& [cohort, recs] : by_cohort)
    if (recs.size() >= 2) result.cohorts[cohort] = cohort_stats(recs);

  if (snr_by_cohort.count("healthy") && snr_by_cohort.count("patient")) {
    result.rank_tests["snr_db"] =
        mann_whitney_u(snr_by_cohort["healthy"], snr_by_cohort["patient"]);
    result.rank_tests["duration_s"] =
        mann_whitney_u(dur_by_cohort["healthy"], dur_by_cohort["patient"]);
    result.rank_tests["n_components"] =
        mann_whitney_u(nc_by_cohort["healthy"], nc_by_cohort["patient"]);
  }

  // report.json
  nlohmann::ordered_json j;
  j["version"] = "1.0";
  auto cohorts = nlohmann::ordered_json::object();
  for (const auto& [name, stats] : result.cohorts)
    cohorts[name] = stats_json(stats);
  j["cohorts"] = std::move(cohorts);
  auto ranks = nlohmann::ordered_json::object();
  for (const auto& [metric, rank] : result.rank_tests)
    ranks[metric] = rank_json(rank);
  j["rank_tests"] = std::move(ranks);
  auto movements = nlohmann::ordered_json::array();
  for (const auto& m : result.movements) {
    nlohmann::ordered_json jm;
    jm["log"] = m.log_name;
    jm["subject_id"] = m.subject_id;
    jm["cohort"] = to_string(m.cohort);
    jm["class"] = to_string(m.cls);
    jm["start_s"] = m.start_s;
    jm["end_s"] = m.end_s;
    jm["duration_s"] = m.duration_s;
    jm["n_components"] = m.n_components;
    jm["snr_db"] = m.snr_db;
    movements.push_back(std::move(jm));
  }
  j["movements"] = std::move(movements);
  result.report_json = j.dump(2) + "\n";
  spit(fs::path(out_dir) / "report.json", result.report_json);

  // cohort_table.csv
  std::string table =
      "cohort,n_samples,duration_mean,duration_std,n_logn_mean,n_logn_std,"
      "snr_mean,snr_std\n";
  char buf[256];
  for (const auto& [name, s] : result.cohorts) {
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n",
                  name.c_str(), s.n_samples, s.duration_mean, s.duration_std,
                  s.n_logn_mean, s.n_logn_std, s.snr_mean, s.snr_std);
    table += buf;
  }
  spit(fs::path(out_dir) / "cohort_table.csv", table);

  // per_movement.csv
  std::string rows =
      "log,subject_id,cohort,class,start_s,end_s,duration_s,n_components,"
      "snr_db\n";
  for (const auto& m : result.movements) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%.3f,%.3f,%.3f,%zu,%.3f\n",
                  m.log_name.c_str(), m.subject_id.c_str(),
                  to_string(m.cohort).c_str(), to_string(m.cls).c_str(),
                  m.start_s, m.end_s, m.duration_s, m.n_components, m.snr_db);
    rows += buf;
  }
  spit(fs::path(out_dir) / "per_movement.csv", rows);

  return result;
}

}  // namespace lognokit
