#include "lognokit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

namespace lognokit {

CohortStats cohort_stats(std::span<const ReconstructionResult> reports) {
  if (reports.size() < 2) throw TooFewReports();
  std::vector<double> duration, n_logn, snr;
  duration.reserve(reports.size());
  for (const auto& r : reports) {
    duration.push_back(r.duration_s);
    n_logn.push_back(static_cast<double>(r.n_components));
    snr.push_back(r.snr_db);
  }
  CohortStats s;
  s.n_samples = reports.size();
  s.duration_mean = mean(duration);
  s.duration_std = sample_std(duration);
  s.n_logn_mean = mean(n_logn);
  s.n_logn_std = sample_std(n_logn);
  s.snr_mean = mean(snr);
  s.snr_std = sample_std(snr);
  return s;
}

namespace {

struct RankedPool {
  double rank_sum_a = 0.0;  // midranks of sample a
  bool has_ties = false;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

RankedPool rank_pool(std::span<const double> a, std::span<const double> b) {
  struct Entry {
    double value;
    bool from_a;
  };
  std::vector<Entry> pool;
  pool.reserve(a.size() + b.size());
  for (double v : a) pool.push_back({v, true});
  for (double v : b) pool.push_back({v, false});
  std::sort(pool.begin(), pool.end(),
            [](const Entry& x, const Entry& y) { return x.value < y.value; });

  RankedPool out;
  std::size_t i = 0;
  while (i < pool.size()) {
    std::size_t j = i;
    while (j + 1 < pool.size() && pool[j + 1].value == pool[i].value) ++j;
    const double t = static_cast<double>(j - i + 1);
    const double midrank = 0.5 * (static_cast<double>(i + 1) +
                                  static_cast<double>(j + 1));
    if (t > 1.0) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    for (std::size_t k = i; k <= j; ++k)
      if (pool[k].from_a) out.rank_sum_a += midrank;
    i = j + 1;
  }
  return out;
}

// Exact two-sided tail: enumerate every way of assigning n1 of the ranks
// 1..n to the first sample and count splits at least as extreme.
double exact_two_sided_p(std::size_t n1, std::size_t n2, double u_obs) {
  const std::size_t n = n1 + n2;
  const double mu = static_cast<double>(n1 * n2) / 2.0;
  const double d_obs = std::abs(u_obs - mu) - 1e-9;

  std::vector<std::size_t> comb(n1);
  for (std::size_t i = 0; i < n1; ++i) comb[i] = i;
  std::size_t total = 0, extreme = 0;
  while (true) {
    double rank_sum = 0.0;
    for (std::size_t idx : comb) rank_sum += static_cast<double>(idx + 1);
    const double u = rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
    ++total;
    if (std::abs(u - mu) >= d_obs) ++extreme;

    // next combination
    std::size_t k = n1;
    while (k > 0) {
      --k;
      if (comb[k] != k + n - n1) {
        ++comb[k];
        for (std::size_t j = k + 1; j < n1; ++j) comb[j] = comb[j - 1] + 1;
        break;
      }
      if (k == 0) return static_cast<double>(extreme) /
                         static_cast<double>(total);
    }
    if (n1 == 0) break;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

RankTestResult mann_whitney_u(std::span<const double> a,
                              std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample();
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const RankedPool pool = rank_pool(a, b);
  const double u_a = pool.rank_sum_a - n1 * (n1 + 1.0) / 2.0;

  RankTestResult result;
  result.u_statistic = u_a;

  if (a.size() + b.size() <= 12 && !pool.has_ties) {
    result.method = RankMethod::Exact;
    result.p_two_sided = exact_two_sided_p(a.size(), b.size(), u_a);
  } else {
    result.method = RankMethod::NormalApprox;
    const double n = n1 + n2;
    const double mu = n1 * n2 / 2.0;
    const double var =
        n1 * n2 / 12.0 * ((n + 1.0) - pool.tie_term / (n * (n - 1.0)));
    if (var <= 0.0) {
      result.p_two_sided = 1.0;
      return result;
    }
    const double d = std::max(0.0, std::abs(u_a - mu) - 0.5);
    const double z = d / std::sqrt(var);
    result.p_two_sided = std::erfc(z / M_SQRT2);
  }
  result.p_two_sided = std::clamp(result.p_two_sided,
                                  std::numeric_limits<double>::min(), 1.0);
  return result;
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

namespace {

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> parse_kv(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("expected key = value, got: " + line);
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf")
    return std::numeric_limits<double>::infinity();
  try {
    return std::stod(v);
  } catch (...) {
    throw InvalidConfig(key + " is not a number: " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidConfig(key + " is not a bool: " + v);
}

}  // namespace

PipelineConfig pipeline_config_from_file(const std::string& path) {
  PipelineConfig cfg;
  for (const auto& [key, value] : parse_kv(read_file_or_throw(path))) {
    if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "scenario") {
      const auto s = scenario_from_string(value);
      if (!s) throw InvalidConfig("bad scenario: " + value);
      cfg.scenario = *s;
    } else if (key == "segmenter") {
      if (value != "given" && value != "spot" && value != "window")
        throw InvalidConfig("bad segmenter: " + value);
      cfg.segmenter = value;
    } else if (key == "rate_hz")
      cfg.rate_hz = to_double(key, value);
    else if (key == "cutoff_hz")
      cfg.cutoff_hz = to_double(key, value);
    else if (key == "detrend")
      cfg.detrend = to_bool(key, value);
    else if (key == "acc_unit") {
      if (value != "ms2" && value != "g")
        throw InvalidConfig("bad acc_unit: " + value);
      cfg.acc_unit = value;
    } else if (key == "window_s")
      cfg.window_s = to_double(key, value);
    else if (key == "k_sigma")
      cfg.k_sigma = to_double(key, value);
    else if (key == "min_sep_s")
      cfg.min_sep_s = to_double(key, value);
    else if (key == "half_width_s")
      cfg.half_width_s = to_double(key, value);
    else if (key == "target_snr_db")
      cfg.target_snr_db = to_double(key, value);
    else if (key == "max_components")
      cfg.max_components = static_cast<std::size_t>(std::stoull(value));
    else if (key == "model")
      cfg.model_path = value;
    else if (key == "svg")
      cfg.svg = to_bool(key, value);
    else
      throw InvalidConfig("unknown key: " + key);
  }
  return cfg;
}

SynthCohortConfig synth_config_from_file(const std::string& path) {
  SynthCohortConfig cfg;
  for (const auto& [key, value] : parse_kv(read_file_or_throw(path))) {
    if (key == "n_subjects")
      cfg.n_subjects = std::stoi(value);
    else if (key == "movements_per_subject")
      cfg.movements_per_subject = std::stoi(value);
    else if (key == "duration_mean_s")
      cfg.duration_mean_s = to_double(key, value);
    else if (key == "duration_std_s")
      cfg.duration_std_s = to_double(key, value);
    else if (key == "components_mean")
      cfg.components_mean = to_double(key, value);
    else if (key == "components_std")
      cfg.components_std = to_double(key, value);
    else if (key == "noise_snr_db")
      cfg.noise_snr_db = to_double(key, value);
    else if (key == "drift_slope")
      cfg.drift_slope = to_double(key, value);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else
      throw InvalidConfig("unknown key: " + key);
  }
  return cfg;
}

SynthCohortConfig demo_healthy_config() {
  SynthCohortConfig cfg;
  cfg.n_subjects = 20;
  cfg.movements_per_subject = 10;
  cfg.duration_mean_s = 4.1;
  cfg.duration_std_s = 1.0;
  cfg.components_mean = 17.3;
  cfg.components_std = 4.7;
  cfg.noise_snr_db = 24.0;
  cfg.drift_slope = 0.02;
  cfg.seed = 101;
  return cfg;
}

SynthCohortConfig demo_patient_config() {
  SynthCohortConfig cfg;
  cfg.n_subjects = 20;
  cfg.movements_per_subject = 10;
  cfg.duration_mean_s = 4.9;
  cfg.duration_std_s = 0.8;
  cfg.components_mean = 17.6;
  cfg.components_std = 4.5;
  cfg.noise_snr_db = 21.0;
  cfg.drift_slope = 0.03;
  cfg.seed = 202;
  return cfg;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

std::string log_to_csv(const SensorLog& log) {
  std::string out = "t,ax,ay,az,gx,gy,gz,mx,my,mz,roll,pitch,yaw\n";
  char buf[512];
  for (const auto& s : log.samples) {
    std::snprintf(buf, sizeof(buf),
                  "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                  "%.12g,%.12g,%.12g,%.12g\n",
                  s.t, s.acc.x, s.acc.y, s.acc.z, s.gyro.x, s.gyro.y, s.gyro.z,
                  s.mag.x, s.mag.y, s.mag.z, s.euler.x, s.euler.y, s.euler.z);
    out += buf;
  }
  return out;
}

std::string meta_to_json(const SessionMeta& meta) {
  nlohmann::ordered_json j;
  j["subject_id"] = meta.subject_id;
  j["cohort"] = to_string(meta.cohort);
  j["wrist"] = to_string(meta.wrist);
  j["scenario"] = to_string(meta.scenario);
  j["session_index"] = meta.session_index;
  return j.dump(2);
}

std::string labels_to_csv(const std::vector<LabeledSpan>& spans) {
  std::string out = "start_s,end_s,class\n";
  char buf[96];
  for (const auto& span : spans) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%s\n", span.start_s, span.end_s,
                  to_string(span.cls).c_str());
    out += buf;
  }
  return out;
}

std::string speed_svg(std::span<const double> t, std::span<const Vec3> v_obs,
                      const ReconstructionResult& rec) {
  const double width = 840.0, height = 320.0;
  const double ml = 50.0, mr = 15.0, mt = 15.0, mb = 35.0;
  const double t0 = t.front(), t1 = t.back();

  std::vector<double> speed_obs(t.size()), speed_rec(t.size());
  double peak = 1e-12;
  for (std::size_t i = 0; i < t.size(); ++i) {
    speed_obs[i] = v_obs[i].norm();
    speed_rec[i] = rec.v_rec[i].norm();
    peak = std::max({peak, speed_obs[i], speed_rec[i]});
  }

  auto px = [&](double tt) {
    return ml + (tt - t0) / (t1 - t0) * (width - ml - mr);
  };
  auto py = [&](double s) {
    return height - mb - s / peak * (height - mt - mb);
  };
  auto polyline = [&](const std::vector<double>& y, const char* style) {
    std::string p = "  <polyline style=\"" + std::string(style) +
                    "\" points=\"";
    char buf[64];
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(t[i]), py(y[i]));
      p += buf;
    }
    p += "\"/>\n";
    return p;
  };

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  svg += buf;
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"#333\"/>\n",
                ml, height - mb, width - mr, height - mb);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"#333\"/>\n",
                ml, mt, ml, height - mb);
  svg += buf;

  // individual components, light strokes
  std::vector<double> comp(t.size());
  for (const auto& c : rec.model.components) {
    for (std::size_t i = 0; i < t.size(); ++i)
      comp[i] = lognormal_speed(c, t[i]);
    svg += polyline(comp, "fill:none;stroke:#c8c8c8;stroke-width:0.8");
  }
  svg += polyline(speed_obs, "fill:none;stroke:#111111;stroke-width:1.6");
  svg += polyline(speed_rec, "fill:none;stroke:#cc2222;stroke-width:1.2");

  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "fill=\"#333\">t [s]</text>\n",
                width / 2.0, height - 10.0);
  svg += buf;
  std::snprintf(
      buf, sizeof(buf),
      "  <text x=\"12\" y=\"%.1f\" font-size=\"12\" fill=\"#333\" "
      "transform=\"rotate(-90 12 %.1f)\">speed [m/s]</text>\n",
      height / 2.0, height / 2.0);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "fill=\"#cc2222\">reconstruction: %zu components, "
                "SNR %.1f dB</text>\n",
                ml + 8.0, mt + 14.0, rec.n_components, rec.snr_db);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace lognokit
