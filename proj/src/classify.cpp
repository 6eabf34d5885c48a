#include "lognokit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

namespace lognokit {

FeatureVector extract_features(const SensorLog& log, const Segment& seg) {
  if (seg.end > log.size() || seg.start >= seg.end || seg.length() < 2)
    throw SegmentTooShort();

  FeatureVector f{};
  for (int ch = 0; ch < 6; ++ch) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = seg.start; i < seg.end; ++i) {
      const ImuSample& s = log.samples[i];
      const Vec3& v = ch < 3 ? s.acc : s.euler;
      const double x = (ch % 3) == 0 ? v.x : ((ch % 3) == 1 ? v.y : v.z);
      mn = std::min(mn, x);
      mx = std::max(mx, x);
      sum += x;
      sum2 += x * x;
    }
    const double n = static_cast<double>(seg.length());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    f[4 * ch + 0] = mean;
    f[4 * ch + 1] = mn;
    f[4 * ch + 2] = mx;
    f[4 * ch + 3] = std::sqrt(var);
  }
  return f;
}

namespace {

double kernel_eval(const SvmConfig& cfg, const FeatureVector& a,
                   const FeatureVector& b) {
  if (cfg.kernel == KernelType::Linear) {
    double s = 0.0;
    for (std::size_t i = 0; i < kFeatureDim; ++i) s += a[i] * b[i];
    return s;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-cfg.gamma * d2);
}

// SMO on the dual with maximal-violating-pair selection. x/y are the scaled
// features and +-1 labels of one one-vs-one subproblem.
struct SmoSolution {
  std::vector<double> alpha;
  double rho = 0.0;
};

SmoSolution solve_smo(const std::vector<FeatureVector>& x,
                      const std::vector<int>& y, const SvmConfig& cfg) {
  const std::size_t n = x.size();
  const double C = cfg.C;
  constexpr double kTau = 1e-12;

  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_eval(cfg, x[i], x[j]);
      kernel[i * n + j] = k;
      kernel[j * n + i] = k;
    }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q*alpha - e at alpha = 0

  const std::size_t budget =
      static_cast<std::size_t>(cfg.max_passes) * std::max<std::size_t>(n, 1);
  std::size_t iter = 0;
  for (;; ++iter) {
    // Maximal KKT violation over the feasible ascent/descent sets.
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    long i = -1, j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const double yg = -static_cast<double>(y[t]) * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      const bool in_low = (y[t] < 0 && alpha[t] < C) || (y[t] > 0 && alpha[t] > 0);
      if (in_up && yg > m_up) {
        m_up = yg;
        i = static_cast<long>(t);
      }
      if (in_low && yg < m_low) {
        m_low = yg;
        j = static_cast<long>(t);
      }
    }
    if (i < 0 || j < 0 || m_up - m_low <= cfg.tol) break;
    if (iter >= budget) throw NoConvergence(budget);

    const std::size_t ii = static_cast<std::size_t>(i);
    const std::size_t jj = static_cast<std::size_t>(j);
    const double* k_i = &kernel[ii * n];
    const double* k_j = &kernel[jj * n];
    const double old_ai = alpha[ii], old_aj = alpha[jj];

    // Curvature along the feasible line is K_ii + K_jj - 2 K_ij in both
    // label configurations (the sign flip of the step direction and of the
    // Q cross-term cancel).
    if (y[ii] != y[jj]) {
      double quad = k_i[ii] + k_j[jj] - 2.0 * k_i[jj];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[ii] - grad[jj]) / quad;
      const double diff = alpha[ii] - alpha[jj];
      alpha[ii] += delta;
      alpha[jj] += delta;
      if (diff > 0.0) {
        if (alpha[jj] < 0.0) {
          alpha[jj] = 0.0;
          alpha[ii] = diff;
        }
      } else {
        if (alpha[ii] < 0.0) {
          alpha[ii] = 0.0;
          alpha[jj] = -diff;
        }
      }
      if (diff > 0.0) {
        if (alpha[ii] > C) {
          alpha[ii] = C;
          alpha[jj] = C - diff;
        }
      } else {
        if (alpha[jj] > C) {
          alpha[jj] = C;
          alpha[ii] = C + diff;
        }
      }
    } else {
      double quad = k_i[ii] + k_j[jj] - 2.0 * k_i[jj];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[ii] - grad[jj]) / quad;
      const double sum = alpha[ii] + alpha[jj];
      alpha[ii] -= delta;
      alpha[jj] += delta;
      if (sum > C) {
        if (alpha[ii] > C) {
          alpha[ii] = C;
          alpha[jj] = sum - C;
        }
        if (alpha[jj] > C) {
          alpha[jj] = C;
          alpha[ii] = sum - C;
        }
      } else {
        if (alpha[jj] < 0.0) {
          alpha[jj] = 0.0;
          alpha[ii] = sum;
        }
        if (alpha[ii] < 0.0) {
          alpha[ii] = 0.0;
          alpha[jj] = sum;
        }
      }
    }

    const double d_i = (alpha[ii] - old_ai) * y[ii];
    const double d_j = (alpha[jj] - old_aj) * y[jj];
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += static_cast<double>(y[t]) * (k_i[t] * d_i + k_j[t] * d_j);
  }

  // rho from the free support vectors, else the midpoint of the KKT bounds.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = static_cast<double>(y[t]) * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  SmoSolution sol;
  sol.alpha = std::move(alpha);
  sol.rho = n_free > 0 ? sum_free / static_cast<double>(n_free)
                       : (ub + lb) / 2.0;
  return sol;
}

FeatureScaler fit_scaler(const std::vector<FeatureVector>& features) {
  FeatureScaler sc;
  const double n = static_cast<double>(features.size());
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    double sum = 0.0;
    for (const auto& f : features) sum += f[d];
    sc.mean[d] = sum / n;
    double var = 0.0;
    for (const auto& f : features) {
      const double dd = f[d] - sc.mean[d];
      var += dd * dd;
    }
    const double s = std::sqrt(var / n);
    sc.std[d] = s > 1e-12 ? s : 1.0;
  }
  return sc;
}

}  // namespace

SvmModel train_svm(const std::vector<FeatureVector>& features,
                   const std::vector<MovementClass>& labels,
                   const SvmConfig& config) {
  if (features.size() != labels.size())
    throw DegenerateDataset("features/labels size mismatch");
  std::map<int, std::size_t> counts;
  for (const auto& l : labels) ++counts[static_cast<int>(l)];
  if (counts.size() < 2) throw DegenerateDataset("fewer than 2 classes");
  for (const auto& [cls, cnt] : counts)
    if (cnt < 2)
      throw DegenerateDataset("class " + std::to_string(cls) +
                              " has fewer than 2 examples");

  SvmModel model;
  model.config = config;
  model.scaler = fit_scaler(features);
  for (const auto& [cls, cnt] : counts) model.classes.push_back(cls);

  std::vector<FeatureVector> scaled(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    scaled[i] = model.scaler.apply(features[i]);

  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      const int ca = model.classes[a], cb = model.classes[b];
      std::vector<FeatureVector> x;
      std::vector<int> y;
      for (std::size_t i = 0; i < scaled.size(); ++i) {
        const int l = static_cast<int>(labels[i]);
        if (l == ca) {
          x.push_back(scaled[i]);
          y.push_back(+1);
        } else if (l == cb) {
          x.push_back(scaled[i]);
          y.push_back(-1);
        }
      }
      const SmoSolution sol = solve_smo(x, y, config);
      BinarySvm machine;
      machine.class_a = ca;
      machine.class_b = cb;
      machine.bias = -sol.rho;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (sol.alpha[i] > 0.0) {
          machine.support_vectors.push_back(x[i]);
          machine.coeffs.push_back(sol.alpha[i] * y[i]);
        }
      }
      model.machines.push_back(std::move(machine));
    }
  }
  return model;
}

namespace {

double machine_decision(const SvmConfig& cfg, const BinarySvm& m,
                        const FeatureVector& x) {
  double f = m.bias;
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i)
    f += m.coeffs[i] * kernel_eval(cfg, m.support_vectors[i], x);
  return f;
}

}  // namespace

std::vector<double> decision_values(const SvmModel& model,
                                    const FeatureVector& x) {
  const FeatureVector xs = model.scaler.apply(x);
  std::vector<double> out;
  out.reserve(model.machines.size());
  for (const auto& m : model.machines)
    out.push_back(machine_decision(model.config, m, xs));
  return out;
}

MovementClass predict(const SvmModel& model, const FeatureVector& x) {
  if (model.machines.empty()) throw DimensionMismatch();
  const FeatureVector xs = model.scaler.apply(x);

  std::array<int, kNumClasses> votes{};
  std::array<double, kNumClasses> margin{};
  for (const auto& m : model.machines) {
    const double d = machine_decision(model.config, m, xs);
    if (d > 0.0)
      ++votes[m.class_a];
    else
      ++votes[m.class_b];
    margin[m.class_a] += d;
    margin[m.class_b] -= d;
  }

  int best = -1;
  for (int c : model.classes) {
    if (best < 0) {
      best = c;
      continue;
    }
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && margin[c] > margin[best]))
      best = c;
    // equal votes and margins fall through: lowest class index wins
  }
  return static_cast<MovementClass>(best);
}

namespace {

std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<MovementClass>& labels, int k, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> per_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    per_class[static_cast<int>(labels[i])].push_back(i);
  for (const auto& [cls, idx] : per_class)
    if (idx.size() < static_cast<std::size_t>(k))
      throw TooFewExamplesPerClass();

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (auto& [cls, idx] : per_class) {
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.below(i)]);
    for (std::size_t i = 0; i < idx.size(); ++i)
      folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
  }
  return folds;
}

CvReport run_folds(const std::vector<FeatureVector>& features,
                   const std::vector<MovementClass>& labels,
                   const std::vector<std::vector<std::size_t>>& folds,
                   const SvmConfig& config) {
  CvReport report;
  std::int64_t correct = 0, total = 0;
  for (const auto& test_idx : folds) {
    std::vector<bool> in_test(features.size(), false);
    for (std::size_t i : test_idx) in_test[i] = true;
    std::vector<FeatureVector> train_x;
    std::vector<MovementClass> train_y;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (!in_test[i]) {
        train_x.push_back(features[i]);
        train_y.push_back(labels[i]);
      }
    }
    const SvmModel model = train_svm(train_x, train_y, config);
    std::int64_t fold_correct = 0;
    for (std::size_t i : test_idx) {
      const MovementClass got = predict(model, features[i]);
      const int t = static_cast<int>(labels[i]);
      const int p = static_cast<int>(got);
      ++report.confusion[t][p];
      if (t == p) {
        ++fold_correct;
        ++correct;
      }
      ++total;
    }
    report.fold_accuracies.push_back(
        test_idx.empty() ? 0.0
                         : static_cast<double>(fold_correct) /
                               static_cast<double>(test_idx.size()));
  }
  report.mean_accuracy =
      total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  return report;
}

}  // namespace

CvReport cross_validate(const std::vector<FeatureVector>& features,
                        const std::vector<MovementClass>& labels, int k,
                        const SvmConfig& config, std::uint64_t seed) {
  if (k < 2) throw TooFewExamplesPerClass();
  return run_folds(features, labels, stratified_folds(labels, k, seed),
                   config);
}

CvReport cross_validate_grouped(const std::vector<FeatureVector>& features,
                                const std::vector<MovementClass>& labels,
                                const std::vector<std::string>& groups, int k,
                                const SvmConfig& config, std::uint64_t seed) {
  if (k < 2 || groups.size() != features.size())
    throw TooFewExamplesPerClass();
  std::map<std::string, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < groups.size(); ++i)
    by_group[groups[i]].push_back(i);
  if (by_group.size() < static_cast<std::size_t>(k))
    throw TooFewExamplesPerClass();

  std::vector<std::string> names;
  for (const auto& [g, idx] : by_group) names.push_back(g);
  Rng rng(seed);
  for (std::size_t i = names.size(); i > 1; --i)
    std::swap(names[i - 1], names[rng.below(i)]);

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& idx = by_group[names[i]];
    auto& fold = folds[i % static_cast<std::size_t>(k)];
    fold.insert(fold.end(), idx.begin(), idx.end());
  }
  return run_folds(features, labels, folds, config);
}

std::string svm_to_json(const SvmModel& model) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["kernel"] = model.config.kernel == KernelType::Linear ? "linear" : "rbf";
  j["gamma"] = model.config.gamma;
  j["C"] = model.config.C;
  j["tol"] = model.config.tol;
  j["max_passes"] = model.config.max_passes;
  j["classes"] = model.classes;
  j["scaler"]["mean"] = model.scaler.mean;
  j["scaler"]["std"] = model.scaler.std;
  auto machines = nlohmann::ordered_json::array();
  for (const auto& m : model.machines) {
    nlohmann::ordered_json jm;
    jm["class_a"] = m.class_a;
    jm["class_b"] = m.class_b;
    jm["bias"] = m.bias;
    jm["coeffs"] = m.coeffs;
    auto svs = nlohmann::ordered_json::array();
    for (const auto& sv : m.support_vectors) svs.push_back(sv);
    jm["support_vectors"] = std::move(svs);
    machines.push_back(std::move(jm));
  }
  j["machines"] = std::move(machines);
  return j.dump(2);
}

SvmModel svm_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad model JSON: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw Error("unsupported model version");
  SvmModel model;
  model.config.kernel = j["kernel"].get<std::string>() == "linear"
                            ? KernelType::Linear
                            : KernelType::Rbf;
  model.config.gamma = j["gamma"].get<double>();
  model.config.C = j["C"].get<double>();
  model.config.tol = j["tol"].get<double>();
  model.config.max_passes = j["max_passes"].get<int>();
  model.classes = j["classes"].get<std::vector<int>>();
  model.scaler.mean = j["scaler"]["mean"].get<std::array<double, kFeatureDim>>();
  model.scaler.std = j["scaler"]["std"].get<std::array<double, kFeatureDim>>();
  for (const auto& jm : j["machines"]) {
    BinarySvm m;
    m.class_a = jm["class_a"].get<int>();
    m.class_b = jm["class_b"].get<int>();
    m.bias = jm["bias"].get<double>();
    m.coeffs = jm["coeffs"].get<std::vector<double>>();
    for (const auto& sv : jm["support_vectors"])
      m.support_vectors.push_back(sv.get<FeatureVector>());
    if (m.support_vectors.size() != m.coeffs.size())
      throw Error("model JSON: coeffs/support_vectors length mismatch");
    model.machines.push_back(std::move(m));
  }
  return model;
}

}  // namespace lognokit
