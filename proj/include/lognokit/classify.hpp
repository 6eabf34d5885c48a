#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lognokit/types.hpp"

namespace lognokit {

inline constexpr std::size_t kFeatureDim = 24;

/// Per-window statistics, channel-major over (acc x, acc y, acc z, roll,
/// pitch, yaw): mean, min, max, population std for each channel.
using FeatureVector = std::array<double, kFeatureDim>;

FeatureVector extract_features(const SensorLog& log, const Segment& seg);

enum class KernelType { Linear, Rbf };

struct SvmConfig {
  KernelType kernel = KernelType::Rbf;
  double gamma = 1.0 / static_cast<double>(kFeatureDim);  // RBF only
  double C = 10.0;
  double tol = 1e-3;
  int max_passes = 200;  // pair-update budget is max_passes * n_examples
};

/// Per-dimension z-score scaler fitted on training data.
struct FeatureScaler {
  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> std{};

  FeatureVector apply(const FeatureVector& x) const {
    FeatureVector out;
    for (std::size_t i = 0; i < kFeatureDim; ++i)
      out[i] = (x[i] - mean[i]) / std[i];
    return out;
  }
};

/// One one-vs-one machine. coeffs[i] = alpha_i * y_i for support vector i,
/// with y = +1 for class_a and -1 for class_b; decision value
/// f(x) = sum_i coeffs[i]*K(sv_i, x) + bias votes class_a when positive.
struct BinarySvm {
  int class_a = 0;
  int class_b = 0;
  std::vector<FeatureVector> support_vectors;
  std::vector<double> coeffs;
  double bias = 0.0;
};

struct SvmModel {
  SvmConfig config;
  FeatureScaler scaler;
  std::vector<int> classes;  // class ids present in training data, ascending
  std::vector<BinarySvm> machines;
};

/// Train one-vs-one SVMs by sequential minimal optimization with maximal
/// KKT-violating pair selection. Deterministic. Throws DegenerateDataset
/// (fewer than 2 classes, or a class with < 2 examples) and NoConvergence
/// when the pair-update budget runs out before the KKT gap drops below tol.
SvmModel train_svm(const std::vector<FeatureVector>& features,
                   const std::vector<MovementClass>& labels,
                   const SvmConfig& config = {});

/// Majority vote over the one-vs-one machines; ties broken by the largest
/// summed decision margin, then by the lowest class index.
MovementClass predict(const SvmModel& model, const FeatureVector& x);

/// Signed per-pair decision values for diagnostics, in machine order.
std::vector<double> decision_values(const SvmModel& model,
                                    const FeatureVector& x);

struct CvReport {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;  // trace(confusion)/total
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> confusion{};
};

/// Stratified k-fold cross-validation (shuffle per class by seed).
/// Throws TooFewExamplesPerClass when any class has fewer than k examples.
CvReport cross_validate(const std::vector<FeatureVector>& features,
                        const std::vector<MovementClass>& labels, int k,
                        const SvmConfig& config, std::uint64_t seed);

/// Grouped k-fold: folds split whole groups (e.g. subjects), no shuffling of
/// examples inside a group. Throws TooFewExamplesPerClass when fewer groups
/// than folds.
CvReport cross_validate_grouped(const std::vector<FeatureVector>& features,
                                const std::vector<MovementClass>& labels,
                                const std::vector<std::string>& groups, int k,
                                const SvmConfig& config, std::uint64_t seed);

std::string svm_to_json(const SvmModel& model);
SvmModel svm_from_json(std::string_view text);

}  // namespace lognokit
