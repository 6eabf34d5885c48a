#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lognokit/classify.hpp"
#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

using namespace lognokit;

namespace {

SensorLog log_with_acc_x(const std::vector<double>& values) {
  SensorLog log;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ImuSample s;
    s.t = static_cast<double>(i) / 100.0;
    s.acc = {values[i], 0, 0};
    log.samples.push_back(s);
  }
  return log;
}

FeatureVector point_at(Rng& rng, double center, double sigma) {
  FeatureVector f;
  for (auto& v : f) v = rng.gaussian(center, sigma);
  return f;
}

struct Dataset {
  std::vector<FeatureVector> x;
  std::vector<MovementClass> y;
};

Dataset four_clusters(Rng& rng, int per_class, double spread) {
  Dataset d;
  const double centers[4] = {0.0, 4.0, 8.0, 12.0};
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < per_class; ++i) {
      d.x.push_back(point_at(rng, centers[c], spread));
      d.y.push_back(static_cast<MovementClass>(c));
    }
  return d;
}

}  // namespace

TEST_CASE("extract_features: hand-computed single-channel window") {
  const SensorLog log = log_with_acc_x({1, 2, 3, 4});
  const Segment seg{0, 4, SegmentSource::Window, std::nullopt};
  const FeatureVector f = extract_features(log, seg);
  CHECK(f[0] == doctest::Approx(2.5));                  // mean
  CHECK(f[1] == doctest::Approx(1.0));                  // min
  CHECK(f[2] == doctest::Approx(4.0));                  // max
  CHECK(f[3] == doctest::Approx(std::sqrt(1.25)));      // population std
  for (std::size_t i = 4; i < kFeatureDim; ++i) CHECK(f[i] == 0.0);
}

TEST_CASE("extract_features ignores within-window sample order") {
  Rng rng(3);
  std::vector<double> values;
  for (int i = 0; i < 64; ++i) values.push_back(rng.gaussian());
  const Segment seg{0, 64, SegmentSource::Window, std::nullopt};
  const FeatureVector a = extract_features(log_with_acc_x(values), seg);
  for (std::size_t i = values.size(); i > 1; --i)
    std::swap(values[i - 1], values[rng.below(i)]);
  const FeatureVector b = extract_features(log_with_acc_x(values), seg);
  for (std::size_t i = 0; i < kFeatureDim; ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("extract_features on constant channels") {
  const SensorLog log = log_with_acc_x({2.5, 2.5, 2.5});
  const Segment seg{0, 3, SegmentSource::Window, std::nullopt};
  const FeatureVector f = extract_features(log, seg);
  CHECK(f[0] == 2.5);
  CHECK(f[1] == 2.5);
  CHECK(f[2] == 2.5);
  CHECK(f[3] == 0.0);
}

TEST_CASE("extract_features rejects too-short segments") {
  const SensorLog log = log_with_acc_x({1, 2});
  CHECK_THROWS_AS(
      extract_features(log, Segment{0, 1, SegmentSource::Window, std::nullopt}),
      SegmentTooShort);
}

TEST_CASE("linear SVM separates two clean clusters") {
  Rng rng(7);
  std::vector<FeatureVector> x;
  std::vector<MovementClass> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(point_at(rng, 0.0, 0.1));
    y.push_back(MovementClass::M1_ShoulderExtFlex);
    x.push_back(point_at(rng, 10.0, 0.1));
    y.push_back(MovementClass::M2_ShoulderAddAbd);
  }
  SvmConfig cfg;
  cfg.kernel = KernelType::Linear;
  cfg.C = 10.0;
  const SvmModel model = train_svm(x, y, cfg);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(predict(model, x[i]) == y[i]);

  // dual feasibility: sum of alpha_i*y_i vanishes, |alpha| <= C
  for (const auto& m : model.machines) {
    double sum = 0.0;
    for (double c : m.coeffs) {
      sum += c;
      CHECK(std::abs(c) <= cfg.C + 1e-9);
    }
    CHECK(std::abs(sum) < 1e-6);
  }
}

TEST_CASE("RBF SVM solves the XOR layout") {
  Rng rng(11);
  std::vector<FeatureVector> x;
  std::vector<MovementClass> y;
  // clusters at (0,0) and (6,6) -> class A; (0,6) and (6,0) -> class B,
  // in the first two feature dimensions (rest near zero)
  auto put = [&](double c0, double c1, MovementClass cls) {
    for (int i = 0; i < 12; ++i) {
      FeatureVector f{};
      for (auto& v : f) v = rng.gaussian(0.0, 0.05);
      f[0] += c0;
      f[1] += c1;
      x.push_back(f);
      y.push_back(cls);
    }
  };
  put(0, 0, MovementClass::M1_ShoulderExtFlex);
  put(6, 6, MovementClass::M1_ShoulderExtFlex);
  put(0, 6, MovementClass::M2_ShoulderAddAbd);
  put(6, 0, MovementClass::M2_ShoulderAddAbd);

  SvmConfig cfg;
  cfg.kernel = KernelType::Rbf;
  cfg.gamma = 1.0;
  cfg.C = 10.0;
  const SvmModel model = train_svm(x, y, cfg);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(predict(model, x[i]) == y[i]);
}

TEST_CASE("single-class input is degenerate") {
  Rng rng(13);
  std::vector<FeatureVector> x = {point_at(rng, 0, 1), point_at(rng, 0, 1)};
  std::vector<MovementClass> y(2, MovementClass::M1_ShoulderExtFlex);
  CHECK_THROWS_AS(train_svm(x, y), DegenerateDataset);
}

TEST_CASE("prediction is scale-invariant end to end") {
  Rng rng(17);
  Dataset d = four_clusters(rng, 15, 1.2);
  SvmConfig cfg;  // RBF defaults
  const SvmModel base = train_svm(d.x, d.y, cfg);

  Dataset big = d;
  for (auto& f : big.x)
    for (auto& v : f) v *= 1000.0;
  const SvmModel scaled = train_svm(big.x, big.y, cfg);

  Rng probe_rng(18);
  for (int i = 0; i < 50; ++i) {
    FeatureVector probe = point_at(probe_rng, probe_rng.uniform(0, 12), 2.0);
    FeatureVector probe_big = probe;
    for (auto& v : probe_big) v *= 1000.0;
    CHECK(predict(base, probe) == predict(scaled, probe_big));
  }
}

TEST_CASE("predict is deterministic on a symmetric tie") {
  Rng rng(19);
  std::vector<FeatureVector> x;
  std::vector<MovementClass> y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(point_at(rng, -4.0, 0.05));
    y.push_back(MovementClass::M1_ShoulderExtFlex);
    x.push_back(point_at(rng, 4.0, 0.05));
    y.push_back(MovementClass::M2_ShoulderAddAbd);
  }
  SvmConfig cfg;
  cfg.kernel = KernelType::Linear;
  const SvmModel model = train_svm(x, y, cfg);
  FeatureVector mid{};  // equidistant from both clusters
  const MovementClass first = predict(model, mid);
  for (int i = 0; i < 5; ++i) CHECK(predict(model, mid) == first);
}

TEST_CASE("stratified CV is perfect on separable classes") {
  Rng rng(23);
  Dataset d = four_clusters(rng, 25, 0.3);
  const CvReport report = cross_validate(d.x, d.y, 5, SvmConfig{}, 99);
  CHECK(report.mean_accuracy == doctest::Approx(1.0));
  CHECK(report.fold_accuracies.size() == 5);
  // confusion row sums match per-class counts
  for (int c = 0; c < 4; ++c) {
    std::int64_t row = 0;
    for (int p = 0; p < kNumClasses; ++p) row += report.confusion[c][p];
    CHECK(row == 25);
  }
}

TEST_CASE("shuffled labels land at chance level") {
  Rng rng(29);
  Dataset d = four_clusters(rng, 25, 0.3);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<MovementClass> shuffled = d.y;
    Rng shuffle_rng(seed * 1000 + 7);
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[shuffle_rng.below(i)]);
    const CvReport report = cross_validate(d.x, shuffled, 5, SvmConfig{}, seed);
    total += report.mean_accuracy;
  }
  CHECK(total / 5.0 == doctest::Approx(0.25).epsilon(0.4));  // 0.25 +- 0.1
}

TEST_CASE("too few examples per class for the fold count") {
  Rng rng(31);
  std::vector<FeatureVector> x;
  std::vector<MovementClass> y;
  for (int i = 0; i < 3; ++i) {
    x.push_back(point_at(rng, 0, 1));
    y.push_back(MovementClass::M1_ShoulderExtFlex);
    x.push_back(point_at(rng, 5, 1));
    y.push_back(MovementClass::M2_ShoulderAddAbd);
  }
  CHECK_THROWS_AS(cross_validate(x, y, 4, SvmConfig{}, 1),
                  TooFewExamplesPerClass);
}

TEST_CASE("model JSON round-trips predictions") {
  Rng rng(37);
  Dataset d = four_clusters(rng, 12, 1.0);
  const SvmModel model = train_svm(d.x, d.y);
  const SvmModel back = svm_from_json(svm_to_json(model));
  Rng probe_rng(38);
  for (int i = 0; i < 40; ++i) {
    const FeatureVector probe =
        point_at(probe_rng, probe_rng.uniform(-1, 13), 2.5);
    CHECK(predict(model, probe) == predict(back, probe));
  }
}

TEST_CASE("grouped CV keeps whole groups out of training") {
  Rng rng(41);
  Dataset d = four_clusters(rng, 24, 0.3);
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < d.x.size(); ++i)
    groups.push_back("subj" + std::to_string(i % 8));
  const CvReport report =
      cross_validate_grouped(d.x, d.y, groups, 4, SvmConfig{}, 5);
  CHECK(report.mean_accuracy > 0.9);  // separable regardless of grouping
}
