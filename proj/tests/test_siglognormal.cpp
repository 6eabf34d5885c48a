#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"
#include "lognokit/siglognormal.hpp"
#include "test_util.hpp"

using namespace lognokit;
using testutil::uniform_grid;

namespace {

// Quadrature oracle: trapezoid of the black-box speed profile on a mesh
// graded as t0 + exp(u), u uniform over mu +- 10 sigma.
double area_by_quadrature(const LognormalComponent3D& c, int n_points = 20000) {
  const double u_lo = c.mu - 10.0 * c.sigma;
  const double u_hi = c.mu + 10.0 * c.sigma;
  double area = 0.0;
  double t_prev = c.t0 + std::exp(u_lo);
  double y_prev = lognormal_speed(c, t_prev);
  for (int i = 1; i <= n_points; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / n_points;
    const double t = c.t0 + std::exp(u);
    const double y = lognormal_speed(c, t);
    area += 0.5 * (y + y_prev) * (t - t_prev);
    t_prev = t;
    y_prev = y;
  }
  return area;
}

}  // namespace

TEST_CASE("lognormal_speed vanishes at and before the time origin") {
  LognormalComponent3D c;
  c.t0 = 0.5;
  CHECK(lognormal_speed(c, 0.5) == 0.0);
  CHECK(lognormal_speed(c, 0.2) == 0.0);
  CHECK(lognormal_speed(c, -3.0) == 0.0);
  CHECK(lognormal_speed(c, 0.6) > 0.0);
}

TEST_CASE("peak identities match a dense grid search") {
  LognormalComponent3D c;
  c.D = 1.0;
  c.t0 = 0.0;
  c.mu = -1.0;
  c.sigma = 0.3;
  // frozen from the oracle: argmax 0.336216, peak 3.78117
  CHECK(lognormal_peak_time(c) == doctest::Approx(0.33621649).epsilon(1e-6));
  CHECK(lognormal_peak_value(c) == doctest::Approx(3.78117297).epsilon(1e-6));

  double best_t = 0.0, best_v = -1.0;
  for (double t = 1e-4; t < 3.0; t += 1e-4) {
    const double v = lognormal_speed(c, t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  CHECK(std::abs(best_t - lognormal_peak_time(c)) <= 1e-4);
  CHECK(best_v == doctest::Approx(lognormal_peak_value(c)).epsilon(1e-6));
}

TEST_CASE("the area under the speed profile is D") {
  Rng rng(1);
  for (int trial = 0; trial < 25; ++trial) {
    LognormalComponent3D c;
    c.D = rng.uniform(0.2, 3.0);
    c.t0 = rng.uniform(-1.0, 1.0);
    c.mu = rng.uniform(-2.0, 0.0);
    c.sigma = rng.uniform(0.1, 0.5);
    CHECK(area_by_quadrature(c) == doctest::Approx(c.D).epsilon(1e-6));
  }
}

TEST_CASE("cumulative fraction: limits, median, quadrature consistency") {
  LognormalComponent3D c;
  c.D = 2.0;
  c.t0 = 0.3;
  c.mu = -0.8;
  c.sigma = 0.35;

  CHECK(cumulative_fraction(c, c.t0) == 0.0);
  CHECK(cumulative_fraction(c, c.t0 - 1.0) == 0.0);
  CHECK(cumulative_fraction(c, c.t0 + std::exp(c.mu)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cumulative_fraction(c, c.t0 + std::exp(c.mu + 8.0 * c.sigma)) >=
        1.0 - 1e-9);

  // F(t) equals the running quadrature of the speed profile divided by D
  const double u_lo = c.mu - 9.0 * c.sigma;
  double run = 0.0;
  double t_prev = c.t0 + std::exp(u_lo);
  double y_prev = lognormal_speed(c, t_prev);
  const int n = 40000;
  for (int i = 1; i <= n; ++i) {
    const double u = u_lo + (c.mu + 9.0 * c.sigma - u_lo) * i / n;
    const double t = c.t0 + std::exp(u);
    const double y = lognormal_speed(c, t);
    run += 0.5 * (y + y_prev) * (t - t_prev);
    t_prev = t;
    y_prev = y;
    if (i % 5000 == 0)
      CHECK(cumulative_fraction(c, t) ==
            doctest::Approx(run / c.D).epsilon(1e-6));
  }
}

TEST_CASE("synthesize_velocity of an empty model is zero") {
  const auto t = uniform_grid(2.0, 100.0);
  for (const auto& v : synthesize_velocity(SigmaLognormalModel{}, t))
    CHECK(v.norm() == 0.0);
}

TEST_CASE("a fixed-direction component synthesizes the scalar profile") {
  LognormalComponent3D c;
  c.D = 1.3;
  c.t0 = 0.1;
  c.mu = -1.1;
  c.sigma = 0.25;  // angles all zero -> +x
  SigmaLognormalModel m{{c}};
  const auto t = uniform_grid(2.0, 100.0);
  const auto v = synthesize_velocity(m, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(v[i].x == doctest::Approx(lognormal_speed(c, t[i])).epsilon(1e-12));
    CHECK(v[i].y == 0.0);
    CHECK(v[i].z == 0.0);
  }
}

TEST_CASE("a curving component still carries total distance D") {
  LognormalComponent3D c;
  c.D = 0.9;
  c.t0 = 0.2;
  c.mu = -1.0;
  c.sigma = 0.3;
  c.theta_s = 0.4;
  c.theta_e = 1.6;
  c.phi_s = -0.3;
  c.phi_e = 0.5;
  SigmaLognormalModel m{{c}};
  const auto t = uniform_grid(4.0, 100.0);
  const auto v = synthesize_velocity(m, t);
  std::vector<double> speed(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) speed[i] = v[i].norm();
  CHECK(trapezoid(speed, 0.01) == doctest::Approx(c.D).epsilon(1e-4));
}

TEST_CASE("estimate_component recovers a clean single stroke within 10%") {
  LognormalComponent3D truth;
  truth.D = 1.0;
  truth.t0 = 0.2;
  truth.mu = -1.0;
  truth.sigma = 0.25;
  const auto t = uniform_grid(2.5, 100.0);
  std::vector<double> speed(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    speed[i] = lognormal_speed(truth, t[i]);

  const LognormalComponent3D got = estimate_component(speed, t);
  CHECK(std::abs(got.D - truth.D) / truth.D < 0.10);
  CHECK(std::abs(got.t0 - truth.t0) < 0.10 * std::exp(truth.mu));
  CHECK(std::abs(got.mu - truth.mu) / std::abs(truth.mu) < 0.10);
  CHECK(std::abs(got.sigma - truth.sigma) / truth.sigma < 0.10);
}

TEST_CASE("estimate_component needs a positive peak") {
  const auto t = uniform_grid(1.0, 100.0);
  std::vector<double> zeros(t.size(), 0.0);
  CHECK_THROWS_AS(estimate_component(zeros, t), NoPeak);
}

TEST_CASE("estimate_component locks onto the taller of two strokes") {
  LognormalComponent3D tall, small;
  tall.D = 2.0;
  tall.t0 = 0.2;
  tall.mu = -1.1;
  tall.sigma = 0.25;
  small = tall;
  small.D = 1.0;
  small.t0 = 2.2;
  const auto t = uniform_grid(4.5, 100.0);
  std::vector<double> speed(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    speed[i] = lognormal_speed(tall, t[i]) + lognormal_speed(small, t[i]);
  const LognormalComponent3D got = estimate_component(speed, t);
  CHECK(std::abs(got.t0 - tall.t0) < 0.3);  // near the taller stroke
  CHECK(got.D > 1.0);
}

namespace {

double objective_of(const SigmaLognormalModel& m, std::span<const Vec3> v_obs,
                    std::span<const double> t) {
  const auto rec = synthesize_velocity(m, t);
  double obj = 0.0;
  for (std::size_t i = 0; i < v_obs.size(); ++i)
    obj += (v_obs[i] - rec[i]).squared_norm();
  return obj;
}

}  // namespace

TEST_CASE("refine_model repairs a 5% parameter perturbation") {
  LognormalComponent3D truth;
  truth.D = 1.2;
  truth.t0 = 0.25;
  truth.mu = -1.0;
  truth.sigma = 0.3;
  truth.theta_s = 0.5;
  truth.theta_e = 0.9;
  truth.phi_s = 0.2;
  truth.phi_e = -0.1;
  const auto t = uniform_grid(2.5, 100.0);
  const auto v_obs = synthesize_velocity(SigmaLognormalModel{{truth}}, t);

  LognormalComponent3D off = truth;
  off.D *= 1.05;
  off.t0 *= 1.05;
  off.mu *= 1.05;
  off.sigma *= 1.05;
  off.theta_s *= 1.05;
  off.theta_e *= 1.05;
  off.phi_s *= 1.05;
  off.phi_e *= 1.05;
  SigmaLognormalModel start{{off}};

  const double obj0 = objective_of(start, v_obs, t);
  const RefineResult r = refine_model(start, v_obs, t, 25);
  CHECK(r.objective <= 0.1 * obj0);  // >= 90% decrease
}

TEST_CASE("refine_model is a no-op at the optimum") {
  LognormalComponent3D truth;
  truth.D = 1.0;
  truth.t0 = 0.2;
  truth.mu = -1.0;
  truth.sigma = 0.3;
  const auto t = uniform_grid(2.0, 100.0);
  const auto v_obs = synthesize_velocity(SigmaLognormalModel{{truth}}, t);
  const double obj0 = objective_of(SigmaLognormalModel{{truth}}, v_obs, t);
  const RefineResult r = refine_model(SigmaLognormalModel{{truth}}, v_obs, t, 5);
  CHECK(std::abs(r.objective - obj0) < 1e-12);
}

TEST_CASE("refinement objective never increases across iterates") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_comp = 1 + static_cast<int>(rng.below(3));
    const SigmaLognormalModel truth = testutil::random_movement(rng, n_comp);
    const auto t = uniform_grid(testutil::grid_end_for(truth), 100.0);
    const auto v_obs = synthesize_velocity(truth, t);

    // start from a perturbed copy and chase the objective downhill
    SigmaLognormalModel m = truth;
    for (auto& c : m.components) {
      c.D *= rng.uniform(0.9, 1.1);
      c.mu += rng.gaussian(0.0, 0.05);
      c.sigma *= rng.uniform(0.92, 1.08);
      c.theta_s += rng.gaussian(0.0, 0.1);
    }
    double prev = objective_of(m, v_obs, t);
    for (int step = 0; step < 4; ++step) {
      const RefineResult r = refine_model(m, v_obs, t, 1);
      CHECK(r.objective <= prev * (1.0 + 1e-12));
      prev = r.objective;
      m = r.model;
    }
  }
}

TEST_CASE("compute_snr: exact, zero, and constructed 20 dB cases") {
  const auto t = uniform_grid(1.0, 100.0);
  std::vector<Vec3> s(t.size()), zero(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    s[i] = {std::sin(2.0 * M_PI * t[i]), 0.0, 0.0};

  CHECK(compute_snr(s, s) == kSnrCapDb);
  CHECK(compute_snr(s, zero) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(compute_snr(zero, s), ZeroSignal);

  // orthogonal noise with exactly 1% of the signal energy
  double sig_energy = 0.0;
  for (const auto& v : s) sig_energy += v.squared_norm();
  std::vector<Vec3> obs = s;
  double noise_energy = 0.0;
  std::vector<double> n(t.size());
  Rng rng(5);
  for (std::size_t i = 0; i < t.size(); ++i) {
    n[i] = rng.gaussian();
    noise_energy += n[i] * n[i];
  }
  const double scale = std::sqrt(0.01 * sig_energy / noise_energy);
  for (std::size_t i = 0; i < t.size(); ++i) obs[i].y += scale * n[i];
  CHECK(compute_snr(obs, s) == doctest::Approx(20.0432).epsilon(0.005));
}

TEST_CASE("extract_model round-trips a clean 3-component movement") {
  Rng rng(123);
  const SigmaLognormalModel truth = testutil::random_movement(rng, 3);
  const auto t = uniform_grid(testutil::grid_end_for(truth), 100.0);
  const auto v_obs = synthesize_velocity(truth, t);

  ExtractConfig cfg;
  cfg.target_snr_db = 40.0;
  const ReconstructionResult rec = extract_model(v_obs, t, cfg);
  CHECK(rec.n_components == 3);
  CHECK(rec.snr_db >= 30.0);
  // components sorted by onset
  for (std::size_t i = 1; i < rec.model.size(); ++i)
    CHECK(rec.model.components[i - 1].t0 <= rec.model.components[i].t0);
}

TEST_CASE("extract_model rejects degenerate input") {
  const auto t = uniform_grid(2.0, 100.0);
  std::vector<Vec3> zeros(t.size());
  CHECK_THROWS_AS(extract_model(zeros, t), DegenerateInput);

  const auto t_short = uniform_grid(0.3, 100.0);
  std::vector<Vec3> v(t_short.size(), Vec3{1, 0, 0});
  CHECK_THROWS_AS(extract_model(v, t_short), DegenerateInput);
}

TEST_CASE("greedy SNR is strictly increasing in the component budget") {
  Rng rng(321);
  const SigmaLognormalModel truth = testutil::random_movement(rng, 4);
  const auto t = uniform_grid(testutil::grid_end_for(truth), 100.0);
  const auto v_obs = synthesize_velocity(truth, t);

  double prev = 0.0;
  for (std::size_t cap = 1; cap <= 4; ++cap) {
    ExtractConfig cfg;
    cfg.target_snr_db = 80.0;  // never reached; cap rules
    cfg.max_components = cap;
    cfg.final_refine_iters = 0;  // expose the raw greedy sequence
    const ReconstructionResult rec = extract_model(v_obs, t, cfg);
    REQUIRE(rec.n_components == cap);
    CHECK(rec.snr_db > prev);
    prev = rec.snr_db;
  }
}

TEST_CASE("model JSON round-trips exactly") {
  Rng rng(9);
  const SigmaLognormalModel m = testutil::random_movement(rng, 3);
  const SigmaLognormalModel back = model_from_json(model_to_json(m));
  REQUIRE(back.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back.components[i].D == m.components[i].D);
    CHECK(back.components[i].t0 == m.components[i].t0);
    CHECK(back.components[i].mu == m.components[i].mu);
    CHECK(back.components[i].sigma == m.components[i].sigma);
    CHECK(back.components[i].theta_s == m.components[i].theta_s);
    CHECK(back.components[i].theta_e == m.components[i].theta_e);
    CHECK(back.components[i].phi_s == m.components[i].phi_s);
    CHECK(back.components[i].phi_e == m.components[i].phi_e);
  }
}

TEST_CASE("reconstruction CSV carries both signals") {
  const auto t = uniform_grid(0.05, 100.0);
  std::vector<Vec3> a(t.size(), Vec3{1, 2, 3}), b(t.size(), Vec3{4, 5, 6});
  const std::string csv = reconstruction_to_csv(t, a, b);
  const std::string head = "t,vx,vy,vz,vrx,vry,vrz\n0,";
  CHECK(csv.substr(0, head.size()) == head);
  CHECK(csv.find("1,2,3,4,5,6") != std::string::npos);
}
