#include "lognokit/siglognormal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <json.hpp>

#include "lognokit/errors.hpp"
#include "lognokit/numerics.hpp"

namespace lognokit {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kSigmaFloor = 1e-3;
constexpr double kAmplitudeFloor = 1e-9;

}  // namespace

double lognormal_speed(const LognormalComponent3D& c, double t) {
  const double dt = t - c.t0;
  if (dt <= 0.0) return 0.0;
  const double z = (std::log(dt) - c.mu) / c.sigma;
  return c.D / (c.sigma * kSqrt2Pi * dt) * std::exp(-0.5 * z * z);
}

double cumulative_fraction(const LognormalComponent3D& c, double t) {
  const double dt = t - c.t0;
  if (dt <= 0.0) return 0.0;
  const double z = (std::log(dt) - c.mu) / c.sigma;
  return 0.5 * std::erfc(-z / M_SQRT2);
}

double lognormal_peak_time(const LognormalComponent3D& c) {
  return c.t0 + std::exp(c.mu - c.sigma * c.sigma);
}

double lognormal_peak_value(const LognormalComponent3D& c) {
  return c.D / (c.sigma * kSqrt2Pi) *
         std::exp(0.5 * c.sigma * c.sigma - c.mu);
}

SupportRange component_support(const LognormalComponent3D& c,
                               std::span<const double> t_grid) {
  // Log-time within mu +- 7 sigma; the tails beyond carry < 1e-11 of D.
  const double t_lo = c.t0 + std::exp(c.mu - 7.0 * c.sigma);
  const double t_hi = c.t0 + std::exp(c.mu + 7.0 * c.sigma);
  const auto lo =
      std::lower_bound(t_grid.begin(), t_grid.end(), t_lo) - t_grid.begin();
  const auto hi =
      std::upper_bound(t_grid.begin(), t_grid.end(), t_hi) - t_grid.begin();
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

namespace {

inline Vec3 direction(double theta, double phi) {
  const double cp = std::cos(phi);
  return {cp * std::cos(theta), cp * std::sin(theta), std::sin(phi)};
}

inline Vec3 component_velocity(const LognormalComponent3D& c, double t) {
  const double dt = t - c.t0;
  if (dt <= 0.0) return {};
  const double x = std::log(dt);
  const double z = (x - c.mu) / c.sigma;
  const double speed = c.D / (c.sigma * kSqrt2Pi * dt) * std::exp(-0.5 * z * z);
  const double frac = 0.5 * std::erfc(-z / M_SQRT2);
  const double theta = c.theta_s + (c.theta_e - c.theta_s) * frac;
  const double phi = c.phi_s + (c.phi_e - c.phi_s) * frac;
  return direction(theta, phi) * speed;
}

}  // namespace

std::vector<Vec3> synthesize_velocity(const SigmaLognormalModel& m,
                                      std::span<const double> t_grid) {
  std::vector<Vec3> v(t_grid.size());
  for (const auto& c : m.components) {
    const auto first =
        std::upper_bound(t_grid.begin(), t_grid.end(), c.t0) - t_grid.begin();
    for (std::size_t i = static_cast<std::size_t>(first); i < t_grid.size();
         ++i)
      v[i] += component_velocity(c, t_grid[i]);
  }
  return v;
}

double compute_snr(std::span<const Vec3> v_obs, std::span<const Vec3> v_rec) {
  if (v_obs.size() != v_rec.size() || v_obs.size() < 2)
    throw Error("compute_snr needs two equal-length signals of length >= 2");
  double signal = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < v_obs.size(); ++i) {
    signal += v_obs[i].squared_norm();
    residual += (v_obs[i] - v_rec[i]).squared_norm();
  }
  if (signal <= 0.0) throw ZeroSignal();
  if (residual <= 1e-20 * signal) return kSnrCapDb;
  const double snr = 10.0 * std::log10(signal / residual);
  return std::min(snr, kSnrCapDb);
}

LognormalComponent3D estimate_component(std::span<const double> residual_speed,
                                        std::span<const double> t_grid) {
  if (residual_speed.size() != t_grid.size() || residual_speed.size() < 3)
    throw NoPeak();

  std::size_t im = 0;
  for (std::size_t i = 1; i < residual_speed.size(); ++i)
    if (residual_speed[i] > residual_speed[im]) im = i;
  if (!(residual_speed[im] > 0.0)) throw NoPeak();

  // Sub-sample peak by parabolic interpolation through the three samples
  // around the maximum; the half-max geometry is sensitive to t_m.
  double t_m = t_grid[im];
  double v_m = residual_speed[im];
  if (im > 0 && im + 1 < residual_speed.size()) {
    const double y0 = residual_speed[im - 1];
    const double y1 = residual_speed[im];
    const double y2 = residual_speed[im + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom < 0.0) {
      const double shift = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
      t_m = t_grid[im] + shift * (t_grid[im + 1] - t_grid[im]);
      v_m = y1 - 0.25 * (y0 - y2) * shift;
    }
  }
  const double half = 0.5 * v_m;

  // Half-max crossings by linear interpolation on each side of the peak.
  double t_a = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = im; i-- > 0;) {
    if (residual_speed[i] < half) {
      const double w = (half - residual_speed[i]) /
                       (residual_speed[i + 1] - residual_speed[i]);
      t_a = t_grid[i] + w * (t_grid[i + 1] - t_grid[i]);
      break;
    }
  }
  double t_b = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = im + 1; i < residual_speed.size(); ++i) {
    if (residual_speed[i] < half) {
      const double w = (residual_speed[i - 1] - half) /
                       (residual_speed[i - 1] - residual_speed[i]);
      t_b = t_grid[i - 1] + w * (t_grid[i] - t_grid[i - 1]);
      break;
    }
  }
  if (!std::isfinite(t_a) || !std::isfinite(t_b) || !(t_a < t_m) ||
      !(t_m < t_b))
    throw IllConditioned();

  // For each trial time origin the pair (t_m, t_a) determines the shape in
  // closed form: the peak sits at ln(t_m - t0) = mu - sigma^2 and the
  // half-peak constraint collapses to sigma^2 = d^2 / (2 ln 2) with
  // d = ln((t_m - t0)/(t_a - t0)).
  const double width = t_b - t_a;
  const int n_candidates = 24;
  const std::size_t ia = static_cast<std::size_t>(
      std::lower_bound(t_grid.begin(), t_grid.end(), t_a) - t_grid.begin());
  const std::size_t ib = static_cast<std::size_t>(
      std::upper_bound(t_grid.begin(), t_grid.end(), t_b) - t_grid.begin());

  LognormalComponent3D best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_candidates; ++j) {
    const double t0 =
        t_a - 2.0 * width + 2.0 * width * static_cast<double>(j) /
                                static_cast<double>(n_candidates);
    const double d = std::log((t_m - t0) / (t_a - t0));
    if (!(d > 0.0)) continue;
    const double sigma = d / std::sqrt(2.0 * std::log(2.0));
    if (sigma < kSigmaFloor || sigma > 3.0) continue;
    LognormalComponent3D c;
    c.t0 = t0;
    c.sigma = sigma;
    c.mu = std::log(t_m - t0) + sigma * sigma;
    c.D = v_m * sigma * kSqrt2Pi * std::exp(c.mu - 0.5 * sigma * sigma);

    double err = 0.0;
    for (std::size_t i = ia; i < ib; ++i) {
      const double e = lognormal_speed(c, t_grid[i]) - residual_speed[i];
      err += e * e;
    }
    if (err < best_err) {
      best_err = err;
      best = c;
    }
  }
  if (!std::isfinite(best_err)) throw IllConditioned();
  return best;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

namespace {

constexpr int kParamsPerComponent = 8;

struct CompCache {
  SupportRange range;
  std::vector<Vec3> contrib;  // range.hi - range.lo samples
};

CompCache make_cache(const LognormalComponent3D& c,
                     std::span<const double> t_grid) {
  CompCache cache;
  cache.range = component_support(c, t_grid);
  cache.contrib.resize(cache.range.hi - cache.range.lo);
  for (std::size_t i = cache.range.lo; i < cache.range.hi; ++i)
    cache.contrib[i - cache.range.lo] = component_velocity(c, t_grid[i]);
  return cache;
}

double objective_from_caches(const std::vector<CompCache>& caches,
                             std::span<const Vec3> v_obs) {
  std::vector<Vec3> rec(v_obs.size());
  for (const auto& c : caches)
    for (std::size_t i = c.range.lo; i < c.range.hi; ++i)
      rec[i] += c.contrib[i - c.range.lo];
  double obj = 0.0;
  for (std::size_t i = 0; i < v_obs.size(); ++i)
    obj += (v_obs[i] - rec[i]).squared_norm();
  return obj;
}

void get_params(const LognormalComponent3D& c, double* p) {
  p[0] = c.D;
  p[1] = c.t0;
  p[2] = c.mu;
  p[3] = c.sigma;
  p[4] = c.theta_s;
  p[5] = c.theta_e;
  p[6] = c.phi_s;
  p[7] = c.phi_e;
}

LognormalComponent3D from_params(const double* p) {
  LognormalComponent3D c;
  c.D = std::max(p[0], kAmplitudeFloor);
  c.t0 = p[1];
  c.mu = p[2];
  c.sigma = std::max(p[3], kSigmaFloor);
  c.theta_s = p[4];
  c.theta_e = p[5];
  // Elevation is a genuine half-circle coordinate; clamp, do not wrap.
  c.phi_s = std::clamp(p[6], -M_PI_2, M_PI_2);
  c.phi_e = std::clamp(p[7], -M_PI_2, M_PI_2);
  return c;
}

}  // namespace

RefineResult refine_model(const SigmaLognormalModel& m,
                          std::span<const Vec3> v_obs,
                          std::span<const double> t_grid, int iters) {
  if (m.empty()) throw Error("refine_model needs a non-empty model");
  if (v_obs.size() != t_grid.size() || v_obs.size() < 2)
    throw Error("refine_model: grid/signal mismatch");

  const std::size_t k = m.size();
  const std::size_t n_params = k * kParamsPerComponent;

  RefineResult result;
  result.model = m;

  std::vector<CompCache> caches(k);
  auto rebuild = [&](const SigmaLognormalModel& model,
                     std::vector<CompCache>& out) {
    for (std::size_t i = 0; i < k; ++i)
      out[i] = make_cache(model.components[i], t_grid);
  };
  rebuild(result.model, caches);
  double obj = objective_from_caches(caches, v_obs);
  result.objective = obj;

  double lambda = 1e-3;
  constexpr double kLambdaMax = 1e9;
  constexpr double kLambdaMin = 1e-12;

  // Per-parameter Jacobian columns live on their component's support only;
  // blocks of J^T J for non-overlapping components are zero and skipped.
  std::vector<std::vector<std::vector<double>>> jac(k);

  for (int iter = 0; iter < iters; ++iter) {
    // residual r = v_obs - v_rec on the full grid
    std::vector<Vec3> rec(v_obs.size());
    for (const auto& c : caches)
      for (std::size_t i = c.range.lo; i < c.range.hi; ++i)
        rec[i] += c.contrib[i - c.range.lo];

    // Forward-difference Jacobian, one component at a time.
    for (std::size_t ci = 0; ci < k; ++ci) {
      double p[kParamsPerComponent];
      get_params(result.model.components[ci], p);
      const auto& cache = caches[ci];
      const std::size_t mlen = cache.range.hi - cache.range.lo;
      jac[ci].assign(kParamsPerComponent, std::vector<double>(3 * mlen, 0.0));
      for (int q = 0; q < kParamsPerComponent; ++q) {
        const double h = 1e-6 * std::max(std::abs(p[q]), 1.0);
        double pp[kParamsPerComponent];
        std::copy(p, p + kParamsPerComponent, pp);
        pp[q] += h;
        const LognormalComponent3D cq = from_params(pp);
        auto& col = jac[ci][q];
        for (std::size_t i = 0; i < mlen; ++i) {
          const Vec3 base = cache.contrib[i];
          const Vec3 pert =
              component_velocity(cq, t_grid[cache.range.lo + i]);
          col[3 * i + 0] = (pert.x - base.x) / h;
          col[3 * i + 1] = (pert.y - base.y) / h;
          col[3 * i + 2] = (pert.z - base.z) / h;
        }
      }
    }

    // Normal equations from overlapping support blocks.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(
        static_cast<long>(n_params), static_cast<long>(n_params));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<long>(n_params));
    for (std::size_t ci = 0; ci < k; ++ci) {
      const auto& ri = caches[ci].range;
      for (int q = 0; q < kParamsPerComponent; ++q) {
        const auto& col = jac[ci][q];
        double acc = 0.0;
        for (std::size_t i = ri.lo; i < ri.hi; ++i) {
          const Vec3 res = v_obs[i] - rec[i];
          const std::size_t o = 3 * (i - ri.lo);
          acc += col[o] * res.x + col[o + 1] * res.y + col[o + 2] * res.z;
        }
        g[static_cast<long>(ci * kParamsPerComponent + q)] = acc;
      }
      for (std::size_t cj = ci; cj < k; ++cj) {
        const auto& rj = caches[cj].range;
        const std::size_t lo = std::max(ri.lo, rj.lo);
        const std::size_t hi = std::min(ri.hi, rj.hi);
        if (lo >= hi) continue;
        for (int q = 0; q < kParamsPerComponent; ++q) {
          const auto& colq = jac[ci][q];
          const int r0 = (ci == cj) ? q : 0;
          for (int r = r0; r < kParamsPerComponent; ++r) {
            const auto& colr = jac[cj][r];
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
              const std::size_t oq = 3 * (i - ri.lo);
              const std::size_t orr = 3 * (i - rj.lo);
              acc += colq[oq] * colr[orr] + colq[oq + 1] * colr[orr + 1] +
                     colq[oq + 2] * colr[orr + 2];
            }
            const long a = static_cast<long>(ci * kParamsPerComponent + q);
            const long b = static_cast<long>(cj * kParamsPerComponent + r);
            H(a, b) = acc;
            H(b, a) = acc;
          }
        }
      }
    }

    // Stationary point: nothing to do (and no singular flag).
    if (g.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + obj)) break;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd Hd = H;
      for (long d = 0; d < Hd.rows(); ++d)
        Hd(d, d) += lambda * std::max(H(d, d), 1e-12);
      const Eigen::VectorXd delta = Hd.ldlt().solve(g);
      if (delta.allFinite()) {
        SigmaLognormalModel candidate = result.model;
        for (std::size_t ci = 0; ci < k; ++ci) {
          double p[kParamsPerComponent];
          get_params(result.model.components[ci], p);
          for (int q = 0; q < kParamsPerComponent; ++q)
            p[q] += delta[static_cast<long>(ci * kParamsPerComponent + q)];
          candidate.components[ci] = from_params(p);
        }
        std::vector<CompCache> cand_caches(k);
        rebuild(candidate, cand_caches);
        const double cand_obj = objective_from_caches(cand_caches, v_obs);
        if (cand_obj < obj) {
          result.model = std::move(candidate);
          caches = std::move(cand_caches);
          const double prev = obj;
          obj = cand_obj;
          result.objective = obj;
          ++result.iterations;
          lambda = std::max(lambda / 10.0, kLambdaMin);
          accepted = true;
          // Converged when the decrease is in the noise.
          if (prev - obj <= 1e-14 * std::max(prev, 1e-300)) iter = iters;
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > kLambdaMax) {
        result.singular_update = true;
        return result;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Greedy extraction
// ---------------------------------------------------------------------------

namespace {

// Weighted least squares of the residual direction against the component's
// cumulative fraction, over [F^-1(0.01), F^-1(0.99)], weights Lambda(t).
void fit_angles(LognormalComponent3D& c, std::span<const Vec3> residual_v,
                std::span<const double> t_grid) {
  const double z99 = 2.3263478740408408;  // Phi^-1(0.99)
  const double t_lo = c.t0 + std::exp(c.mu - c.sigma * z99);
  const double t_hi = c.t0 + std::exp(c.mu + c.sigma * z99);
  const std::size_t lo = static_cast<std::size_t>(
      std::lower_bound(t_grid.begin(), t_grid.end(), t_lo) - t_grid.begin());
  const std::size_t hi = static_cast<std::size_t>(
      std::upper_bound(t_grid.begin(), t_grid.end(), t_hi) - t_grid.begin());

  double peak = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    peak = std::max(peak, residual_v[i].norm());
  if (!(peak > 0.0) || hi - lo < 2) return;

  std::vector<double> w, f, theta, phi;
  double prev_theta = 0.0;
  bool have_prev = false;
  for (std::size_t i = lo; i < hi; ++i) {
    const double mag = residual_v[i].norm();
    if (mag < 1e-3 * peak) continue;
    const double weight = lognormal_speed(c, t_grid[i]);
    if (weight <= 0.0) continue;
    double th = std::atan2(residual_v[i].y, residual_v[i].x);
    if (have_prev) {  // unwrap
      while (th - prev_theta > M_PI) th -= 2.0 * M_PI;
      while (th - prev_theta < -M_PI) th += 2.0 * M_PI;
    }
    prev_theta = th;
    have_prev = true;
    w.push_back(weight);
    f.push_back(cumulative_fraction(c, t_grid[i]));
    theta.push_back(th);
    phi.push_back(std::asin(std::clamp(residual_v[i].z / mag, -1.0, 1.0)));
  }
  if (w.size() < 2) return;

  auto solve_pair = [&](const std::vector<double>& y, double& s, double& e) {
    double suu = 0, suf = 0, sff = 0, su_y = 0, sf_y = 0, sw = 0, sy = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double u = 1.0 - f[i];
      suu += w[i] * u * u;
      suf += w[i] * u * f[i];
      sff += w[i] * f[i] * f[i];
      su_y += w[i] * u * y[i];
      sf_y += w[i] * f[i] * y[i];
      sw += w[i];
      sy += w[i] * y[i];
    }
    const double det = suu * sff - suf * suf;
    if (std::abs(det) < 1e-12 * std::max(1.0, suu * sff)) {
      s = e = sy / sw;  // direction effectively constant
      return;
    }
    s = (su_y * sff - sf_y * suf) / det;
    e = (sf_y * suu - su_y * suf) / det;
  };
  solve_pair(theta, c.theta_s, c.theta_e);
  solve_pair(phi, c.phi_s, c.phi_e);
  c.phi_s = std::clamp(c.phi_s, -M_PI_2, M_PI_2);
  c.phi_e = std::clamp(c.phi_e, -M_PI_2, M_PI_2);
}

// Wrap azimuths into (-pi, pi] shifting start and end together so the
// interpolation path is preserved.
void normalize_angles(LognormalComponent3D& c) {
  const double shift =
      2.0 * M_PI * std::floor((M_PI - c.theta_s) / (2.0 * M_PI));
  c.theta_s += shift;
  c.theta_e += shift;
  if (c.theta_e <= -M_PI || c.theta_e > M_PI) {
    const double shift_e =
        2.0 * M_PI * std::floor((M_PI - c.theta_e) / (2.0 * M_PI));
    c.theta_e += shift_e;
  }
}

}  // namespace

ReconstructionResult extract_model(std::span<const Vec3> v_obs,
                                   std::span<const double> t_grid,
                                   const ExtractConfig& config) {
  if (v_obs.size() != t_grid.size())
    throw DegenerateInput("grid/signal length mismatch");
  if (v_obs.size() < 2 || t_grid.back() - t_grid.front() < 0.5)
    throw DegenerateInput("movement shorter than 0.5 s");
  double orig_peak = 0.0;
  for (const auto& v : v_obs) orig_peak = std::max(orig_peak, v.norm());
  if (!(orig_peak > 0.0)) throw DegenerateInput("all-zero velocity");

  const std::size_t n = v_obs.size();
  SigmaLognormalModel model;
  std::vector<Vec3> v_rec(n);
  double snr = 0.0;  // zero reconstruction has unit energy ratio

  std::vector<double> r_speed(n);
  std::vector<Vec3> r_vec(n);
  while (model.size() < config.max_components) {
    double peak_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r_vec[i] = v_obs[i] - v_rec[i];
      r_speed[i] = r_vec[i].norm();
      peak_r = std::max(peak_r, r_speed[i]);
    }
    if (peak_r < 0.02 * orig_peak) break;

    LognormalComponent3D candidate;
    try {
      candidate = estimate_component(r_speed, t_grid);
    } catch (const Error&) {
      break;
    }
    fit_angles(candidate, r_vec, t_grid);

    SigmaLognormalModel trial = model;
    trial.components.push_back(candidate);
    RefineResult refined =
        refine_model(trial, v_obs, t_grid, config.refine_iters);
    std::vector<Vec3> trial_rec = synthesize_velocity(refined.model, t_grid);
    const double trial_snr = compute_snr(v_obs, trial_rec);
    if (trial_snr <= snr) break;  // candidate did not help

    model = std::move(refined.model);
    v_rec = std::move(trial_rec);
    snr = trial_snr;
    if (snr >= config.target_snr_db) break;
  }

  if (!model.empty() && config.final_refine_iters > 0 &&
      snr < config.target_snr_db) {
    RefineResult polished =
        refine_model(model, v_obs, t_grid, config.final_refine_iters);
    std::vector<Vec3> rec = synthesize_velocity(polished.model, t_grid);
    const double polished_snr = compute_snr(v_obs, rec);
    if (polished_snr > snr) {
      model = std::move(polished.model);
      v_rec = std::move(rec);
      snr = polished_snr;
    }
  }

  std::stable_sort(
      model.components.begin(), model.components.end(),
      [](const auto& a, const auto& b) { return a.t0 < b.t0; });
  for (auto& c : model.components) normalize_angles(c);
  v_rec = synthesize_velocity(model, t_grid);

  ReconstructionResult result;
  result.n_components = model.size();
  result.model = std::move(model);
  result.v_rec = std::move(v_rec);
  result.snr_db = snr;
  result.duration_s = t_grid.back() - t_grid.front();
  return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string model_to_json(const SigmaLognormalModel& m) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : m.components) {
    nlohmann::ordered_json j;
    j["D"] = c.D;
    j["t0"] = c.t0;
    j["mu"] = c.mu;
    j["sigma"] = c.sigma;
    j["theta_s"] = c.theta_s;
    j["theta_e"] = c.theta_e;
    j["phi_s"] = c.phi_s;
    j["phi_e"] = c.phi_e;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

SigmaLognormalModel model_from_json(std::string_view text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad model JSON: ") + e.what());
  }
  if (!arr.is_array()) throw Error("model JSON must be an array");
  SigmaLognormalModel m;
  for (const auto& j : arr) {
    LognormalComponent3D c;
    c.D = j.at("D").get<double>();
    c.t0 = j.at("t0").get<double>();
    c.mu = j.at("mu").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.theta_s = j.at("theta_s").get<double>();
    c.theta_e = j.at("theta_e").get<double>();
    c.phi_s = j.at("phi_s").get<double>();
    c.phi_e = j.at("phi_e").get<double>();
    if (!(c.D > 0.0) || !(c.sigma > 0.0))
      throw Error("model JSON: D and sigma must be positive");
    m.components.push_back(c);
  }
  return m;
}

std::string reconstruction_to_csv(std::span<const double> t,
                                  std::span<const Vec3> v_obs,
                                  std::span<const Vec3> v_rec) {
  std::string out = "t,vx,vy,vz,vrx,vry,vrz\n";
  char buf[256];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof(buf),
                  "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", t[i],
                  v_obs[i].x, v_obs[i].y, v_obs[i].z, v_rec[i].x, v_rec[i].y,
                  v_rec[i].z);
    out += buf;
  }
  return out;
}

}  // namespace lognokit
