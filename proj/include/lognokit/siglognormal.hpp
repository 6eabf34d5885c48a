#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lognokit/types.hpp"

namespace lognokit {

/// One elementary movement: a stroke of length D starting at time origin t0
/// whose speed profile is lognormal in t - t0 with log-time mean mu and
/// shape sigma, travelling from direction (theta_s, phi_s) to
/// (theta_e, phi_e) (azimuth, elevation).
struct LognormalComponent3D {
  double D = 1.0;
  double t0 = 0.0;
  double mu = -1.0;
  double sigma = 0.3;
  double theta_s = 0.0;
  double theta_e = 0.0;
  double phi_s = 0.0;
  double phi_e = 0.0;
};

struct SigmaLognormalModel {
  std::vector<LognormalComponent3D> components;  // sorted by t0

  std::size_t size() const { return components.size(); }
  bool empty() const { return components.empty(); }
};

/// Speed magnitude of one component:
///   0 for t <= t0, else D / (sigma*sqrt(2*pi)*(t-t0)) *
///   exp(-(ln(t-t0) - mu)^2 / (2*sigma^2)).
double lognormal_speed(const LognormalComponent3D& c, double t);

/// Fraction of D traversed by time t (the lognormal CDF in t - t0).
double cumulative_fraction(const LognormalComponent3D& c, double t);

/// Peak position t0 + exp(mu - sigma^2) and the speed there.
double lognormal_peak_time(const LognormalComponent3D& c);
double lognormal_peak_value(const LognormalComponent3D& c);

/// Sample range [lo, hi) of the grid where the component is non-negligible
/// (log-time within mu +- 6 sigma).
struct SupportRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};
SupportRange component_support(const LognormalComponent3D& c,
                               std::span<const double> t_grid);

/// Vector sum of all components; each travels along
/// u(theta(t), phi(t)) = (cos phi cos theta, cos phi sin theta, sin phi)
/// with both angles interpolated linearly in the cumulative fraction.
std::vector<Vec3> synthesize_velocity(const SigmaLognormalModel& m,
                                      std::span<const double> t_grid);

/// Timing/amplitude estimate for the dominant peak of a speed residual
/// (angles left at zero). Characteristic points: the global maximum
/// (t_m, v_m) and its half-max crossings t_a < t_m < t_b give sigma and mu
/// in closed form for each candidate t0 on a coarse grid left of t_a; the
/// candidate with the smallest squared error on [t_a, t_b] wins.
/// Throws NoPeak (no strictly positive maximum) and IllConditioned (half-max
/// crossings missing).
LognormalComponent3D estimate_component(std::span<const double> residual_speed,
                                        std::span<const double> t_grid);

struct RefineResult {
  SigmaLognormalModel model;
  double objective = 0.0;  // sum_t |v_obs - v_rec|^2 at the returned model
  int iterations = 0;      // accepted steps
  bool singular_update = false;  // damping exhausted without descent
};

/// Damped Gauss-Newton over all component parameters against the observed
/// velocity. Jacobian by forward differences (relative step 1e-6); damping
/// starts at 1e-3, grows x10 on rejection up to 1e9. The objective never
/// increases across accepted steps; sigma and D are re-projected to stay
/// positive. When damping is exhausted the best-so-far model is returned
/// with singular_update set.
RefineResult refine_model(const SigmaLognormalModel& m,
                          std::span<const Vec3> v_obs,
                          std::span<const double> t_grid, int iters);

struct ExtractConfig {
  double target_snr_db = 25.0;
  std::size_t max_components = 40;
  int refine_iters = 4;        // joint Gauss-Newton steps after each addition
  int final_refine_iters = 6;  // polish pass once extraction stops
};

struct ReconstructionResult {
  SigmaLognormalModel model;
  std::vector<Vec3> v_rec;
  double snr_db = 0.0;
  std::size_t n_components = 0;
  double duration_s = 0.0;
};

/// Greedy Sigma-Lognormal decomposition: estimate the dominant component of
/// the speed residual, fit its angles by lognormal-weighted least squares
/// over its support, refine jointly with the components found so far, and
/// repeat until the target SNR is reached, the residual peak falls below 2%
/// of the original peak, a candidate fails to raise the SNR, or
/// max_components is hit. Throws DegenerateInput for spans < 0.5 s or
/// all-zero input.
ReconstructionResult extract_model(std::span<const Vec3> v_obs,
                                   std::span<const double> t_grid,
                                   const ExtractConfig& config = {});

inline constexpr double kSnrCapDb = 100.0;

/// 10*log10(sum|v_obs|^2 / sum|v_obs - v_rec|^2), capped at +100 dB when the
/// residual energy drops below 1e-20 of the signal energy. Throws ZeroSignal
/// when the observed energy is zero.
double compute_snr(std::span<const Vec3> v_obs, std::span<const Vec3> v_rec);

/// JSON array of components (fields D,t0,mu,sigma,theta_s,theta_e,phi_s,phi_e).
std::string model_to_json(const SigmaLognormalModel& m);
SigmaLognormalModel model_from_json(std::string_view text);

/// Reconstruction dump `t,vx,vy,vz,vrx,vry,vrz`.
std::string reconstruction_to_csv(std::span<const double> t,
                                  std::span<const Vec3> v_obs,
                                  std::span<const Vec3> v_rec);

}  // namespace lognokit
