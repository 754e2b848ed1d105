#pragma once

#include "assim/core.hpp"
#include "assim/resampling.hpp"
#include "assim/unscented.hpp"

#include <optional>

namespace assim {

struct StepDiagnostics {
  double gain_norm = 0.0;       // Frobenius norm of the Kalman gain
  double ess = 0.0;             // effective sample size 1/sum(w^2) (UPF)
  double weight_entropy = 0.0;  // -sum w log w (UPF)
  VectorXd particle_variance;   // weighted posterior particle variance (UPF)
};

/// Uniform output of the three filters. Row 0 of `means` echoes the initial
/// belief; rows 1..N-1 are filtered posteriors for the matching observations.
struct FilterResult {
  MatrixXd means;                       // N x L
  std::vector<MatrixXd> covs;           // N entries, L x L
  std::vector<StepDiagnostics> diagnostics;
  bool diverged = false;
  int diverged_step = -1;
  bool weight_collapse = false;         // UPF warning: ESS < I/100 at some step
  std::string config_echo;
};

/// Weighted particle with the Gaussian belief backing its UKF proposal.
struct Particle {
  VectorXd state;
  double weight = 0.0;
  GaussianBelief ukf_belief;
};

/// x0 = y0 initialization with unit prior variance. Observed components come
/// from `first_measurement`; hidden components from `hidden_start` (zeros when
/// not supplied).
GaussianBelief initial_belief(const StateSpaceModel& model, const VectorXd& first_measurement,
                              const std::optional<VectorXd>& hidden_start = {});

/// One additive-noise UKF predict/update cycle: deterministic sigma propagation,
/// predicted covariance + Q, sigma redraw from the predicted belief, measurement
/// covariance + R, gain by linear solve. Shared by ukf_run and the UPF proposal.
struct UkfStep {
  GaussianBelief posterior;
  double gain_norm = 0.0;
};
UkfStep ukf_single_step(const GaussianBelief& belief, const StateSpaceModel& model,
                        const UTParams& ut, const VectorXd& y, int step_index,
                        double jitter_max = 1e-6);

FilterResult ukf_run(const StateSpaceModel& model, const TimeSeries& y_obs,
                     const UTParams& ut, const GaussianBelief& init);

FilterResult enkf_run(const StateSpaceModel& model, const TimeSeries& y_obs,
                      int ensemble_size, const GaussianBelief& init, const RngStream& rng);

FilterResult upf_run(const StateSpaceModel& model, const TimeSeries& y_obs,
                     int particle_count, const UTParams& ut, const GaussianBelief& init,
                     ResamplingKind resampler, const RngStream& rng);

/// EnKF member update x_i += K (y_obs - y_i); exposed for its linearity contract.
MatrixXd enkf_update_members(const MatrixXd& members, const MatrixXd& gain,
                             const VectorXd& y_obs, const MatrixXd& predicted_measurements);

}  // namespace assim
