#include "assim/filters.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace assim {

namespace {

constexpr std::uint64_t kParticleDomain = 1;
constexpr std::uint64_t kSelectionDomain = 2;
constexpr std::uint64_t kMemberDomain = 1;

void check_observations(const StateSpaceModel& model, const TimeSeries& y_obs) {
  if (y_obs.size() < 1) throw Error("filter: empty observation series");
  if (y_obs.dim() != model.dims.measurement_dim)
    throw Error("filter: observation dimension does not match the model");
}

FilterResult make_result(const StateSpaceModel& model, Eigen::Index n_steps,
                         const GaussianBelief& init, std::string echo) {
  FilterResult res;
  res.means = MatrixXd::Constant(n_steps, model.dims.state_dim,
                                 std::numeric_limits<double>::quiet_NaN());
  res.covs.assign(n_steps, MatrixXd::Constant(model.dims.state_dim, model.dims.state_dim,
                                              std::numeric_limits<double>::quiet_NaN()));
  res.diagnostics.assign(n_steps, StepDiagnostics{});
  res.means.row(0) = init.mean.transpose();
  res.covs[0] = init.cov;
  res.config_echo = std::move(echo);
  return res;
}

MatrixXd sample_cov(const MatrixXd& members) {
  const double denom = static_cast<double>(members.rows() - 1);
  MatrixXd centered = members.rowwise() - members.colwise().mean();
  return centered.transpose() * centered / denom;
}

}  // namespace

GaussianBelief initial_belief(const StateSpaceModel& model, const VectorXd& first_measurement,
                              const std::optional<VectorXd>& hidden_start) {
  if (first_measurement.size() != model.dims.measurement_dim)
    throw Error("initial_belief: measurement dimension mismatch");
  VectorXd base = hidden_start ? *hidden_start : VectorXd::Zero(model.dims.state_dim);
  if (base.size() != model.dims.state_dim)
    throw Error("initial_belief: hidden_start dimension mismatch");
  GaussianBelief belief;
  belief.mean = model.selector.embed(first_measurement, base);
  belief.cov = MatrixXd::Identity(model.dims.state_dim, model.dims.state_dim);
  return belief;
}

UkfStep ukf_single_step(const GaussianBelief& belief, const StateSpaceModel& model,
                        const UTParams& ut, const VectorXd& y, int step_index,
                        double jitter_max) {
  const int L = model.dims.state_dim;
  const int K = model.dims.measurement_dim;
  const VectorXd zero_q = VectorXd::Zero(L);
  const VectorXd zero_r = VectorXd::Zero(K);

  SigmaSet prior_set = sigma_points(belief, ut, jitter_max);
  MatrixXd propagated(prior_set.points.rows(), L);
  for (Eigen::Index i = 0; i < prior_set.points.rows(); ++i)
    propagated.row(i) =
        model.transition(prior_set.points.row(i).transpose(), step_index, zero_q).transpose();
  GaussianBelief predicted =
      ut_moments(propagated, prior_set.w_mean, prior_set.w_cov, model.noise.process_cov());

  SigmaSet pred_set = sigma_points(predicted, ut, jitter_max);
  MatrixXd measured(pred_set.points.rows(), K);
  for (Eigen::Index i = 0; i < pred_set.points.rows(); ++i)
    measured.row(i) =
        model.measurement(pred_set.points.row(i).transpose(), zero_r).transpose();
  GaussianBelief y_belief =
      ut_moments(measured, pred_set.w_mean, pred_set.w_cov, model.noise.measurement_cov());
  MatrixXd cross =
      ut_cross_cov(pred_set.points, predicted.mean, measured, y_belief.mean, pred_set.w_cov);

  Eigen::LDLT<MatrixXd> ldlt(y_belief.cov);
  MatrixXd gain = ldlt.solve(cross.transpose()).transpose();
  if (!gain.allFinite()) throw Error("ukf: P_yy not invertible");

  UkfStep out;
  out.posterior.mean = predicted.mean + gain * (y - y_belief.mean);
  out.posterior.cov = predicted.cov - gain * y_belief.cov * gain.transpose();
  out.posterior.symmetrize();
  out.gain_norm = gain.norm();
  if (!out.posterior.mean.allFinite() || !out.posterior.cov.allFinite())
    throw Error("ukf: non-finite posterior");
  return out;
}

FilterResult ukf_run(const StateSpaceModel& model, const TimeSeries& y_obs,
                     const UTParams& ut, const GaussianBelief& init) {
  check_observations(model, y_obs);
  ut.validate();
  std::ostringstream echo;
  echo << "ukf alpha=" << ut.alpha << " beta=" << ut.beta << " kappa=" << ut.kappa;
  FilterResult res = make_result(model, y_obs.size(), init, echo.str());

  GaussianBelief belief = init;
  for (Eigen::Index n = 1; n < y_obs.size(); ++n) {
    try {
      UkfStep step = ukf_single_step(belief, model, ut, y_obs.values.row(n).transpose(),
                                     static_cast<int>(n) - 1);
      belief = step.posterior;
      res.means.row(n) = belief.mean.transpose();
      res.covs[n] = belief.cov;
      res.diagnostics[n].gain_norm = step.gain_norm;
    } catch (const Error&) {
      res.diverged = true;
      res.diverged_step = static_cast<int>(n);
      break;
    }
  }
  return res;
}

MatrixXd enkf_update_members(const MatrixXd& members, const MatrixXd& gain,
                             const VectorXd& y_obs, const MatrixXd& predicted_measurements) {
  MatrixXd updated = members;
  for (Eigen::Index i = 0; i < members.rows(); ++i) {
    VectorXd residual = y_obs - predicted_measurements.row(i).transpose();
    updated.row(i) += (gain * residual).transpose();
  }
  return updated;
}

FilterResult enkf_run(const StateSpaceModel& model, const TimeSeries& y_obs,
                      int ensemble_size, const GaussianBelief& init, const RngStream& rng) {
  check_observations(model, y_obs);
  if (ensemble_size < 2) throw Error("enkf: ensemble size must be >= 2");
  const int L = model.dims.state_dim;
  const int K = model.dims.measurement_dim;
  const int I = ensemble_size;
  std::ostringstream echo;
  echo << "enkf I=" << I;
  FilterResult res = make_result(model, y_obs.size(), init, echo.str());

  RngStream member_root = rng.substream(kMemberDomain);
  std::vector<RngStream> streams;
  streams.reserve(I);
  for (int i = 0; i < I; ++i) streams.push_back(member_root.substream(i));

  MatrixXd members(I, L);
  try {
    CholeskyPSD init_chol = cholesky_psd(init.cov, 1e-6);
    for (int i = 0; i < I; ++i)
      members.row(i) = (init.mean + init_chol.lower * streams[i].normal_vec(L)).transpose();
  } catch (const Error&) {
    res.diverged = true;
    res.diverged_step = 0;
    return res;
  }
  res.means.row(0) = members.colwise().mean();
  res.covs[0] = sample_cov(members);

  const VectorXd& q = model.noise.process_std;
  const VectorXd& r = model.noise.measurement_std;
  MatrixXd predicted_y(I, K);
  for (Eigen::Index n = 1; n < y_obs.size(); ++n) {
    for (int i = 0; i < I; ++i) {
      VectorXd w = (q.array() * streams[i].normal_vec(L).array()).matrix();
      members.row(i) =
          model.transition(members.row(i).transpose(), static_cast<int>(n) - 1, w).transpose();
      VectorXd v = (r.array() * streams[i].normal_vec(K).array()).matrix();
      predicted_y.row(i) = model.measurement(members.row(i).transpose(), v).transpose();
    }
    VectorXd xbar = members.colwise().mean();
    VectorXd ybar = predicted_y.colwise().mean();
    MatrixXd ex = members.rowwise() - xbar.transpose();
    MatrixXd ey = predicted_y.rowwise() - ybar.transpose();
    MatrixXd pxy = ex.transpose() * ey / static_cast<double>(I - 1);
    MatrixXd pyy = ey.transpose() * ey / static_cast<double>(I - 1);
    pyy.diagonal().array() += 1e-12;

    Eigen::LDLT<MatrixXd> ldlt(pyy);
    MatrixXd gain = ldlt.solve(pxy.transpose()).transpose();
    if (!gain.allFinite() || !members.allFinite()) {
      res.diverged = true;
      res.diverged_step = static_cast<int>(n);
      break;
    }
    members = enkf_update_members(members, gain, y_obs.values.row(n).transpose(), predicted_y);
    if (!members.allFinite()) {
      res.diverged = true;
      res.diverged_step = static_cast<int>(n);
      break;
    }
    res.means.row(n) = members.colwise().mean();
    res.covs[n] = sample_cov(members);
    res.diagnostics[n].gain_norm = gain.norm();
  }
  return res;
}

FilterResult upf_run(const StateSpaceModel& model, const TimeSeries& y_obs,
                     int particle_count, const UTParams& ut, const GaussianBelief& init,
                     ResamplingKind resampler, const RngStream& rng) {
  check_observations(model, y_obs);
  ut.validate();
  if (particle_count < 2) throw Error("upf: particle count must be >= 2");
  const int L = model.dims.state_dim;
  const int I = particle_count;
  std::ostringstream echo;
  echo << "upf I=" << I << " alpha=" << ut.alpha << " beta=" << ut.beta << " kappa=" << ut.kappa
       << " resampling=" << to_string(resampler);
  FilterResult res = make_result(model, y_obs.size(), init, echo.str());

  RngStream particle_root = rng.substream(kParticleDomain);
  RngStream selection_rng = rng.substream(kSelectionDomain);
  std::vector<RngStream> streams;
  streams.reserve(I);
  for (int i = 0; i < I; ++i) streams.push_back(particle_root.substream(i));

  std::vector<Particle> particles(I);
  try {
    CholeskyPSD init_chol = cholesky_psd(init.cov, 1e-6);
    for (int i = 0; i < I; ++i) {
      particles[i].state = init.mean + init_chol.lower * streams[i].normal_vec(L);
      particles[i].weight = 1.0 / I;
      particles[i].ukf_belief = {particles[i].state, init.cov};
    }
  } catch (const Error&) {
    res.diverged = true;
    res.diverged_step = 0;
    return res;
  }
  VectorXd init_mean = VectorXd::Zero(L);
  for (const Particle& p : particles) init_mean += p.state / I;
  res.means.row(0) = init_mean.transpose();
  res.covs[0] = init.cov;

  const VectorXd& q = model.noise.process_std;
  const VectorXd& r = model.noise.measurement_std;
  const VectorXd zero_q = VectorXd::Zero(L);
  const VectorXd zero_r = VectorXd::Zero(model.dims.measurement_dim);

  MatrixXd proposals(I, L);
  std::vector<GaussianBelief> proposals_belief(I);
  VectorXd logw(I);

  for (Eigen::Index n = 1; n < y_obs.size(); ++n) {
    const VectorXd y = y_obs.values.row(n).transpose();
    const int step_index = static_cast<int>(n) - 1;
    try {
      for (int i = 0; i < I; ++i) {
        // UKF proposal around the particle's own belief
        GaussianBelief belief{particles[i].state, particles[i].ukf_belief.cov};
        UkfStep step = ukf_single_step(belief, model, ut, y, step_index);
        CholeskyPSD prop_chol = cholesky_psd(step.posterior.cov, 1e-6);
        VectorXd xhat = step.posterior.mean + prop_chol.lower * streams[i].normal_vec(L);

        VectorXd prior_mean = model.transition(particles[i].state, step_index, zero_q);
        double log_lik = log_normal_diag(y, model.measurement(xhat, zero_r), r);
        double log_prior = log_normal_diag(xhat, prior_mean, q);
        double log_prop = log_normal_cov(xhat, step.posterior.mean, prop_chol);
        logw[i] = log_lik + log_prior - log_prop;

        proposals.row(i) = xhat.transpose();
        proposals_belief[i] = step.posterior;
      }
    } catch (const Error&) {
      res.diverged = true;
      res.diverged_step = static_cast<int>(n);
      break;
    }

    // normalize in log domain
    double max_logw = logw.maxCoeff();
    if (!std::isfinite(max_logw)) {
      res.diverged = true;
      res.diverged_step = static_cast<int>(n);
      break;
    }
    VectorXd w = (logw.array() - max_logw).exp();
    double total = w.sum();
    if (!std::isfinite(total) || total <= 0.0) {
      res.diverged = true;
      res.diverged_step = static_cast<int>(n);
      break;
    }
    w /= total;

    double ess = 1.0 / w.squaredNorm();
    double entropy = 0.0;
    for (int i = 0; i < I; ++i)
      if (w[i] > 0.0) entropy -= w[i] * std::log(w[i]);
    if (ess < static_cast<double>(I) / 100.0) res.weight_collapse = true;

    // weighted posterior-particle moments (before selection)
    VectorXd wmean = proposals.transpose() * w;
    MatrixXd wcov = MatrixXd::Zero(L, L);
    for (int i = 0; i < I; ++i) {
      VectorXd d = proposals.row(i).transpose() - wmean;
      wcov.noalias() += w[i] * d * d.transpose();
    }

    std::vector<int> selected = resampler == ResamplingKind::Systematic
                                    ? systematic_resample(w, selection_rng)
                                    : multinomial_resample(w, selection_rng);
    VectorXd post_mean = VectorXd::Zero(L);
    for (int i = 0; i < I; ++i) {
      particles[i].state = proposals.row(selected[i]).transpose();
      particles[i].ukf_belief = proposals_belief[selected[i]];
      particles[i].weight = 1.0 / I;
      post_mean += particles[i].state / I;
    }

    res.means.row(n) = post_mean.transpose();
    res.covs[n] = wcov;
    res.diagnostics[n].ess = ess;
    res.diagnostics[n].weight_entropy = entropy;
    res.diagnostics[n].particle_variance = wcov.diagonal();
  }
  return res;
}

}  // namespace assim
