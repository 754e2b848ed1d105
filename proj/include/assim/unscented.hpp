#pragma once

#include "assim/core.hpp"

namespace assim {

/// Scaled unscented transform parameters; lambda = alpha^2 (L + kappa) - L.
struct UTParams {
  double alpha = 0.6;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(int state_dim) const {
    return alpha * alpha * (state_dim + kappa) - state_dim;
  }
  void validate() const;
};

/// 2L+1 sigma points (rows) with their mean and covariance weights.
struct SigmaSet {
  MatrixXd points;   // (2L+1) x L
  VectorXd w_mean;
  VectorXd w_cov;
};

/// Mean/covariance weight vectors for dimension L.
std::pair<VectorXd, VectorXd> ut_weights(int state_dim, const UTParams& p);

/// Symmetric sigma set of a Gaussian belief: mean and mean +- columns of the
/// lower Cholesky factor of (L + lambda) * cov.
SigmaSet sigma_points(const GaussianBelief& belief, const UTParams& p,
                      double jitter_max = 1e-6);

/// Weighted mean and covariance of transformed points, plus additive_cov.
/// Pass an empty matrix for no additive term. Result is symmetrized.
GaussianBelief ut_moments(const MatrixXd& transformed, const VectorXd& w_mean,
                          const VectorXd& w_cov, const MatrixXd& additive_cov);

/// Sum_i w_cov[i] (xs_i - xbar)(ys_i - ybar)^T.
MatrixXd ut_cross_cov(const MatrixXd& xs, const VectorXd& xbar, const MatrixXd& ys,
                      const VectorXd& ybar, const VectorXd& w_cov);

}  // namespace assim
