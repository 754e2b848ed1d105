#include "assim/unscented.hpp"

namespace assim {

void UTParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("UTParams: alpha must be in (0, 1]");
  if (beta < 0.0) throw Error("UTParams: beta must be >= 0");
  if (kappa < 0.0) throw Error("UTParams: kappa must be >= 0");
}

std::pair<VectorXd, VectorXd> ut_weights(int state_dim, const UTParams& p) {
  p.validate();
  const double lam = p.lambda(state_dim);
  const double denom = state_dim + lam;  // = alpha^2 (L + kappa) > 0
  VectorXd wm(2 * state_dim + 1), wc(2 * state_dim + 1);
  wm[0] = lam / denom;
  wc[0] = lam / denom + (1.0 - p.alpha * p.alpha + p.beta);
  for (int i = 1; i <= 2 * state_dim; ++i) {
    wm[i] = 1.0 / (2.0 * denom);
    wc[i] = wm[i];
  }
  return {wm, wc};
}

SigmaSet sigma_points(const GaussianBelief& belief, const UTParams& p, double jitter_max) {
  const int L = static_cast<int>(belief.mean.size());
  const double scale = static_cast<double>(L) + p.lambda(L);
  CholeskyPSD chol = cholesky_psd((scale * belief.cov).eval(), jitter_max * scale);

  SigmaSet set;
  auto [wm, wc] = ut_weights(L, p);
  set.w_mean = std::move(wm);
  set.w_cov = std::move(wc);
  set.points.resize(2 * L + 1, L);
  set.points.row(0) = belief.mean.transpose();
  for (int i = 0; i < L; ++i) {
    set.points.row(1 + i) = (belief.mean + chol.lower.col(i)).transpose();
    set.points.row(1 + L + i) = (belief.mean - chol.lower.col(i)).transpose();
  }
  return set;
}

GaussianBelief ut_moments(const MatrixXd& transformed, const VectorXd& w_mean,
                          const VectorXd& w_cov, const MatrixXd& additive_cov) {
  if (transformed.rows() != w_mean.size() || transformed.rows() != w_cov.size())
    throw Error("ut_moments: weight/point count mismatch");
  GaussianBelief out;
  out.mean = transformed.transpose() * w_mean;
  const Eigen::Index dim = transformed.cols();
  out.cov = MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < transformed.rows(); ++i) {
    VectorXd d = transformed.row(i).transpose() - out.mean;
    out.cov.noalias() += w_cov[i] * d * d.transpose();
  }
  if (additive_cov.size() > 0) out.cov += additive_cov;
  out.symmetrize();
  return out;
}

MatrixXd ut_cross_cov(const MatrixXd& xs, const VectorXd& xbar, const MatrixXd& ys,
                      const VectorXd& ybar, const VectorXd& w_cov) {
  if (xs.rows() != ys.rows() || xs.rows() != w_cov.size())
    throw Error("ut_cross_cov: point count mismatch");
  MatrixXd cross = MatrixXd::Zero(xs.cols(), ys.cols());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    VectorXd dx = xs.row(i).transpose() - xbar;
    VectorXd dy = ys.row(i).transpose() - ybar;
    cross.noalias() += w_cov[i] * dx * dy.transpose();
  }
  return cross;
}

}  // namespace assim
