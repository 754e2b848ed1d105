#include "assim/noise_estimation.hpp"

#include <cmath>
#include <limits>

namespace assim {

namespace {

// MacKinnon (1994) approximate p-value surface, constant-only univariate case.
constexpr double kTauStar = -1.61;
constexpr double kTauMin = -18.83;
constexpr double kTauMax = 2.74;
constexpr double kSmallP[3] = {2.1659, 1.4412, 0.038269};
constexpr double kLargeP[4] = {1.7339, 0.93202, -0.12745, -0.010368};
constexpr double kPFloor = 1e-30;

double stdnorm_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

double mackinnon_p_const(double stat) {
  if (stat > kTauMax) return 1.0;
  if (stat < kTauMin) return kPFloor;
  double z;
  if (stat <= kTauStar) {
    z = kSmallP[0] + stat * (kSmallP[1] + stat * kSmallP[2]);
  } else {
    z = kLargeP[0] + stat * (kLargeP[1] + stat * (kLargeP[2] + stat * kLargeP[3]));
  }
  double p = stdnorm_cdf(z);
  if (p < kPFloor) p = kPFloor;
  if (p > 1.0) p = 1.0;
  return p;
}

struct Ols {
  VectorXd coef;
  double se0 = 0.0;   // standard error of the first regressor's coefficient
  double ssr = 0.0;
  Eigen::Index nobs = 0;
  Eigen::Index nparams = 0;
};

// OLS of y on X; the caller puts the coefficient of interest in column 0.
Ols ols_fit(const MatrixXd& X, const VectorXd& y, bool want_se) {
  Ols fit;
  fit.nobs = X.rows();
  fit.nparams = X.cols();
  if (fit.nobs <= fit.nparams) throw SingularRegression("adf: too few observations");

  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw SingularRegression("adf: rank-deficient regressor matrix");
  fit.coef = qr.solve(y);
  VectorXd resid = y - X * fit.coef;
  fit.ssr = resid.squaredNorm();
  if (want_se) {
    MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<MatrixXd> ldlt(xtx);
    VectorXd e0 = VectorXd::Zero(X.cols());
    e0[0] = 1.0;
    double inv00 = ldlt.solve(e0)[0];
    double sigma2 = fit.ssr / static_cast<double>(fit.nobs - fit.nparams);
    if (!(inv00 > 0.0) || !std::isfinite(inv00))
      throw SingularRegression("adf: singular normal equations");
    fit.se0 = std::sqrt(sigma2 * inv00);
  }
  return fit;
}

double ols_aic(const Ols& fit) {
  const double n = static_cast<double>(fit.nobs);
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  double llf = -0.5 * n * (kLogTwoPi + std::log(fit.ssr / n) + 1.0);
  return -2.0 * llf + 2.0 * static_cast<double>(fit.nparams);
}

// Regressor rows t = first_row..len(dy)-1 with columns
// [y_{t}, dy_{t-1}, ..., dy_{t-lag}, 1]; response dy_t.
// (dy_t here means y_{t+1} - y_t, so the level regressor is y at the same index.)
void build_regression(const VectorXd& y, const VectorXd& dy, int lag, int first_row,
                      MatrixXd& X, VectorXd& rhs) {
  const int rows = static_cast<int>(dy.size()) - first_row;
  X.resize(rows, lag + 2);
  rhs.resize(rows);
  for (int t = first_row; t < dy.size(); ++t) {
    int row = t - first_row;
    rhs[row] = dy[t];
    X(row, 0) = y[t];
    for (int j = 1; j <= lag; ++j) X(row, j) = dy[t - j];
    X(row, lag + 1) = 1.0;
  }
}

}  // namespace

TimeSeries moving_average(const TimeSeries& series, int window) {
  series.validate();
  if (series.dim() != 1) throw Error("moving_average: scalar series expected");
  const int n = static_cast<int>(series.size());
  if (window < 2) throw Error("moving_average: window must be >= 2");
  if (window > n) throw WindowTooLarge("moving_average: window exceeds series length");

  TimeSeries out;
  out.start_year = series.start_year + (window - 1) * series.step;
  out.step = series.step;
  out.label = series.label + " sma" + std::to_string(window);
  out.values.resize(n - window + 1, 1);
  double acc = 0.0;
  for (int i = 0; i < window; ++i) acc += series.values(i, 0);
  out.values(0, 0) = acc / window;
  for (int i = window; i < n; ++i) {
    acc += series.values(i, 0) - series.values(i - window, 0);
    out.values(i - window + 1, 0) = acc / window;
  }
  return out;
}

TimeSeries residuals(const TimeSeries& series, int window) {
  TimeSeries sma = moving_average(series, window);
  TimeSeries out = sma;
  out.label = series.label + " residual k=" + std::to_string(window);
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out.values(i, 0) = series.values(i + window - 1, 0) - sma.values(i, 0);
  return out;
}

AdfResult adf_test(const VectorXd& values, int max_lag) {
  const int n = static_cast<int>(values.size());
  if (max_lag < 0) {
    max_lag = static_cast<int>(std::ceil(12.0 * std::pow(n / 100.0, 0.25)));
    max_lag = std::min(max_lag, n / 2 - 2);
    if (max_lag < 0) throw SeriesTooShort("adf: series too short");
  }
  if (n < max_lag + 10) throw SeriesTooShort("adf: series too short for requested lag");

  VectorXd dy(n - 1);
  for (int i = 0; i + 1 < n; ++i) dy[i] = values[i + 1] - values[i];

  // lag selection by AIC on the common sample anchored at max_lag
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  MatrixXd X;
  VectorXd rhs;
  for (int lag = 0; lag <= max_lag; ++lag) {
    build_regression(values, dy, max_lag, max_lag, X, rhs);
    MatrixXd Xl = X.leftCols(lag + 1).eval();
    Xl.conservativeResize(Eigen::NoChange, lag + 2);
    Xl.col(lag + 1).setOnes();
    double aic = ols_aic(ols_fit(Xl, rhs, false));
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = lag;
    }
  }

  build_regression(values, dy, best_lag, best_lag, X, rhs);
  Ols fit = ols_fit(X, rhs, true);
  if (!(fit.se0 > 0.0)) throw SingularRegression("adf: zero standard error");

  AdfResult res;
  res.statistic = fit.coef[0] / fit.se0;
  res.p_value = mackinnon_p_const(res.statistic);
  res.lag_order = best_lag;
  return res;
}

AdfResult adf_test(const TimeSeries& series, int max_lag) {
  if (series.dim() != 1) throw Error("adf_test: scalar series expected");
  return adf_test(VectorXd(series.values.col(0)), max_lag);
}

NoiseEstimate estimate_process_noise(const TimeSeries& series, int k_min, int k_max,
                                     int max_lag) {
  if (k_min < 2 || k_max < k_min) throw Error("estimate_process_noise: bad window range");
  NoiseEstimate est;
  est.p_value = std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    TimeSeries resid = residuals(series, k);
    AdfResult adf = adf_test(resid, max_lag);
    est.p_value_table.emplace_back(k, adf.p_value);
    if (adf.p_value < est.p_value) {
      est.p_value = adf.p_value;
      est.window = k;
    }
  }
  TimeSeries best = residuals(series, est.window);
  const double n = static_cast<double>(best.size());
  double mean = best.values.col(0).mean();
  est.residual_variance = (best.values.col(0).array() - mean).square().sum() / (n - 1.0);
  est.residual_std = std::sqrt(est.residual_variance);
  est.nonstationary = est.p_value >= 0.05;
  return est;
}

}  // namespace assim
