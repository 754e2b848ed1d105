#pragma once

#include "assim/core.hpp"

namespace assim {

struct AdfResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int lag_order = 0;
  std::string regression = "c";  // constant, no trend
};

struct NoiseEstimate {
  int window = 0;
  double residual_variance = 0.0;
  double residual_std = 0.0;
  double p_value = 1.0;
  bool nonstationary = false;  // min p-value >= 0.05
  std::vector<std::pair<int, double>> p_value_table;  // (window, p)
};

/// Trailing simple moving average including the current point; the output is
/// aligned so its first value sits at the input's (k-1)-th year.
TimeSeries moving_average(const TimeSeries& series, int window);

/// series minus its trailing moving average, on the overlapping support.
TimeSeries residuals(const TimeSeries& series, int window);

/// Augmented Dickey-Fuller test with constant, lag order selected by AIC over
/// 0..max_lag (max_lag < 0 applies the Schwert rule 12*(N/100)^(1/4)).
/// P-values come from the MacKinnon approximate regression surface for the
/// constant-only case, clamped to [1e-30, 1].
AdfResult adf_test(const TimeSeries& series, int max_lag = -1);
AdfResult adf_test(const VectorXd& values, int max_lag = -1);

/// Scans windows k_min..k_max, picks the window whose residuals give the
/// smallest ADF p-value (ties favor the smaller window), and reports the
/// residual variance there as the process-noise variance estimate.
NoiseEstimate estimate_process_noise(const TimeSeries& series, int k_min, int k_max,
                                     int max_lag = -1);

}  // namespace assim
