#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tradenet {

enum class CorrelogramKind { Acf, Pacf };

struct CorrelogramResult {
  std::vector<std::size_t> lags;  // 0..max_lag
  std::vector<double> values;     // values[0] == 1
  CorrelogramKind kind = CorrelogramKind::Acf;
};

// Autocorrelation with the biased (1/n) autocovariance and full-sample mean.
CorrelogramResult acf(std::span<const double> values, std::size_t max_lag);

// Partial autocorrelation by Durbin-Levinson recursion on the sample ACF.
CorrelogramResult pacf(std::span<const double> values, std::size_t max_lag);

// Durbin-Levinson on an autocorrelation sequence r[0..K] (r[0] == 1).
// Returns phi_kk for k = 1..K. Throws NumericalInstability when the
// prediction-error variance collapses.
std::vector<double> durbin_levinson(std::span<const double> autocorrelation);

struct CriticalValues {
  double one_pct = 0.0;
  double five_pct = 0.0;
  double ten_pct = 0.0;
};

struct AdfResult {
  double test_statistic = 0.0;
  double p_value = 1.0;
  std::size_t lags_used = 0;
  std::size_t n_observations = 0;
  CriticalValues critical_values;
  double best_aic = 0.0;  // information criterion of the selected lag on the common sample
};

// Augmented Dickey-Fuller test with a constant and no trend:
//   dy_t = a + b*y_{t-1} + sum_{i=1..k} g_i*dy_{t-i} + e_t.
// With max_lag unset the search ceiling is floor(12*(n/100)^0.25); the lag
// minimising AIC on a common sample is refitted on all available rows.
AdfResult adf_test(std::span<const double> values, std::optional<std::size_t> max_lag = std::nullopt);

// Fixed-lag variant (no AIC search).
AdfResult adf_test_fixed_lag(std::span<const double> values, std::size_t lags);

// MacKinnon (1994) asymptotic p-value for the constant-only tau statistic.
double mackinnon_pvalue(double tau);

// MacKinnon (2010) finite-sample critical values, constant only, N = 1.
CriticalValues mackinnon_critical_values(std::size_t n_observations);

struct KdeEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Silverman's rule of thumb: 0.9 * min(sample std, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> values);

// Gaussian KDE evaluated on `grid_size` evenly spaced points spanning
// [min - 4h, max + 4h].
KdeEstimate kde_density(std::span<const double> values, std::optional<double> bandwidth = std::nullopt,
                        std::size_t grid_size = 512);

// `x_name,y_name` header then one row per pair.
std::string two_column_csv(const std::string& x_name, const std::string& y_name,
                           std::span<const double> x, std::span<const double> y);
std::string correlogram_csv(const CorrelogramResult& result);
std::string kde_csv(const KdeEstimate& estimate);

}  // namespace tradenet
