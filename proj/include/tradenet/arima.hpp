#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tradenet {

struct ArimaOrder {
  std::size_t p = 0;
  std::size_t d = 0;
  std::size_t q = 0;
  bool with_drift = false;  // for d == 0 this is the mean (intercept)

  bool operator==(const ArimaOrder&) const = default;
};

std::string to_string(const ArimaOrder& order);

struct ArimaFit {
  ArimaOrder order;
  std::vector<double> ar_coeffs;
  std::vector<double> ma_coeffs;
  double drift = 0.0;   // mean of the d-times differenced series
  double sigma2 = 0.0;  // CSS / n_fitted
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::vector<double> residuals;
  std::size_t n_fitted = 0;
  std::size_t iterations = 0;  // simplex iterations used (0 when nothing to optimise)

  // Kept for forecasting.
  std::vector<double> series;
};

struct ArimaForecast {
  std::size_t horizon = 0;
  std::vector<double> mean_path;
  double origin_value = 0.0;
};

// Applies first differences d times.
std::vector<double> difference(std::span<const double> values, std::size_t d);

// Inverse of difference(): heads[k] is the first element of the k-times
// differenced original series, k = 0..d-1.
std::vector<double> integrate(std::span<const double> differenced, std::span<const double> heads);

// Conditional-sum-of-squares fit. The mean/drift is profiled out in closed
// form; AR and MA coefficients are searched with Nelder-Mead through a
// partial-autocorrelation transform that keeps them stationary/invertible.
// The first max(p, n_cond) values of the differenced series are conditioned
// on; fits sharing n_cond are scored on the same residual sample.
ArimaFit fit_arima(std::span<const double> values, const ArimaOrder& order, std::size_t n_cond = 0);

// 2k - 2 logL, k = p + q + drift + 1.
double model_aic(const ArimaFit& fit);

struct StepwiseStep {
  ArimaOrder order;
  double aic = 0.0;
  bool converged = false;
};

struct StepwiseResult {
  ArimaFit best;
  std::size_t d = 0;
  std::vector<StepwiseStep> trace;  // every candidate in evaluation order
};

// Every candidate conditions on max_p start-up values so their AICs are
// comparable (trace); the selected order is then refitted with n_cond = 0.
StepwiseResult auto_arima_search(std::span<const double> values, std::size_t max_p = 5,
                                 std::size_t max_q = 5, std::size_t max_d = 2);

inline ArimaFit auto_arima_stepwise(std::span<const double> values, std::size_t max_p = 5,
                                    std::size_t max_q = 5, std::size_t max_d = 2) {
  return auto_arima_search(values, max_p, max_q, max_d).best;
}

ArimaForecast forecast(const ArimaFit& fit, std::size_t horizon);

// key=value lines: order, coefficients, drift, sigma2, log-likelihood, AIC.
std::string arima_summary(const ArimaFit& fit);

}  // namespace tradenet
