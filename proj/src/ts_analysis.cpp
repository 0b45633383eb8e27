#include "tradenet/ts_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "ols.hpp"
#include "tradenet/error.hpp"

namespace tradenet {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_correlogram_input(std::span<const double> values, std::size_t max_lag) {
  if (max_lag < 1) throw Error(Errc::InvalidArgument, "max_lag must be >= 1");
  if (values.size() <= max_lag) {
    throw Error(Errc::SeriesTooShort, "length " + std::to_string(values.size()) +
                                          " must exceed max_lag " + std::to_string(max_lag));
  }
}

}  // namespace

CorrelogramResult acf(std::span<const double> values, std::size_t max_lag) {
  check_correlogram_input(values, max_lag);
  const std::size_t n = values.size();
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centered(n);
  std::transform(values.begin(), values.end(), centered.begin(),
                 [mean](double v) { return v - mean; });

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = lag; t < n; ++t) s += centered[t] * centered[t - lag];
    return s / static_cast<double>(n);
  };

  const double c0 = autocov(0);
  if (!(c0 > 0.0)) throw Error(Errc::ZeroVariance, "series has zero variance");

  CorrelogramResult out;
  out.kind = CorrelogramKind::Acf;
  out.lags.resize(max_lag + 1);
  std::iota(out.lags.begin(), out.lags.end(), std::size_t{0});
  out.values.resize(max_lag + 1);
  out.values[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) out.values[k] = autocov(k) / c0;
  return out;
}

std::vector<double> durbin_levinson(std::span<const double> r) {
  if (r.empty()) return {};
  const std::size_t max_lag = r.size() - 1;
  std::vector<double> partial(max_lag);
  std::vector<double> phi;  // AR coefficients of the current order
  phi.reserve(max_lag);
  double err = r[0];
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = r[k];
    for (std::size_t j = 1; j < k; ++j) num -= phi[j - 1] * r[k - j];
    if (!(std::fabs(err) > 1e-12)) {
      throw Error(Errc::NumericalInstability,
                  "prediction-error variance vanished at lag " + std::to_string(k));
    }
    const double kappa = num / err;
    std::vector<double> next(k);
    for (std::size_t j = 1; j < k; ++j) next[j - 1] = phi[j - 1] - kappa * phi[k - j - 1];
    next[k - 1] = kappa;
    phi = std::move(next);
    err *= (1.0 - kappa * kappa);
    partial[k - 1] = kappa;
  }
  return partial;
}

CorrelogramResult pacf(std::span<const double> values, std::size_t max_lag) {
  auto correlations = acf(values, max_lag);
  auto partial = durbin_levinson(correlations.values);
  CorrelogramResult out;
  out.kind = CorrelogramKind::Pacf;
  out.lags = std::move(correlations.lags);
  out.values.reserve(max_lag + 1);
  out.values.push_back(1.0);
  out.values.insert(out.values.end(), partial.begin(), partial.end());
  return out;
}

// MacKinnon, J.G. (1994), "Approximate Asymptotic Distribution Functions for
// Unit-Root and Cointegration Tests", JBES 12(2), Tables 3-4: tau statistic,
// constant-only regression, one I(1) series.
double mackinnon_pvalue(double tau) {
  constexpr double tau_star = -1.61;
  constexpr double tau_min = -18.83;
  constexpr double tau_max = 2.74;
  if (tau > tau_max) return 1.0;
  if (tau < tau_min) return 0.0;
  if (tau <= tau_star) {
    return normal_cdf(2.1659 + 1.4412 * tau + 0.038269 * tau * tau);
  }
  return normal_cdf(1.7339 + 0.93202 * tau - 0.12745 * tau * tau - 0.010368 * tau * tau * tau);
}

// MacKinnon, J.G. (2010), "Critical Values for Cointegration Tests", Queen's
// Economics Department Working Paper 1227, Table 2 (constant, N = 1):
// cv(T) = b0 + b1/T + b2/T^2 + b3/T^3.
CriticalValues mackinnon_critical_values(std::size_t n_observations) {
  const double inv = 1.0 / static_cast<double>(n_observations);
  auto surface = [inv](double b0, double b1, double b2, double b3) {
    return b0 + inv * (b1 + inv * (b2 + inv * b3));
  };
  return {surface(-3.43035, -6.5393, -16.786, -79.433), surface(-2.86154, -2.8903, -4.234, -40.040),
          surface(-2.56677, -1.5384, -2.809, 0.0)};
}

namespace {

// Regression rows use dy[first_row ...]; columns: constant, level y_{t-1},
// then `lags` lagged differences.
detail::OlsFit adf_regression(std::span<const double> y, const std::vector<double>& dy,
                              std::size_t first_row, std::size_t lags) {
  const std::size_t nobs = dy.size() - first_row;
  Eigen::MatrixXd design(nobs, 2 + lags);
  Eigen::VectorXd response(nobs);
  for (std::size_t j = 0; j < nobs; ++j) {
    const std::size_t t = first_row + j;
    response(j) = dy[t];
    design(j, 0) = 1.0;
    design(j, 1) = y[t];
    for (std::size_t i = 1; i <= lags; ++i) design(j, 1 + i) = dy[t - i];
  }
  return detail::ols(design, response);
}

std::vector<double> first_differences(std::span<const double> y) {
  std::vector<double> dy(y.size() - 1);
  for (std::size_t t = 0; t + 1 < y.size(); ++t) dy[t] = y[t + 1] - y[t];
  return dy;
}

AdfResult finish_adf(std::span<const double> y, const std::vector<double>& dy, std::size_t lags) {
  auto fit = adf_regression(y, dy, lags, lags);
  AdfResult out;
  out.test_statistic = fit.beta(1) / fit.std_errors(1);
  out.p_value = mackinnon_pvalue(out.test_statistic);
  out.lags_used = lags;
  out.n_observations = static_cast<std::size_t>(fit.nobs);
  out.critical_values = mackinnon_critical_values(out.n_observations);
  out.best_aic = fit.aic();
  return out;
}

std::size_t adf_lag_ceiling(std::size_t n) {
  // One constant in the regression.
  return n / 2 >= 2 ? n / 2 - 2 : 0;
}

}  // namespace

AdfResult adf_test_fixed_lag(std::span<const double> values, std::size_t lags) {
  if (values.size() < 20) throw Error(Errc::SeriesTooShort, "ADF needs at least 20 observations");
  if (lags > adf_lag_ceiling(values.size())) {
    throw Error(Errc::SeriesTooShort, "too many lags for series length");
  }
  return finish_adf(values, first_differences(values), lags);
}

AdfResult adf_test(std::span<const double> values, std::optional<std::size_t> max_lag) {
  const std::size_t n = values.size();
  if (n < 20) throw Error(Errc::SeriesTooShort, "ADF needs at least 20 observations");

  std::size_t ceiling = 0;
  if (max_lag) {
    ceiling = *max_lag;
    if (ceiling > adf_lag_ceiling(n)) throw Error(Errc::SeriesTooShort, "max_lag too large for series");
  } else {
    ceiling = static_cast<std::size_t>(
        std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    ceiling = std::min(ceiling, adf_lag_ceiling(n));
  }

  const auto dy = first_differences(values);
  std::size_t best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= ceiling; ++k) {
    const double aic = adf_regression(values, dy, ceiling, k).aic();
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = k;
    }
  }
  auto out = finish_adf(values, dy, best_lag);
  out.best_aic = best_aic;
  return out;
}

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(Errc::SeriesTooShort, "KDE needs at least 2 values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);

  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw Error(Errc::ZeroVariance, "all values identical");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

KdeEstimate kde_density(std::span<const double> values, std::optional<double> bandwidth,
                        std::size_t grid_size) {
  if (values.size() < 2) throw Error(Errc::SeriesTooShort, "KDE needs at least 2 values");
  if (grid_size < 2) throw Error(Errc::InvalidArgument, "grid_size must be >= 2");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::InvalidArgument, "bandwidth must be positive");

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 4.0 * h;
  const double hi = *hi_it + 4.0 * h;

  KdeEstimate out;
  out.bandwidth = h;
  out.grid.resize(grid_size);
  out.density.resize(grid_size);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = lo + step * static_cast<double>(i);
    double s = 0.0;
    for (double v : values) {
      const double u = (x - v) / h;
      s += std::exp(-0.5 * u * u);
    }
    out.grid[i] = x;
    out.density[i] = s * norm;
  }
  return out;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string two_column_csv(const std::string& x_name, const std::string& y_name,
                           std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "column lengths differ");
  std::string out = x_name + "," + y_name + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    append_double(out, x[i]);
    out += ',';
    append_double(out, y[i]);
    out += '\n';
  }
  return out;
}

std::string correlogram_csv(const CorrelogramResult& result) {
  std::vector<double> lags(result.lags.begin(), result.lags.end());
  return two_column_csv("lag", result.kind == CorrelogramKind::Acf ? "acf" : "pacf", lags,
                        result.values);
}

std::string kde_csv(const KdeEstimate& estimate) {
  return two_column_csv("x", "density", estimate.grid, estimate.density);
}

}  // namespace tradenet
