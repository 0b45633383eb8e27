#include "tradenet/arima.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <tuple>

#include "nelder_mead.hpp"
#include "tradenet/error.hpp"
#include "tradenet/ts_analysis.hpp"

namespace tradenet {

std::string to_string(const ArimaOrder& order) {
  std::string s = "(" + std::to_string(order.p) + "," + std::to_string(order.d) + "," +
                  std::to_string(order.q) + ")";
  if (order.with_drift) s += order.d == 0 ? "+mean" : "+drift";
  return s;
}

std::vector<double> difference(std::span<const double> values, std::size_t d) {
  if (values.size() <= d) {
    throw Error(Errc::SeriesTooShort, "cannot difference " + std::to_string(values.size()) +
                                          " values " + std::to_string(d) + " times");
  }
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t t = 0; t + 1 < out.size(); ++t) out[t] = out[t + 1] - out[t];
    out.pop_back();
  }
  return out;
}

std::vector<double> integrate(std::span<const double> differenced, std::span<const double> heads) {
  std::vector<double> cur(differenced.begin(), differenced.end());
  for (std::size_t k = heads.size(); k-- > 0;) {
    std::vector<double> next;
    next.reserve(cur.size() + 1);
    next.push_back(heads[k]);
    for (double v : cur) next.push_back(next.back() + v);
    cur = std::move(next);
  }
  return cur;
}

namespace {

// Unconstrained reals -> partial autocorrelations in (-1, 1) -> AR
// coefficients of a stationary polynomial.
std::vector<double> to_stationary(std::span<const double> raw) {
  std::vector<double> phi;
  phi.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double r = std::tanh(raw[k]);
    std::vector<double> next(k + 1);
    for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
    next[k] = r;
    phi = std::move(next);
  }
  return phi;
}

struct CssEval {
  double ssr = 0.0;
  double mean = 0.0;
  std::vector<double> residuals;
};

// Residuals of (w_t - mu) = sum phi_i (w_{t-i} - mu) + e_t + sum theta_j e_{t-j}
// for t = p..m-1 with pre-sample errors set to zero. Residuals are affine in
// mu (e = a - mu*b), so the SSR-optimal mu is sum(a*b)/sum(b*b).
// Only residuals from index `cond` (>= p) on enter the sum of squares.
CssEval css(std::span<const double> w, std::span<const double> phi, std::span<const double> theta,
            std::size_t cond, bool with_mean, bool keep_residuals) {
  const std::size_t p = phi.size();
  const std::size_t q = theta.size();
  const std::size_t m = w.size();
  std::vector<double> a(m - p), b(m - p);
  for (std::size_t t = p; t < m; ++t) {
    const std::size_t i = t - p;
    double at = w[t];
    double bt = 1.0;
    for (std::size_t k = 1; k <= p; ++k) {
      at -= phi[k - 1] * w[t - k];
      bt -= phi[k - 1];
    }
    for (std::size_t k = 1; k <= q && k <= i; ++k) {
      at -= theta[k - 1] * a[i - k];
      bt -= theta[k - 1] * b[i - k];
    }
    a[i] = at;
    b[i] = bt;
  }
  const std::size_t skip = cond - p;
  CssEval out;
  if (with_mean) {
    double ab = 0.0, bb = 0.0;
    for (std::size_t i = skip; i < a.size(); ++i) {
      ab += a[i] * b[i];
      bb += b[i] * b[i];
    }
    out.mean = bb > 0.0 ? ab / bb : 0.0;
  }
  double ssr = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - out.mean * b[i];
    if (i >= skip) ssr += e * e;
    if (keep_residuals) a[i] = e;
  }
  out.ssr = ssr;
  if (keep_residuals) out.residuals.assign(a.begin() + static_cast<std::ptrdiff_t>(skip), a.end());
  return out;
}

void check_order(const ArimaOrder& order) {
  if (order.p > 5 || order.q > 5 || order.d > 2) {
    throw Error(Errc::InvalidOrder, "order " + to_string(order) + " outside p,q <= 5, d <= 2");
  }
  if (order.with_drift && order.d > 1) {
    throw Error(Errc::InvalidOrder, "drift is only defined for d <= 1");
  }
}

}  // namespace

ArimaFit fit_arima(std::span<const double> values, const ArimaOrder& order, std::size_t n_cond) {
  check_order(order);
  const std::size_t p = order.p, q = order.q;
  const std::size_t cond = std::max(p, n_cond);
  if (values.size() < 10 * (p + q + 1) + order.d || values.size() <= order.d + cond + 1) {
    throw Error(Errc::SeriesTooShort, "series too short for order " + to_string(order));
  }
  const auto w = difference(values, order.d);

  auto unpack = [p, q](const std::vector<double>& x) {
    auto phi = to_stationary(std::span(x).first(p));
    auto neg = to_stationary(std::span(x).subspan(p, q));
    std::vector<double> theta(neg.size());
    std::transform(neg.begin(), neg.end(), theta.begin(), [](double v) { return -v; });
    return std::pair{std::move(phi), std::move(theta)};
  };

  const double n_fitted = static_cast<double>(w.size() - cond);
  auto objective = [&](const std::vector<double>& x) {
    auto [phi, theta] = unpack(x);
    const double v = css(w, phi, theta, cond, order.with_drift, false).ssr / n_fitted;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  detail::SimplexResult best = detail::nelder_mead(objective, std::vector<double>(p + q, 0.0));
  std::size_t iterations = best.iterations;
  if (!best.converged) {
    std::vector<double> restart = best.x;
    for (double& v : restart) v += 0.1;
    auto second = detail::nelder_mead(objective, restart);
    iterations += second.iterations;
    if (!second.converged) {
      throw Error(Errc::NonConvergence, "simplex did not converge for " + to_string(order));
    }
    best = std::move(second);
  }

  auto [phi, theta] = unpack(best.x);
  auto eval = css(w, phi, theta, cond, order.with_drift, true);

  ArimaFit fit;
  fit.order = order;
  fit.ar_coeffs = std::move(phi);
  fit.ma_coeffs = std::move(theta);
  fit.drift = eval.mean;
  fit.n_fitted = eval.residuals.size();
  fit.sigma2 = eval.ssr / n_fitted;
  if (!(fit.sigma2 > 0.0) || !std::isfinite(fit.sigma2)) {
    throw Error(Errc::NumericalInstability, "degenerate innovation variance for " + to_string(order));
  }
  fit.log_likelihood = -0.5 * n_fitted * (std::log(2.0 * std::numbers::pi * fit.sigma2) + 1.0);
  fit.residuals = std::move(eval.residuals);
  fit.iterations = iterations;
  fit.series.assign(values.begin(), values.end());
  fit.aic = model_aic(fit);
  return fit;
}

double model_aic(const ArimaFit& fit) {
  const auto k = static_cast<double>(fit.order.p + fit.order.q + (fit.order.with_drift ? 1 : 0) + 1);
  return 2.0 * k - 2.0 * fit.log_likelihood;
}

StepwiseResult auto_arima_search(std::span<const double> values, std::size_t max_p,
                                 std::size_t max_q, std::size_t max_d) {
  StepwiseResult out;

  // Differencing order: difference until the ADF test rejects a unit root at 5%.
  std::size_t d = 0;
  std::vector<double> level(values.begin(), values.end());
  while (d < max_d) {
    if (adf_test(level).p_value < 0.05) break;
    level = difference(level, 1);
    ++d;
  }
  out.d = d;

  const bool drift_allowed = d <= 1;
  auto key = [](const ArimaOrder& o) { return std::tuple{o.p, o.q, o.with_drift}; };
  std::map<std::tuple<std::size_t, std::size_t, bool>, std::optional<ArimaFit>> cache;
  std::optional<ArimaFit> incumbent;

  auto evaluate = [&](std::vector<ArimaOrder> batch) {
    std::vector<ArimaOrder> todo;
    for (const auto& o : batch) {
      if (o.p > max_p || o.q > max_q || (o.with_drift && !drift_allowed)) continue;
      if (cache.contains(key(o))) continue;
      if (std::find(todo.begin(), todo.end(), o) != todo.end()) continue;
      todo.push_back(o);
    }
    // Candidate fits are independent; results are consumed in submission order.
    std::vector<std::future<std::optional<ArimaFit>>> jobs;
    for (const auto& o : todo) {
      jobs.push_back(std::async(std::launch::async, [&values, o, max_p]() -> std::optional<ArimaFit> {
        try {
          return fit_arima(values, o, max_p);
        } catch (const Error&) {
          return std::nullopt;
        }
      }));
    }
    bool improved = false;
    for (std::size_t i = 0; i < todo.size(); ++i) {
      auto fit = jobs[i].get();
      out.trace.push_back({todo[i], fit ? fit->aic : std::numeric_limits<double>::quiet_NaN(),
                           fit.has_value()});
      if (fit && (!incumbent || fit->aic < incumbent->aic)) {
        incumbent = *fit;
        improved = true;
      }
      cache[key(todo[i])] = std::move(fit);
    }
    return improved;
  };

  std::vector<ArimaOrder> start;
  for (auto [p, q] : {std::pair<std::size_t, std::size_t>{2, 2}, {0, 0}, {1, 0}, {0, 1}}) {
    start.push_back({p, d, q, drift_allowed});
    start.push_back({p, d, q, false});
  }
  evaluate(start);
  if (!incumbent) throw Error(Errc::NoConvergedModel, "no starting model could be fitted");

  for (;;) {
    const ArimaOrder c = incumbent->order;
    std::vector<ArimaOrder> nbrs;
    for (int dp = -1; dp <= 1; ++dp) {
      for (int dq = -1; dq <= 1; ++dq) {
        if (dp == 0 && dq == 0) continue;
        if ((dp < 0 && c.p == 0) || (dq < 0 && c.q == 0)) continue;
        nbrs.push_back({static_cast<std::size_t>(static_cast<int>(c.p) + dp), d,
                        static_cast<std::size_t>(static_cast<int>(c.q) + dq), c.with_drift});
      }
    }
    nbrs.push_back({c.p, d, c.q, !c.with_drift});
    if (!evaluate(std::move(nbrs))) break;
  }
  // The winner is refitted on its own conditioning so no data is discarded.
  out.best = fit_arima(values, incumbent->order);
  return out;
}

ArimaForecast forecast(const ArimaFit& fit, std::size_t horizon) {
  if (horizon < 1) throw Error(Errc::InvalidArgument, "horizon must be >= 1");
  if (fit.series.empty()) throw Error(Errc::InvalidArgument, "fit carries no series");
  const auto& o = fit.order;
  ArimaForecast out;
  out.horizon = horizon;
  out.origin_value = fit.series.back();
  out.mean_path.resize(horizon);

  if (o.p == 0 && o.q == 0 && o.d == 1) {
    for (std::size_t h = 1; h <= horizon; ++h)
      out.mean_path[h - 1] = out.origin_value + static_cast<double>(h) * fit.drift;
    return out;
  }

  const auto w = difference(fit.series, o.d);
  const double mu = fit.drift;
  std::vector<double> past(w.begin(), w.end());  // extended with predictions
  std::vector<double> err(fit.residuals);        // extended with zeros
  std::vector<double> pred(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    double v = mu;
    for (std::size_t i = 1; i <= o.p; ++i) v += fit.ar_coeffs[i - 1] * (past[past.size() - i] - mu);
    for (std::size_t j = 1; j <= o.q; ++j)
      if (err.size() >= j) v += fit.ma_coeffs[j - 1] * err[err.size() - j];
    pred[h] = v;
    past.push_back(v);
    err.push_back(0.0);
  }

  // Integrate from the last value of each differencing level.
  std::vector<double> cur = pred;
  for (std::size_t k = o.d; k-- > 0;) {
    double last = difference(fit.series, k).back();
    for (double& v : cur) {
      last += v;
      v = last;
    }
  }
  out.mean_path = std::move(cur);
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + fmt(xs[i]);
  return s;
}

}  // namespace

std::string arima_summary(const ArimaFit& fit) {
  std::string s;
  s += "order=" + to_string(fit.order) + "\n";
  s += "p=" + std::to_string(fit.order.p) + "\n";
  s += "d=" + std::to_string(fit.order.d) + "\n";
  s += "q=" + std::to_string(fit.order.q) + "\n";
  s += std::string("with_drift=") + (fit.order.with_drift ? "true" : "false") + "\n";
  s += "ar=" + join(fit.ar_coeffs) + "\n";
  s += "ma=" + join(fit.ma_coeffs) + "\n";
  s += "drift=" + fmt(fit.drift) + "\n";
  s += "sigma2=" + fmt(fit.sigma2) + "\n";
  s += "log_likelihood=" + fmt(fit.log_likelihood) + "\n";
  s += "aic=" + fmt(fit.aic) + "\n";
  s += "n_fitted=" + std::to_string(fit.n_fitted) + "\n";
  return s;
}

}  // namespace tradenet
