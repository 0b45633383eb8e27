#include "tradenet/forecasting.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>

#include "text.hpp"
#include "tradenet/error.hpp"

namespace tradenet {

std::vector<LagSample> make_lag_dataset(std::span<const double> values, std::size_t window) {
  if (window < 1) throw Error(Errc::InvalidArgument, "window must be >= 1");
  if (values.size() <= window) {
    throw Error(Errc::SeriesTooShort, "need more than " + std::to_string(window) + " values, got " +
                                          std::to_string(values.size()));
  }
  std::vector<LagSample> out;
  out.reserve(values.size() - window);
  for (std::size_t i = 0; i + window < values.size(); ++i) {
    LagSample s;
    s.window.assign(values.begin() + static_cast<std::ptrdiff_t>(i),
                    values.begin() + static_cast<std::ptrdiff_t>(i + window));
    s.target = values[i + window];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LagSample> make_lag_dataset(const OhlcSeries& series, Channel channel, std::size_t window) {
  auto out = make_lag_dataset(series.channel(channel), window);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].target_date = series[i + window].date;
  return out;
}

Dataset to_dataset(std::span<const LagSample> samples, const MinMaxScaler& scaler) {
  Dataset d;
  const std::size_t w = samples.empty() ? 0 : samples.front().window.size();
  d.inputs.resize(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(w));
  d.targets.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].window.size() != w) throw Error(Errc::ShapeMismatch, "lag windows differ in length");
    for (std::size_t j = 0; j < w; ++j)
      d.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scaler.transform(samples[i].window[j]);
    d.targets(static_cast<Eigen::Index>(i)) = scaler.transform(samples[i].target);
  }
  return d;
}

double MlpPredictor::predict_next(std::span<const double> window) const {
  std::vector<double> scaled(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) scaled[i] = model_.scaler.transform(window[i]);
  return model_.scaler.inverse(predict(model_, scaled));
}

namespace {

Date next_weekday(const Date& d) {
  using namespace std::chrono;
  sys_days day{d};
  do {
    day += days{1};
  } while (weekday{day} == Saturday || weekday{day} == Sunday);
  return Date{day};
}

}  // namespace

ForecastSet walk_forward_forecast(std::span<const OneStepPredictor* const, 4> models,
                                  const OhlcSeries& history, const OhlcSeries& actuals,
                                  std::size_t horizon, ForecastMode mode) {
  if (horizon < 1) throw Error(Errc::InvalidArgument, "horizon must be >= 1");
  for (const auto* m : models) {
    if (m == nullptr) throw Error(Errc::InvalidArgument, "missing channel model");
    if (history.size() < m->window()) {
      throw Error(Errc::InsufficientHistory, "history has " + std::to_string(history.size()) +
                                                 " bars, model window is " + std::to_string(m->window()));
    }
  }
  if (mode == ForecastMode::TeacherForced && actuals.size() < horizon) {
    throw Error(Errc::MissingActuals, "teacher-forced forecast needs " + std::to_string(horizon) +
                                          " actual bars, got " + std::to_string(actuals.size()));
  }

  ForecastSet out;
  out.dates.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    if (h < actuals.size()) {
      out.dates.push_back(actuals[h].date);
    } else {
      out.dates.push_back(next_weekday(h == 0 ? history.back().date : out.dates.back()));
    }
  }

  // Channels are independent; each is cheap, so they run sequentially.
  for (Channel c : kAllChannels) {
    const auto ci = static_cast<std::size_t>(c);
    const auto& model = *models[ci];
    const std::size_t w = model.window();
    std::vector<double> buf;
    const auto hist = history.channel(c);
    buf.assign(hist.end() - static_cast<std::ptrdiff_t>(w), hist.end());
    auto& pred = out.channels[ci];
    pred.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
      const double p = model.predict_next(std::span(buf).last(w));
      pred.push_back(p);
      buf.push_back(mode == ForecastMode::TeacherForced ? actuals[h].value(c) : p);
    }
  }
  return out;
}

ErrorReport compute_error_metrics(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(actual.size()) + " actuals vs " +
                                          std::to_string(predicted.size()) + " predictions");
  }
  if (actual.empty()) throw Error(Errc::LengthMismatch, "series are empty");
  const auto n = static_cast<double>(actual.size());
  double se = 0.0, ae = 0.0, ape = 0.0, err_sum = 0.0, y_sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw Error(Errc::ZeroActual, "MAPE undefined: actual value is zero");
    const double e = actual[i] - predicted[i];
    se += e * e;
    ae += std::fabs(e);
    ape += std::fabs(e / actual[i]);
    err_sum += e;
    y_sum += actual[i];
  }
  const double err_mean = err_sum / n;
  const double y_mean = y_sum / n;
  double err_var = 0.0, y_var = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i] - err_mean;
    const double y = actual[i] - y_mean;
    err_var += e * e;
    y_var += y * y;
  }
  if (!(y_var > 0.0)) throw Error(Errc::ZeroVariance, "EVS undefined: actuals are constant");

  ErrorReport r;
  r.mse = se / n;
  r.rmse = std::sqrt(r.mse);
  r.mae = ae / n;
  r.mape = ape / n;
  r.evs = 1.0 - (err_var / n) / (y_var / n);
  return r;
}

std::array<ErrorReport, 4> evaluate_forecast(const ForecastSet& forecast, const OhlcSeries& actuals) {
  if (actuals.size() < forecast.size()) {
    throw Error(Errc::MissingActuals, "not enough actual bars to score the forecast");
  }
  std::array<ErrorReport, 4> out;
  for (Channel c : kAllChannels) {
    auto y = actuals.channel(c);
    y.resize(forecast.size());
    out[static_cast<std::size_t>(c)] = compute_error_metrics(y, forecast.channel(c));
  }
  return out;
}

std::array<ChannelModel, 4> train_channel_models(const OhlcSeries& train_series, const MlpConfig& config,
                                                 double validation_fraction) {
  validate_config(config);
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "validation_fraction must be in (0, 1)");
  }
  std::array<std::future<ChannelModel>, 4> jobs;
  for (Channel c : kAllChannels) {
    jobs[static_cast<std::size_t>(c)] = std::async(std::launch::async, [&train_series, config, c,
                                                                        validation_fraction] {
      const auto values = train_series.channel(c);
      const auto scaler = MinMaxScaler::fit(values);
      const auto samples = make_lag_dataset(train_series, c, config.input_size);
      const auto n_val = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(samples.size()))));
      if (n_val >= samples.size()) throw Error(Errc::EmptyDataset, "too few samples to hold out validation");
      const auto split = samples.size() - n_val;
      const auto fit_set = to_dataset(std::span(samples).first(split), scaler);
      const auto val_set = to_dataset(std::span(samples).subspan(split), scaler);

      MlpConfig cfg = config;
      cfg.seed = config.seed + static_cast<std::uint64_t>(c);
      MlpModel model = init_mlp(cfg);
      model.scaler = scaler;
      auto result = train(std::move(model), fit_set, val_set);
      return ChannelModel{c, std::move(result.model), std::move(result.history)};
    });
  }
  return {jobs[0].get(), jobs[1].get(), jobs[2].get(), jobs[3].get()};
}

std::string forecast_csv(const ForecastSet& f) {
  std::string out = "date,open,high,low,close\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += to_iso(f.dates[i]);
    for (Channel c : kAllChannels) {
      out += ',';
      detail::append_number(out, f.channel(c)[i]);
    }
    out += '\n';
  }
  return out;
}

ForecastSet parse_forecast_csv(std::string_view text) {
  ForecastSet f;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "date,open,high,low,close") throw MalformedRowError(line_no, "expected date,open,high,low,close");
      header = false;
      continue;
    }
    std::array<std::string_view, 5> cells;
    std::size_t k = 0;
    for (; k < 5 && !line.empty(); ++k) {
      const auto comma = line.find(',');
      cells[k] = line.substr(0, comma);
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    }
    if (k != 5 || !line.empty()) throw MalformedRowError(line_no, "expected 5 fields");
    const auto d = parse_iso_date(cells[0]);
    if (!d) throw MalformedRowError(line_no, "bad date");
    f.dates.push_back(*d);
    for (std::size_t c = 0; c < 4; ++c) {
      double v = 0.0;
      const auto cell = cells[c + 1];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw MalformedRowError(line_no, "bad number");
      f.channels[c].push_back(v);
    }
  }
  return f;
}

std::string error_report_csv(const std::array<ErrorReport, 4>& reports) {
  std::string out = "channel,mse,rmse,mae,mape,evs\n";
  for (Channel c : kAllChannels) {
    const auto& r = reports[static_cast<std::size_t>(c)];
    out += std::string(channel_name(c));
    for (double v : {r.mse, r.rmse, r.mae, r.mape, r.evs}) {
      out += ',';
      detail::append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace tradenet
