#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradenet/date.hpp"
#include "tradenet/market_data.hpp"
#include "tradenet/neuralnet.hpp"

namespace tradenet {

struct LagSample {
  std::vector<double> window;
  double target = 0.0;
  Date target_date{};
};

// One sample per position: window = values[i..i+window), target = values[i+window].
std::vector<LagSample> make_lag_dataset(std::span<const double> values, std::size_t window = 5);
std::vector<LagSample> make_lag_dataset(const OhlcSeries& series, Channel channel, std::size_t window = 5);

// Min-max scales windows and targets into a trainer dataset.
Dataset to_dataset(std::span<const LagSample> samples, const MinMaxScaler& scaler);

// Predicts the next price from the most recent prices (price units in and out).
class OneStepPredictor {
 public:
  virtual ~OneStepPredictor() = default;
  virtual std::size_t window() const = 0;
  virtual double predict_next(std::span<const double> window) const = 0;
};

class MlpPredictor final : public OneStepPredictor {
 public:
  explicit MlpPredictor(MlpModel model) : model_(std::move(model)) {}
  std::size_t window() const override { return model_.config.input_size; }
  double predict_next(std::span<const double> window) const override;
  const MlpModel& model() const { return model_; }

 private:
  MlpModel model_;
};

enum class ForecastMode { TeacherForced, Recursive };

struct ForecastSet {
  std::vector<Date> dates;
  std::array<std::vector<double>, 4> channels;  // indexed by Channel

  std::size_t size() const { return dates.size(); }
  const std::vector<double>& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }
};

// Day-by-day forecast. Teacher-forced windows slide over observed values
// (actuals must cover the horizon); recursive windows slide over the
// predictions. Recursive dates come from actuals when available, otherwise
// the following weekdays.
ForecastSet walk_forward_forecast(std::span<const OneStepPredictor* const, 4> models,
                                  const OhlcSeries& history, const OhlcSeries& actuals,
                                  std::size_t horizon = 30, ForecastMode mode = ForecastMode::TeacherForced);

struct ErrorReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  double evs = 0.0;
};

ErrorReport compute_error_metrics(std::span<const double> actual, std::span<const double> predicted);

// Per-channel metrics of a forecast against the first forecast.size() actual bars.
std::array<ErrorReport, 4> evaluate_forecast(const ForecastSet& forecast, const OhlcSeries& actuals);

struct ChannelModel {
  Channel channel = Channel::Close;
  MlpModel model;  // carries its scaler
  TrainHistory history;
};

// Trains one model per channel on `train` (concurrently). The scaler is fitted
// on the channel's training values; the chronologically last
// `validation_fraction` of lag samples drives early stopping. Channel i uses
// seed config.seed + i.
std::array<ChannelModel, 4> train_channel_models(const OhlcSeries& train, const MlpConfig& config,
                                                 double validation_fraction = 0.1);

std::string forecast_csv(const ForecastSet& forecast);
// Inverse of forecast_csv. Throws MalformedRow with the 1-based line number.
ForecastSet parse_forecast_csv(std::string_view text);
std::string error_report_csv(const std::array<ErrorReport, 4>& reports);

}  // namespace tradenet
