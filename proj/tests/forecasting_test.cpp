#include "tradenet/forecasting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "tradenet/error.hpp"

using namespace tradenet;

namespace {

// Returns the last element of its window.
class Persistence final : public OneStepPredictor {
 public:
  std::size_t window() const override { return 5; }
  double predict_next(std::span<const double> w) const override { return w.back(); }
};

// Mean of the window; makes recursive and teacher-forced paths differ.
class WindowMean final : public OneStepPredictor {
 public:
  std::size_t window() const override { return 5; }
  double predict_next(std::span<const double> w) const override {
    return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  }
};

OhlcSeries walk_series(std::uint64_t seed, std::size_t n, Date start = Date{std::chrono::year{2021}, std::chrono::month{1}, std::chrono::day{4}}) {
  auto closes = testkit::random_walk(seed, n, 0.0, 50.0, 0.5);
  std::vector<OhlcBar> bars;
  std::chrono::sys_days day{start};
  for (std::size_t i = 0; i < n; ++i) {
    while (std::chrono::weekday{day} == std::chrono::Saturday || std::chrono::weekday{day} == std::chrono::Sunday)
      day += std::chrono::days{1};
    OhlcBar b;
    b.date = Date{day};
    b.close = closes[i];
    b.open = closes[i] + 0.1;
    b.high = closes[i] + 0.5;
    b.low = closes[i] - 0.5;
    bars.push_back(b);
    day += std::chrono::days{1};
  }
  return OhlcSeries("TEST", std::move(bars));
}

}  // namespace

TEST(LagDataset, BoundaryLength) {
  std::vector<double> v{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(make_lag_dataset(v, 5).size(), 1u);
}

TEST(LagDataset, FirstSample) {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
  auto s = make_lag_dataset(v, 5);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].window, (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_EQ(s[0].target, 6.0);
  EXPECT_EQ(s[1].window, (std::vector<double>{2, 3, 4, 5, 6}));
  EXPECT_EQ(s[1].target, 7.0);
}

TEST(LagDataset, TrainingSliceCount) {
  auto series = read_ohlc_csv(std::string(TRADENET_SOURCE_DIR) + "/data/SYNTH.csv", "SYNTH");
  auto split = split_series(series, 30);
  ASSERT_EQ(split.train.size(), 2507u);
  auto s = make_lag_dataset(split.train, Channel::Close, 5);
  EXPECT_EQ(s.size(), 2502u);
  EXPECT_EQ(s[0].target_date, split.train[5].date);
  EXPECT_EQ(s.back().target_date, split.train.back().date);
}

TEST(LagDataset, TooShort) {
  std::vector<double> v{1, 2, 3, 4, 5};
  try {
    make_lag_dataset(v, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SeriesTooShort);
  }
}

TEST(LagDataset, ScaledDataset) {
  std::vector<double> v{10, 20, 30, 40, 50, 60, 70};
  auto d = to_dataset(make_lag_dataset(v, 5), MinMaxScaler{10.0, 70.0});
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.inputs(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.targets(1), 1.0);
}

TEST(WalkForward, ShapeAndDates) {
  auto s = walk_series(1, 80);
  auto split = split_series(s, 30);
  Persistence p;
  std::array<const OneStepPredictor*, 4> models{&p, &p, &p, &p};
  auto f = walk_forward_forecast(models, split.train, split.validation, 30);
  ASSERT_EQ(f.size(), 30u);
  for (Channel c : kAllChannels) EXPECT_EQ(f.channel(c).size(), 30u);
  EXPECT_EQ(f.dates, split.validation.dates());
}

TEST(WalkForward, TeacherForcedPersistenceIsShiftedActuals) {
  auto s = walk_series(2, 80);
  auto split = split_series(s, 30);
  Persistence p;
  std::array<const OneStepPredictor*, 4> models{&p, &p, &p, &p};
  auto f = walk_forward_forecast(models, split.train, split.validation, 30, ForecastMode::TeacherForced);
  for (Channel c : kAllChannels) {
    EXPECT_EQ(f.channel(c)[0], split.train.back().value(c));
    for (std::size_t h = 1; h < 30; ++h) EXPECT_EQ(f.channel(c)[h], split.validation[h - 1].value(c));
  }
}

TEST(WalkForward, RecursivePersistenceIsFlat) {
  auto s = walk_series(3, 80);
  auto split = split_series(s, 30);
  Persistence p;
  std::array<const OneStepPredictor*, 4> models{&p, &p, &p, &p};
  auto f = walk_forward_forecast(models, split.train, split.validation, 30, ForecastMode::Recursive);
  for (Channel c : kAllChannels)
    for (double v : f.channel(c)) EXPECT_EQ(v, split.train.back().value(c));
}

TEST(WalkForward, ModesAgreeOnHorizonOne) {
  auto s = walk_series(4, 80);
  auto split = split_series(s, 30);
  WindowMean m;
  std::array<const OneStepPredictor*, 4> models{&m, &m, &m, &m};
  auto a = walk_forward_forecast(models, split.train, split.validation, 1, ForecastMode::TeacherForced);
  auto b = walk_forward_forecast(models, split.train, split.validation, 1, ForecastMode::Recursive);
  for (Channel c : kAllChannels) EXPECT_EQ(a.channel(c), b.channel(c));
  auto a5 = walk_forward_forecast(models, split.train, split.validation, 5, ForecastMode::TeacherForced);
  auto b5 = walk_forward_forecast(models, split.train, split.validation, 5, ForecastMode::Recursive);
  EXPECT_NE(a5.channel(Channel::Close), b5.channel(Channel::Close));
}

TEST(WalkForward, RecursiveWithoutActualsUsesWeekdays) {
  auto s = walk_series(5, 20);  // ends on a weekday; next dates skip weekends
  Persistence p;
  std::array<const OneStepPredictor*, 4> models{&p, &p, &p, &p};
  auto f = walk_forward_forecast(models, s, OhlcSeries{}, 7, ForecastMode::Recursive);
  ASSERT_EQ(f.size(), 7u);
  for (const auto& d : f.dates) {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    EXPECT_NE(wd, std::chrono::Saturday);
    EXPECT_NE(wd, std::chrono::Sunday);
  }
  EXPECT_GT(std::chrono::sys_days{f.dates[0]}, std::chrono::sys_days{s.back().date});
}

TEST(WalkForward, Errors) {
  auto s = walk_series(6, 40);
  auto split = split_series(s, 30);
  Persistence p;
  std::array<const OneStepPredictor*, 4> models{&p, &p, &p, &p};
  try {
    walk_forward_forecast(models, split.train.slice(0, 4), split.validation, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientHistory);
  }
  try {
    walk_forward_forecast(models, split.train, split.validation.slice(0, 10), 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingActuals);
  }
  EXPECT_NO_THROW(walk_forward_forecast(models, split.train, split.validation.slice(0, 10), 30,
                                        ForecastMode::Recursive));
}

TEST(Metrics, PerfectForecast) {
  std::vector<double> y{1.0, 2.0, 4.0, 3.0};
  auto r = compute_error_metrics(y, y);
  EXPECT_EQ(r.mse, 0.0);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.mape, 0.0);
  EXPECT_EQ(r.evs, 1.0);
}

TEST(Metrics, ConstantOffset) {
  std::vector<double> y{10.0, 12.0, 11.0, 15.0};
  std::vector<double> p;
  for (double v : y) p.push_back(v + 0.75);
  auto r = compute_error_metrics(y, p);
  EXPECT_DOUBLE_EQ(r.mae, 0.75);
  EXPECT_DOUBLE_EQ(r.evs, 1.0);
  EXPECT_DOUBLE_EQ(r.mse, 0.75 * 0.75);
  EXPECT_GE(r.mse, r.mae * r.mae - 1e-15);
}

TEST(Metrics, HandComputed) {
  std::vector<double> y{2.0, 4.0, 6.0};
  std::vector<double> p{3.0, 3.0, 6.0};
  auto r = compute_error_metrics(y, p);
  // errors -1, 1, 0
  EXPECT_DOUBLE_EQ(r.mse, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.mae, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.mape, (0.5 + 0.25) / 3.0);
  // Var(e) = 2/3, Var(y) = 8/3
  EXPECT_DOUBLE_EQ(r.evs, 0.75);
  EXPECT_EQ(r.rmse, std::sqrt(r.mse));
}

TEST(Metrics, EvsShiftInvariantAndBounded) {
  auto y = testkit::random_walk(7, 30, 0.0, 40.0);
  auto p = testkit::random_walk(8, 30, 0.0, 40.0);
  auto r = compute_error_metrics(y, p);
  for (double& v : y) v += 100.0;
  for (double& v : p) v += 100.0;
  EXPECT_NEAR(compute_error_metrics(y, p).evs, r.evs, 1e-12);
  EXPECT_LE(r.evs, 1.0);
}

TEST(Metrics, Errors) {
  std::vector<double> a{1.0, 2.0};
  std::vector<double> b{1.0};
  std::vector<double> zero{0.0, 1.0};
  std::vector<double> flat{3.0, 3.0};
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code([&] { compute_error_metrics(a, b); }), Errc::LengthMismatch);
  EXPECT_EQ(code([&] { compute_error_metrics(zero, a); }), Errc::ZeroActual);
  EXPECT_EQ(code([&] { compute_error_metrics(flat, a); }), Errc::ZeroVariance);
}

TEST(TrainChannels, SeedsAndScalersPerChannel) {
  auto s = walk_series(9, 200);
  MlpConfig c;
  c.hidden_sizes = {8, 8};
  c.max_epochs = 3;
  c.seed = 100;
  auto models = train_channel_models(s, c);
  for (Channel ch : kAllChannels) {
    const auto& m = models[static_cast<std::size_t>(ch)];
    EXPECT_EQ(m.channel, ch);
    EXPECT_EQ(m.model.config.seed, 100u + static_cast<std::uint64_t>(ch));
    auto v = s.channel(ch);
    EXPECT_EQ(m.model.scaler.min, *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(m.model.scaler.max, *std::max_element(v.begin(), v.end()));
    EXPECT_GE(m.history.best_epoch, 1u);
  }
  auto again = train_channel_models(s, c);
  EXPECT_EQ(again[3].history.validation_losses, models[3].history.validation_losses);
}

TEST(ForecastCsv, Layout) {
  ForecastSet f;
  f.dates = {Date{std::chrono::year{2021}, std::chrono::month{11}, std::chrono::day{1}}};
  f.channels = {{{40.5}, {41.25}, {39.0}, {40.0}}};
  EXPECT_EQ(forecast_csv(f), "date,open,high,low,close\n2021-11-01,40.5,41.25,39,40\n");
}

TEST(ForecastCsv, RoundTrip) {
  auto s = walk_series(10, 40);
  auto split = split_series(s, 10);
  WindowMean m;
  std::array<const OneStepPredictor*, 4> models{&m, &m, &m, &m};
  auto f = walk_forward_forecast(models, split.train, split.validation, 10);
  auto back = parse_forecast_csv(forecast_csv(f));
  EXPECT_EQ(back.dates, f.dates);
  EXPECT_EQ(back.channels, f.channels);
  EXPECT_THROW(parse_forecast_csv("date,open,high,low,close\n2021-11-01,1,2,3\n"), MalformedRowError);
  EXPECT_THROW(parse_forecast_csv("d,o\n"), MalformedRowError);
}
