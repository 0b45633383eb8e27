#include "tradenet/neuralnet.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "tradenet/error.hpp"

using namespace tradenet;

namespace {

MlpConfig small_config(std::size_t in, std::vector<std::size_t> hidden, double dropout = 0.0,
                       std::uint64_t seed = 7) {
  MlpConfig c;
  c.input_size = in;
  c.hidden_sizes = std::move(hidden);
  c.dropout_rate = dropout;
  c.seed = seed;
  return c;
}

Eigen::MatrixXd random_inputs(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  testkit::SplitMix64 rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform() * 2.0 - 1.0;
  return x;
}

Eigen::VectorXd random_targets(std::uint64_t seed, std::size_t rows) {
  testkit::SplitMix64 rng(seed);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
  return y;
}

// Biases start at zero; give them values so every parameter is exercised.
void perturb_biases(MlpModel& m, std::uint64_t seed) {
  testkit::SplitMix64 rng(seed);
  for (auto& b : m.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.3 * rng.normal();
}

// Central differences are only meaningful away from the |.| and ReLU kinks.
double distance_to_kink(MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  double d = (predict_batch(model, x) - y).cwiseAbs().minCoeff();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    const auto cache = forward(model, row, false).cache;
    for (std::size_t l = 0; l + 1 < cache.pre_activations.size(); ++l)
      d = std::min(d, cache.pre_activations[l].cwiseAbs().minCoeff());
  }
  return d;
}

double max_gradient_error(MlpModel model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  EXPECT_GT(distance_to_kink(model, x, y), 1e-3) << "sample too close to a kink for finite differences";
  Gradients g;
  loss_and_gradients(model, x, y, false, g);
  auto loss_at = [&](MlpModel& m) {
    Gradients unused;
    return loss_and_gradients(m, x, y, false, unused);
  };
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss_at(model);
    param = saved - h;
    const double down = loss_at(model);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-7});
    worst = std::max(worst, std::fabs(analytic - numeric) / scale);
  };
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < model.weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < model.weights[l].cols(); ++j) check(model.weights[l](i, j), g.weights[l](i, j));
    for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) check(model.biases[l](i), g.biases[l](i));
  }
  return worst;
}

Dataset mean_of_five(std::uint64_t seed, std::size_t n) {
  Dataset d;
  d.inputs = (random_inputs(seed, n, 5).array() + 1.0) / 2.0;
  d.targets = d.inputs.rowwise().mean();
  return d;
}

}  // namespace

TEST(InitMlp, DeterministicForSeed) {
  auto a = init_mlp(small_config(5, {8, 8}));
  auto b = init_mlp(small_config(5, {8, 8}));
  ASSERT_EQ(a.weights.size(), b.weights.size());
  for (std::size_t l = 0; l < a.weights.size(); ++l) EXPECT_EQ(a.weights[l], b.weights[l]);
  auto c = init_mlp(small_config(5, {8, 8}, 0.0, 8));
  EXPECT_NE(a.weights[0], c.weights[0]);
}

TEST(InitMlp, DefaultGeometryShapes) {
  auto m = init_mlp(MlpConfig{});
  ASSERT_EQ(m.weights.size(), 3u);
  EXPECT_EQ(m.weights[0].rows(), 5);
  EXPECT_EQ(m.weights[0].cols(), 150);
  EXPECT_EQ(m.weights[1].rows(), 150);
  EXPECT_EQ(m.weights[1].cols(), 150);
  EXPECT_EQ(m.weights[2].rows(), 150);
  EXPECT_EQ(m.weights[2].cols(), 1);
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_TRUE(m.biases[l].isZero(0.0));
    EXPECT_EQ(m.adam.m_weights[l].rows(), m.weights[l].rows());
    EXPECT_EQ(m.adam.v_weights[l].cols(), m.weights[l].cols());
    EXPECT_TRUE(m.adam.m_weights[l].isZero(0.0));
  }
  EXPECT_EQ(m.adam.step, 0u);
}

TEST(InitMlp, HeScale) {
  auto m = init_mlp(small_config(2, {5000}));
  const auto& w = m.weights[0];
  ASSERT_EQ(w.size(), 10000);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
  EXPECT_NEAR(std::sqrt(var), 1.0, 0.05);
}

TEST(InitMlp, InvalidConfig) {
  auto expect_invalid = [](MlpConfig c) {
    try {
      init_mlp(c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidConfig);
    }
  };
  MlpConfig c;
  c.input_size = 0;
  expect_invalid(c);
  c = {};
  c.dropout_rate = 1.0;
  expect_invalid(c);
  c = {};
  c.output_size = 2;
  expect_invalid(c);
  c = {};
  c.hidden_sizes = {};
  expect_invalid(c);
  c = {};
  c.learning_rate = 0.0;
  expect_invalid(c);
}

TEST(Forward, ZeroWeightsGiveZero) {
  auto m = init_mlp(small_config(5, {8, 8}));
  for (auto& w : m.weights) w.setZero();
  std::vector<double> x{1, -2, 3, 4, 5};
  EXPECT_EQ(forward(m, x, false).output, 0.0);
  EXPECT_EQ(predict(m, x), 0.0);
}

TEST(Forward, NoDropoutTrainEqualsEval) {
  auto m = init_mlp(small_config(5, {8, 8}, 0.0));
  perturb_biases(m, 3);
  std::vector<double> x{0.1, 0.2, -0.3, 0.4, 0.5};
  EXPECT_EQ(forward(m, x, true).output, forward(m, x, false).output);
}

TEST(Forward, MatchesHandComputation) {
  auto m = init_mlp(small_config(4, {6, 3}));
  perturb_biases(m, 5);
  std::vector<double> x{0.3, -0.7, 1.1, 0.05};
  std::vector<double> a(x);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    const auto& w = m.weights[l];
    std::vector<double> z(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      double s = m.biases[l](j);
      for (Eigen::Index i = 0; i < w.rows(); ++i) s += a[static_cast<std::size_t>(i)] * w(i, j);
      z[static_cast<std::size_t>(j)] = (l + 1 < m.weights.size()) ? std::max(0.0, s) : s;
    }
    a = std::move(z);
  }
  EXPECT_NEAR(predict(m, x), a[0], 1e-10);
  EXPECT_NEAR(forward(m, x, false).output, a[0], 1e-10);
}

TEST(Forward, ShapeMismatch) {
  auto m = init_mlp(small_config(5, {4}));
  std::vector<double> x{1.0, 2.0};
  try {
    predict(m, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

TEST(Forward, InvertedDropoutPreservesExpectation) {
  auto m = init_mlp(small_config(5, {12}, 0.2, 11));
  perturb_biases(m, 12);
  std::vector<double> x{0.4, -0.1, 0.9, 0.3, -0.6};
  const Eigen::MatrixXd eval = forward(m, x, false).cache.activations.back();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(eval.rows(), eval.cols());
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) sum += forward(m, x, true).cache.activations.back();
  const Eigen::MatrixXd mean = sum / draws;
  for (Eigen::Index j = 0; j < eval.cols(); ++j) {
    if (eval(0, j) == 0.0) {
      EXPECT_EQ(mean(0, j), 0.0);
    } else {
      EXPECT_NEAR(mean(0, j) / eval(0, j), 1.0, 0.02) << "unit " << j;
    }
  }
}

TEST(Loss, Mae) {
  EXPECT_EQ(loss_mae(3.0, 3.0), 0.0);
  EXPECT_EQ(loss_mae(2.0, 5.0), 3.0);
  std::vector<double> pred{1.5, -0.5};
  std::vector<double> act{1.0, 0.0};
  EXPECT_DOUBLE_EQ(batch_loss_mae(pred, act), 0.5);
}

TEST(TrainStep, GradientCheckTiny) {
  auto m = init_mlp(small_config(2, {3}, 0.0, 21));
  perturb_biases(m, 22);
  auto x = random_inputs(23, 20, 2);
  auto y = random_targets(24, 20);
  EXPECT_LE(max_gradient_error(m, x, y), 1e-4);
}

TEST(TrainStep, GradientCheckTwoHiddenLayers) {
  auto m = init_mlp(small_config(5, {8, 8}, 0.0, 31));
  perturb_biases(m, 32);
  auto x = random_inputs(33, 20, 5);
  auto y = random_targets(34, 20);
  EXPECT_LE(max_gradient_error(m, x, y), 1e-4);
}

TEST(TrainStep, GradientCheckDeeperStack) {
  auto m = init_mlp(small_config(3, {4, 5, 3}, 0.0, 49));
  perturb_biases(m, 42);
  auto x = random_inputs(43, 20, 3);
  auto y = random_targets(44, 20);
  EXPECT_LE(max_gradient_error(m, x, y), 1e-4);
}

TEST(TrainStep, ZeroErrorLeavesParametersUnchanged) {
  auto m = init_mlp(small_config(5, {8, 8}, 0.0));
  perturb_biases(m, 3);
  auto x = random_inputs(4, 6, 5);
  Eigen::VectorXd y = predict_batch(m, x);
  auto before = m;
  const double loss = train_step(m, x, y);
  EXPECT_EQ(loss, 0.0);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    EXPECT_EQ(m.weights[l], before.weights[l]);
    EXPECT_EQ(m.biases[l], before.biases[l]);
  }
  EXPECT_EQ(m.adam.step, 1u);
}

TEST(TrainStep, DeterministicReplay) {
  auto m = init_mlp(small_config(5, {8, 8}, 0.0));
  auto x = random_inputs(5, 5, 5);
  auto y = random_targets(6, 5);
  auto a = m;
  auto b = m;
  EXPECT_EQ(train_step(a, x, y), train_step(b, x, y));
  EXPECT_EQ(train_step(a, x, y), train_step(b, x, y));
  EXPECT_EQ(a.weights[0], b.weights[0]);
}

TEST(TrainStep, ReducesLossOnFixedBatch) {
  auto m = init_mlp(small_config(5, {16, 16}, 0.0));
  auto x = random_inputs(7, 20, 5);
  auto y = random_targets(8, 20);
  const double first = train_step(m, x, y);
  double last = first;
  for (int i = 0; i < 300; ++i) last = train_step(m, x, y);
  EXPECT_LT(last, first);
}

TEST(TrainStep, NonFiniteGradientRejected) {
  auto m = init_mlp(small_config(2, {3}, 0.0));
  Eigen::MatrixXd x(1, 2);
  x << std::numeric_limits<double>::quiet_NaN(), 1.0;
  Eigen::VectorXd y(1);
  y << 0.0;
  auto before = m;
  try {
    train_step(m, x, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteGradient);
  }
  EXPECT_EQ(m.weights[0], before.weights[0]);
  EXPECT_EQ(m.adam.step, 0u);
}

TEST(Train, LearnsMeanOfInputs) {
  // Default geometry. Dropout 0.2 leaves an eval-mode noise floor near 0.014
  // on this target, so the convergence check runs without it.
  MlpConfig c;
  c.dropout_rate = 0.0;
  c.max_epochs = 200;
  auto train_set = mean_of_five(101, 2000);
  auto val_set = mean_of_five(102, 400);
  auto res = train(init_mlp(c), train_set, val_set);
  EXPECT_LT(res.history.best_validation_loss, 0.01);
  EXPECT_LE(res.history.stopped_epoch, 200u);
  const double achieved = (predict_batch(res.model, val_set.inputs) - val_set.targets).cwiseAbs().mean();
  EXPECT_DOUBLE_EQ(achieved, res.history.best_validation_loss);
  EXPECT_DOUBLE_EQ(res.history.best_validation_loss,
                   *std::min_element(res.history.validation_losses.begin(),
                                     res.history.validation_losses.end()));
}

TEST(Train, PatienceZeroStopsAtFirstNonImprovement) {
  auto c = small_config(5, {8, 8}, 0.2);
  c.patience = 0;
  c.max_epochs = 300;
  auto res = train(init_mlp(c), mean_of_five(1, 200), mean_of_five(2, 50));
  const auto& v = res.history.validation_losses;
  ASSERT_EQ(v.size(), res.history.stopped_epoch);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) EXPECT_LT(v[i], v[i - 1]);
  if (v.size() < 300) EXPECT_GE(v.back(), v[v.size() - 2]);
  EXPECT_EQ(res.history.best_epoch + 1, res.history.stopped_epoch);
}

TEST(Train, DeterministicHistory) {
  auto c = small_config(5, {16, 16}, 0.2);
  c.max_epochs = 20;
  auto t = mean_of_five(3, 300);
  auto v = mean_of_five(4, 60);
  auto a = train(init_mlp(c), t, v);
  auto b = train(init_mlp(c), t, v);
  EXPECT_EQ(a.history.train_losses, b.history.train_losses);
  EXPECT_EQ(a.history.validation_losses, b.history.validation_losses);
  EXPECT_EQ(a.model.weights[2], b.model.weights[2]);
}

TEST(Train, EmptyDataset) {
  auto m = init_mlp(small_config(5, {4}));
  Dataset empty;
  empty.inputs.resize(0, 5);
  try {
    train(m, empty, mean_of_five(1, 10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyDataset);
  }
}

TEST(GridSearch, EmptyGrid) {
  std::vector<ChannelData> ch(1);
  try {
    grid_search({}, ch, MlpConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyGrid);
  }
}

TEST(GridSearch, WinnerIsMinimumOfReproducibleTable) {
  MlpConfig base = small_config(5, {8});
  base.max_epochs = 15;
  std::vector<ChannelData> channels;
  for (std::uint64_t s = 0; s < 4; ++s) channels.push_back({mean_of_five(10 + s, 200), mean_of_five(20 + s, 50)});
  std::vector<std::vector<std::size_t>> grid{{16, 16}, {4, 4}};
  auto a = grid_search(grid, channels, base);
  auto b = grid_search(grid, channels, base);
  ASSERT_EQ(a.scores.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.scores[i].channel_losses, b.scores[i].channel_losses);
    EXPECT_DOUBLE_EQ(a.scores[i].total, std::accumulate(a.scores[i].channel_losses.begin(),
                                                        a.scores[i].channel_losses.end(), 0.0));
  }
  auto best = std::min_element(a.scores.begin(), a.scores.end(),
                               [](const GridScore& x, const GridScore& y) { return x.total < y.total; });
  EXPECT_EQ(a.best.hidden_sizes, best->hidden_sizes);

  auto single = grid_search({{4, 4}}, channels, base);
  EXPECT_EQ(single.best.hidden_sizes, (std::vector<std::size_t>{4, 4}));
}

TEST(Serialization, RoundTrip) {
  auto m = init_mlp(small_config(5, {7, 6}, 0.2));
  perturb_biases(m, 9);
  m.scaler = {12.25, 84.4};
  train_step(m, random_inputs(1, 5, 5), random_targets(2, 5));
  const auto text = save_model(m);
  auto back = load_model(text);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.scaler, m.scaler);
  EXPECT_EQ(back.adam.step, m.adam.step);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    EXPECT_EQ(back.weights[l], m.weights[l]);
    EXPECT_EQ(back.biases[l], m.biases[l]);
    EXPECT_EQ(back.adam.v_weights[l], m.adam.v_weights[l]);
  }
  auto x = random_inputs(3, 50, 5);
  EXPECT_LE((predict_batch(back, x) - predict_batch(m, x)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(save_model(back), text);
}

TEST(Serialization, TruncatedPayload) {
  auto text = save_model(init_mlp(small_config(5, {7, 6})));
  for (std::size_t cut : {text.size() / 3, text.size() / 2, text.size() - 5}) {
    try {
      load_model(text.substr(0, cut));
      FAIL() << "cut " << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::CorruptPayload);
    }
  }
}

TEST(Serialization, VersionMismatch) {
  auto text = save_model(init_mlp(small_config(5, {3})));
  const auto pos = text.find("version 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 9, "version 2");
  try {
    load_model(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedVersion);
  }
}

TEST(Serialization, GarbageRejected) {
  try {
    load_model("not a model");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CorruptPayload);
  }
}

TEST(Scaler, FitAndInverse) {
  std::vector<double> v{10.0, 30.0, 20.0};
  auto s = MinMaxScaler::fit(v);
  EXPECT_EQ(s.min, 10.0);
  EXPECT_EQ(s.max, 30.0);
  EXPECT_DOUBLE_EQ(s.transform(20.0), 0.5);
  EXPECT_DOUBLE_EQ(s.inverse(s.transform(27.3)), 27.3);
  std::vector<double> flat{2.0, 2.0};
  EXPECT_THROW(MinMaxScaler::fit(flat), Error);
}
