#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tradenet {

enum class Activation { Relu };
enum class LossKind { Mae };

struct MlpConfig {
  std::size_t input_size = 5;
  std::vector<std::size_t> hidden_sizes{150, 150};
  std::size_t output_size = 1;
  double dropout_rate = 0.2;
  Activation activation = Activation::Relu;
  LossKind loss = LossKind::Mae;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 5;
  std::size_t max_epochs = 500;
  std::size_t patience = 50;
  std::uint64_t seed = 42;

  bool operator==(const MlpConfig&) const = default;
};

// Throws InvalidConfig.
void validate_config(const MlpConfig& config);

// Min-max map of one price channel onto [0, 1].
struct MinMaxScaler {
  double min = 0.0;
  double max = 1.0;

  static MinMaxScaler fit(std::span<const double> values);
  double transform(double x) const { return (x - min) / (max - min); }
  double inverse(double z) const { return min + z * (max - min); }
  bool operator==(const MinMaxScaler&) const = default;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  std::uint64_t step = 0;
};

struct MlpModel {
  MlpConfig config;
  std::vector<Eigen::MatrixXd> weights;  // layer l: fan_in x fan_out
  std::vector<Eigen::VectorXd> biases;   // layer l: fan_out
  AdamState adam;
  MinMaxScaler scaler;
  std::mt19937_64 rng;  // dropout masks and batch shuffling; reseeded from config.seed on load
};

// Rows are samples; already scaled.
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }
};

struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;      // input plus each hidden output (post dropout)
  std::vector<Eigen::MatrixXd> pre_activations;  // each layer's affine output
  std::vector<Eigen::MatrixXd> masks;            // inverted-dropout multipliers (empty if unused)
};

struct ForwardResult {
  double output = 0.0;
  ForwardCache cache;
};

// He-normal weights (std sqrt(2/fan_in)), zero biases, zero Adam moments.
MlpModel init_mlp(const MlpConfig& config);

// Single sample. Dropout is only applied when train_mode is set and then
// draws from model.rng.
ForwardResult forward(MlpModel& model, std::span<const double> input, bool train_mode);

// Eval-mode forward pass without side effects.
double predict(const MlpModel& model, std::span<const double> input);
Eigen::VectorXd predict_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

double loss_mae(double predicted, double actual);
double batch_loss_mae(std::span<const double> predicted, std::span<const double> actual);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Mean L1 loss over the batch and its gradient (subgradient 0 at zero error).
// With train_mode set, dropout masks are drawn from model.rng.
double loss_and_gradients(MlpModel& model, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& targets, bool train_mode, Gradients& grads);

// One Adam step on the batch; returns the batch loss. Throws
// NonFiniteGradient without touching the model.
double train_step(MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);

struct TrainHistory {
  std::vector<double> train_losses;
  std::vector<double> validation_losses;
  std::size_t stopped_epoch = 0;  // epochs actually run
  std::size_t best_epoch = 0;     // 1-based
  double best_validation_loss = 0.0;
};

struct TrainResult {
  MlpModel model;  // parameters from the best validation epoch
  TrainHistory history;
};

TrainResult train(MlpModel model, const Dataset& train_set, const Dataset& validation_set);

struct ChannelData {
  Dataset train;
  Dataset validation;
};

struct GridScore {
  std::vector<std::size_t> hidden_sizes;
  std::vector<double> channel_losses;  // best validation MAE per channel (scaled space)
  double total = 0.0;
};

struct GridSearchResult {
  MlpConfig best;
  std::vector<GridScore> scores;
};

// Each geometry is trained with the base config's seed on every channel;
// channels train concurrently. Throws EmptyGrid.
GridSearchResult grid_search(const std::vector<std::vector<std::size_t>>& geometries,
                             std::span<const ChannelData> channels, const MlpConfig& base);

std::string save_model(const MlpModel& model);
MlpModel load_model(const std::string& text);

}  // namespace tradenet
