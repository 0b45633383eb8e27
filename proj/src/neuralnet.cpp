#include "tradenet/neuralnet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include "tradenet/error.hpp"

namespace tradenet {

namespace {

constexpr const char* kMagic = "tradenet-mlp";
constexpr int kFormatVersion = 1;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t layer_count(const MlpConfig& c) { return c.hidden_sizes.size() + 1; }

std::vector<std::size_t> layer_dims(const MlpConfig& c) {
  std::vector<std::size_t> dims{c.input_size};
  dims.insert(dims.end(), c.hidden_sizes.begin(), c.hidden_sizes.end());
  dims.push_back(c.output_size);
  return dims;
}

}  // namespace

void validate_config(const MlpConfig& c) {
  auto bad = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (c.input_size < 1) bad("input_size must be >= 1");
  if (c.output_size != 1) bad("output_size must be 1");
  if (c.hidden_sizes.empty()) bad("at least one hidden layer is required");
  for (auto h : c.hidden_sizes)
    if (h < 1) bad("hidden layer sizes must be >= 1");
  if (!(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0)) bad("dropout_rate must be in [0, 1)");
  if (!(c.learning_rate > 0.0)) bad("learning_rate must be positive");
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0)) bad("adam_beta1 must be in [0, 1)");
  if (!(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) bad("adam_beta2 must be in [0, 1)");
  if (!(c.adam_epsilon > 0.0)) bad("adam_epsilon must be positive");
  if (c.batch_size < 1) bad("batch_size must be >= 1");
  if (c.max_epochs < 1) bad("max_epochs must be >= 1");
}

MinMaxScaler MinMaxScaler::fit(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyDataset, "cannot fit a scaler on no values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*hi > *lo)) throw Error(Errc::ZeroVariance, "constant channel cannot be min-max scaled");
  return {*lo, *hi};
}

MlpModel init_mlp(const MlpConfig& config) {
  validate_config(config);
  MlpModel model;
  model.config = config;
  model.rng.seed(config.seed);
  const auto dims = layer_dims(config);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(dims[l]);
    const auto fan_out = static_cast<Eigen::Index>(dims[l + 1]);
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < fan_in; ++i)
      for (Eigen::Index j = 0; j < fan_out; ++j) w(i, j) = scale * normal(model.rng);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    model.adam.m_weights.push_back(Eigen::MatrixXd::Zero(fan_in, fan_out));
    model.adam.v_weights.push_back(Eigen::MatrixXd::Zero(fan_in, fan_out));
    model.adam.m_biases.push_back(Eigen::VectorXd::Zero(fan_out));
    model.adam.v_biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

namespace {

void check_inputs(const MlpModel& model, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != model.config.input_size) {
    throw Error(Errc::ShapeMismatch, "expected " + std::to_string(model.config.input_size) +
                                         " inputs, got " + std::to_string(cols));
  }
}

// Batch forward pass; rows are samples. Returns the output column.
Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs,
                              std::mt19937_64* rng, ForwardCache* cache) {
  check_inputs(model, inputs.cols());
  const std::size_t layers = model.weights.size();
  const double rate = model.config.dropout_rate;
  const bool drop = rng != nullptr && rate > 0.0;
  Eigen::MatrixXd a = inputs;
  if (cache) *cache = {};
  for (std::size_t l = 0; l < layers; ++l) {
    if (cache) cache->activations.push_back(a);
    Eigen::MatrixXd z = a * model.weights[l];
    z.rowwise() += model.biases[l].transpose();
    if (l + 1 == layers) {
      if (cache) cache->pre_activations.push_back(z);
      return z.col(0);
    }
    a = z.cwiseMax(0.0);
    if (drop) {
      Eigen::MatrixXd mask(a.rows(), a.cols());
      const double keep_scale = 1.0 / (1.0 - rate);
      for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
          mask(i, j) = uniform01(*rng) < rate ? 0.0 : keep_scale;
      a = a.cwiseProduct(mask);
      if (cache) cache->masks.push_back(std::move(mask));
    }
    if (cache) cache->pre_activations.push_back(std::move(z));
  }
  return {};  // unreachable: at least one layer
}

}  // namespace

ForwardResult forward(MlpModel& model, std::span<const double> input, bool train_mode) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = input[i];
  ForwardResult out;
  out.output = forward_batch(model, row, train_mode ? &model.rng : nullptr, &out.cache)(0);
  return out;
}

double predict(const MlpModel& model, std::span<const double> input) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = input[i];
  return forward_batch(model, row, nullptr, nullptr)(0);
}

Eigen::VectorXd predict_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  return forward_batch(model, inputs, nullptr, nullptr);
}

double loss_mae(double predicted, double actual) { return std::fabs(actual - predicted); }

double batch_loss_mae(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw Error(Errc::LengthMismatch, "batch sizes differ");
  if (predicted.empty()) throw Error(Errc::EmptyDataset, "empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) s += loss_mae(predicted[i], actual[i]);
  return s / static_cast<double>(predicted.size());
}

double loss_and_gradients(MlpModel& model, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& targets, bool train_mode, Gradients& grads) {
  if (inputs.rows() == 0) throw Error(Errc::EmptyDataset, "empty batch");
  if (inputs.rows() != targets.size()) throw Error(Errc::ShapeMismatch, "inputs and targets differ in length");
  ForwardCache cache;
  const Eigen::VectorXd out = forward_batch(model, inputs, train_mode ? &model.rng : nullptr, &cache);
  const auto batch = static_cast<double>(inputs.rows());
  const Eigen::VectorXd err = out - targets;
  const double loss = err.cwiseAbs().sum() / batch;

  // dL/d(output): sign(error)/B with sign(0) = 0.
  Eigen::MatrixXd delta = err.unaryExpr([](double e) { return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0); }) / batch;

  const std::size_t layers = model.weights.size();
  grads.weights.assign(layers, {});
  grads.biases.assign(layers, {});
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = cache.activations[l].transpose() * delta;
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * model.weights[l].transpose();
    if (!cache.masks.empty()) back = back.cwiseProduct(cache.masks[l - 1]);
    const Eigen::MatrixXd& z = cache.pre_activations[l - 1];
    delta = back.cwiseProduct(z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  }
  return loss;
}

double train_step(MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
  Gradients g;
  const double loss = loss_and_gradients(model, inputs, targets, true, g);
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    if (!g.weights[l].allFinite() || !g.biases[l].allFinite() || !std::isfinite(loss)) {
      throw Error(Errc::NonFiniteGradient, "non-finite gradient in layer " + std::to_string(l));
    }
  }
  const auto& c = model.config;
  auto& s = model.adam;
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double corr1 = 1.0 - std::pow(c.adam_beta1, t);
  const double corr2 = 1.0 - std::pow(c.adam_beta2, t);
  auto flush_tiny = [](double x) { return std::fabs(x) < 1e-30 ? 0.0 : x; };
  auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    // Moments of dead units decay geometrically; flushing them to zero keeps
    // the arithmetic out of the (very slow) subnormal range.
    m = (c.adam_beta1 * m + (1.0 - c.adam_beta1) * grad).unaryExpr(flush_tiny);
    v = (c.adam_beta2 * v + (1.0 - c.adam_beta2) * grad.cwiseProduct(grad)).unaryExpr(flush_tiny);
    param.array() -= c.learning_rate * (m.array() / corr1) / ((v.array() / corr2).sqrt() + c.adam_epsilon);
  };
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    update(model.weights[l], s.m_weights[l], s.v_weights[l], g.weights[l]);
    update(model.biases[l], s.m_biases[l], s.v_biases[l], g.biases[l]);
  }
  return loss;
}

TrainResult train(MlpModel model, const Dataset& train_set, const Dataset& validation_set) {
  if (train_set.size() == 0 || validation_set.size() == 0) {
    throw Error(Errc::EmptyDataset, "training and validation sets must be non-empty");
  }
  check_inputs(model, train_set.inputs.cols());
  check_inputs(model, validation_set.inputs.cols());

  const auto& c = model.config;
  const std::size_t n = train_set.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;
  auto& h = result.history;
  h.best_validation_loss = std::numeric_limits<double>::infinity();
  result.model = model;

  for (std::size_t epoch = 1; epoch <= c.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), model.rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += c.batch_size) {
      const std::size_t len = std::min(c.batch_size, n - start);
      Eigen::MatrixXd xb(static_cast<Eigen::Index>(len), train_set.inputs.cols());
      Eigen::VectorXd yb(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        const auto row = order[start + i];
        xb.row(static_cast<Eigen::Index>(i)) = train_set.inputs.row(row);
        yb(static_cast<Eigen::Index>(i)) = train_set.targets(row);
      }
      total += train_step(model, xb, yb) * static_cast<double>(len);
    }
    const double val =
        (predict_batch(model, validation_set.inputs) - validation_set.targets).cwiseAbs().mean();
    h.train_losses.push_back(total / static_cast<double>(n));
    h.validation_losses.push_back(val);
    h.stopped_epoch = epoch;
    if (val < h.best_validation_loss) {
      h.best_validation_loss = val;
      h.best_epoch = epoch;
      result.model = model;
    } else if (epoch - h.best_epoch > c.patience) {
      break;
    }
  }
  return result;
}

GridSearchResult grid_search(const std::vector<std::vector<std::size_t>>& geometries,
                             std::span<const ChannelData> channels, const MlpConfig& base) {
  if (geometries.empty()) throw Error(Errc::EmptyGrid, "no candidate geometries");
  if (channels.empty()) throw Error(Errc::EmptyDataset, "no channel datasets");
  GridSearchResult out;
  double best_total = std::numeric_limits<double>::infinity();
  for (const auto& hidden : geometries) {
    MlpConfig cfg = base;
    cfg.hidden_sizes = hidden;
    validate_config(cfg);
    std::vector<std::future<double>> jobs;
    for (const auto& ch : channels) {
      jobs.push_back(std::async(std::launch::async, [&cfg, &ch] {
        return train(init_mlp(cfg), ch.train, ch.validation).history.best_validation_loss;
      }));
    }
    GridScore score;
    score.hidden_sizes = hidden;
    for (auto& j : jobs) score.channel_losses.push_back(j.get());
    score.total = std::accumulate(score.channel_losses.begin(), score.channel_losses.end(), 0.0);
    if (score.total < best_total) {
      best_total = score.total;
      out.best = cfg;
    }
    out.scores.push_back(std::move(score));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text model format:
//   tradenet-mlp
//   version 1
//   <config key/value lines>
//   scaler <min> <max>
//   layers <L>
//   layer <i> <fan_in> <fan_out>, then W (row-major), b, Adam m_W v_W m_b v_b
//   adam_step <t>
//   end
// Numbers use shortest round-trip decimal form.

namespace {

void put(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void put_matrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      put(out, m(i, j));
    }
    out += '\n';
  }
}

void put_vector(std::string& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    put(out, v(i));
  }
  out += '\n';
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) corrupt("unexpected end of model data");
    return w;
  }

  void expect(const std::string& w) {
    if (word() != w) corrupt("expected '" + w + "'");
  }

  double number() {
    const std::string w = word();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) corrupt("bad number '" + w + "'");
    return v;
  }

  std::uint64_t count() {
    const std::string w = word();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) corrupt("bad integer '" + w + "'");
    return v;
  }

  double keyed(const std::string& key) {
    expect(key);
    return number();
  }

  std::uint64_t keyed_count(const std::string& key) {
    expect(key);
    return count();
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number();
    return m;
  }

  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = number();
    return v;
  }

  [[noreturn]] static void corrupt(const std::string& why) { throw Error(Errc::CorruptPayload, why); }

 private:
  std::istringstream in_;
};

}  // namespace

std::string save_model(const MlpModel& model) {
  const auto& c = model.config;
  std::string out;
  out += std::string(kMagic) + "\nversion " + std::to_string(kFormatVersion) + "\n";
  out += "input_size " + std::to_string(c.input_size) + "\n";
  out += "hidden_sizes " + std::to_string(c.hidden_sizes.size());
  for (auto hsz : c.hidden_sizes) out += " " + std::to_string(hsz);
  out += "\noutput_size " + std::to_string(c.output_size) + "\n";
  out += "activation relu\nloss mae\n";
  auto kv = [&out](const char* key, double v) {
    out += key;
    out += ' ';
    put(out, v);
    out += '\n';
  };
  kv("dropout_rate", c.dropout_rate);
  kv("learning_rate", c.learning_rate);
  kv("adam_beta1", c.adam_beta1);
  kv("adam_beta2", c.adam_beta2);
  kv("adam_epsilon", c.adam_epsilon);
  out += "batch_size " + std::to_string(c.batch_size) + "\n";
  out += "max_epochs " + std::to_string(c.max_epochs) + "\n";
  out += "patience " + std::to_string(c.patience) + "\n";
  out += "seed " + std::to_string(c.seed) + "\n";
  out += "scaler ";
  put(out, model.scaler.min);
  out += ' ';
  put(out, model.scaler.max);
  out += "\nlayers " + std::to_string(model.weights.size()) + "\n";
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    out += "layer " + std::to_string(l) + " " + std::to_string(model.weights[l].rows()) + " " +
           std::to_string(model.weights[l].cols()) + "\n";
    put_matrix(out, model.weights[l]);
    put_vector(out, model.biases[l]);
    put_matrix(out, model.adam.m_weights[l]);
    put_matrix(out, model.adam.v_weights[l]);
    put_vector(out, model.adam.m_biases[l]);
    put_vector(out, model.adam.v_biases[l]);
  }
  out += "adam_step " + std::to_string(model.adam.step) + "\nend\n";
  return out;
}

MlpModel load_model(const std::string& text) {
  Reader r(text);
  if (r.word() != kMagic) Reader::corrupt("missing model header");
  const auto version = r.keyed_count("version");
  if (version != kFormatVersion) {
    throw Error(Errc::UnsupportedVersion, "model format version " + std::to_string(version) +
                                              " (supported: " + std::to_string(kFormatVersion) + ")");
  }
  MlpConfig c;
  c.input_size = r.keyed_count("input_size");
  const auto n_hidden = r.keyed_count("hidden_sizes");
  if (n_hidden > 64) Reader::corrupt("implausible hidden layer count");
  c.hidden_sizes.clear();
  for (std::uint64_t i = 0; i < n_hidden; ++i) c.hidden_sizes.push_back(r.count());
  c.output_size = r.keyed_count("output_size");
  r.expect("activation");
  if (r.word() != "relu") Reader::corrupt("unknown activation");
  r.expect("loss");
  if (r.word() != "mae") Reader::corrupt("unknown loss");
  c.dropout_rate = r.keyed("dropout_rate");
  c.learning_rate = r.keyed("learning_rate");
  c.adam_beta1 = r.keyed("adam_beta1");
  c.adam_beta2 = r.keyed("adam_beta2");
  c.adam_epsilon = r.keyed("adam_epsilon");
  c.batch_size = r.keyed_count("batch_size");
  c.max_epochs = r.keyed_count("max_epochs");
  c.patience = r.keyed_count("patience");
  c.seed = r.keyed_count("seed");
  try {
    validate_config(c);
  } catch (const Error& e) {
    Reader::corrupt(std::string("invalid config: ") + e.what());
  }

  MlpModel m;
  m.config = c;
  m.rng.seed(c.seed);
  r.expect("scaler");
  m.scaler.min = r.number();
  m.scaler.max = r.number();
  const auto dims = layer_dims(c);
  if (r.keyed_count("layers") != layer_count(c)) Reader::corrupt("layer count disagrees with config");
  for (std::size_t l = 0; l < layer_count(c); ++l) {
    if (r.keyed_count("layer") != l) Reader::corrupt("layers out of order");
    const auto rows = static_cast<Eigen::Index>(r.count());
    const auto cols = static_cast<Eigen::Index>(r.count());
    if (rows != static_cast<Eigen::Index>(dims[l]) || cols != static_cast<Eigen::Index>(dims[l + 1])) {
      Reader::corrupt("layer " + std::to_string(l) + " shape disagrees with config");
    }
    m.weights.push_back(r.matrix(rows, cols));
    m.biases.push_back(r.vector(cols));
    m.adam.m_weights.push_back(r.matrix(rows, cols));
    m.adam.v_weights.push_back(r.matrix(rows, cols));
    m.adam.m_biases.push_back(r.vector(cols));
    m.adam.v_biases.push_back(r.vector(cols));
  }
  m.adam.step = r.keyed_count("adam_step");
  r.expect("end");
  return m;
}

}  // namespace tradenet
