// tradenet command-line front end: one subcommand per pipeline stage.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <optional>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tradenet/arima.hpp"
#include "tradenet/backtest.hpp"
#include "tradenet/chart.hpp"
#include "tradenet/error.hpp"
#include "tradenet/forecasting.hpp"
#include "tradenet/market_data.hpp"
#include "tradenet/neuralnet.hpp"
#include "tradenet/strategy.hpp"
#include "tradenet/ts_analysis.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tradenet;

namespace {

std::string detail_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct RunConfig {
  std::string input;
  std::string symbol;
  std::string out = "out";
  std::size_t validation_len = 30;
  std::size_t window = 5;
  std::size_t horizon = 30;
  std::size_t tema_period = 3;
  double budget = 100.0;
  std::uint64_t seed = 42;
  std::string sizing = "one_share";
  std::string mode = "teacher";
  std::string models;
  std::string trades_file;
  std::string forecast_file;
  std::vector<std::size_t> hidden{150, 150};
  std::size_t epochs = 500;
  std::size_t patience = 50;
  double dropout = 0.2;
  double commission_pct = 0.0;
  double slippage_pct = 0.0;
  std::size_t max_lag = 40;
  std::size_t vol_window = 21;
  bool skip_malformed = false;
};

json config_json(const RunConfig& c) {
  return json{{"input", c.input},
              {"symbol", c.symbol},
              {"validation_len", c.validation_len},
              {"window", c.window},
              {"horizon", c.horizon},
              {"tema_period", c.tema_period},
              {"budget", c.budget},
              {"seed", c.seed},
              {"sizing", c.sizing},
              {"mode", c.mode},
              {"models", c.models},
              {"trades_file", c.trades_file},
              {"forecast_file", c.forecast_file},
              {"hidden", c.hidden},
              {"epochs", c.epochs},
              {"patience", c.patience},
              {"dropout", c.dropout},
              {"commission_pct", c.commission_pct},
              {"slippage_pct", c.slippage_pct},
              {"max_lag", c.max_lag},
              {"vol_window", c.vol_window}};
}

// Writes artifacts into the output directory and remembers their names.
class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    const fs::path target = dir_ / name;
    fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw Error(Errc::IoError, "cannot write " + tmp.string());
      f << content;
      if (!f) throw Error(Errc::IoError, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string symbol_for(const RunConfig& c) {
  return c.symbol.empty() ? fs::path(c.input).stem().string() : c.symbol;
}

OhlcSeries load_series(const RunConfig& c, CsvDiagnostics* diag = nullptr) {
  if (c.input.empty()) throw Error(Errc::InvalidArgument, "--input is required");
  CsvOptions opt;
  opt.skip_malformed = c.skip_malformed;
  return read_ohlc_csv(c.input, symbol_for(c), opt, diag);
}

void check_config(const RunConfig& c) {
  if (c.validation_len < 1 || c.window < 1 || c.horizon < 1 || c.tema_period < 1)
    throw Error(Errc::InvalidArgument, "counts must be >= 1");
  if (!(c.budget > 0.0)) throw Error(Errc::NegativeBudget, "budget must be positive");
  if (!parse_sizing(c.sizing)) throw Error(Errc::InvalidArgument, "--sizing must be one_share or compounded");
  if (c.mode != "teacher" && c.mode != "recursive")
    throw Error(Errc::InvalidArgument, "--mode must be teacher or recursive");
}

MlpConfig mlp_config(const RunConfig& c) {
  MlpConfig m;
  m.input_size = c.window;
  m.hidden_sizes = c.hidden;
  m.max_epochs = c.epochs;
  m.patience = c.patience;
  m.dropout_rate = c.dropout;
  m.seed = c.seed;
  return m;
}

json error_json(const ErrorReport& r) {
  return json{{"mse", r.mse}, {"rmse", r.rmse}, {"mae", r.mae}, {"mape", r.mape}, {"evs", r.evs}};
}

json ratio_json(const RatioValue& r) {
  if (r.defined()) return r.value;
  return json{{"undefined", r.undefined_reason}};
}

json report_json(const BacktestReport& r) {
  json trades = json::array();
  for (const auto& t : r.trades) {
    trades.push_back({{"entry_date", to_iso(t.entry_date)},
                      {"entry_price", t.entry_price},
                      {"exit_date", to_iso(t.exit_date)},
                      {"exit_price", t.exit_price},
                      {"quantity", t.quantity},
                      {"profit", t.profit},
                      {"return_pct", t.return_pct}});
  }
  return json{{"trades", trades},
              {"total_profit", r.total_profit},
              {"total_return_pct", r.total_return_pct},
              {"win_rate", r.win_rate},
              {"expectancy", r.expectancy},
              {"mean_win", r.mean_win},
              {"mean_loss", r.mean_loss},
              {"sharpe", ratio_json(r.sharpe)},
              {"sortino", ratio_json(r.sortino)},
              {"calmar", ratio_json(r.calmar)},
              {"max_drawdown", r.max_drawdown},
              {"best_trade_pct", r.best_trade_pct},
              {"worst_trade_pct", r.worst_trade_pct},
              {"avg_trade_pct", r.avg_trade_pct},
              {"buy_hold_return_pct", r.buy_hold_return_pct}};
}

void write_manifest(Output& out, const std::string& command, const RunConfig& c, json results) {
  json m{{"command", command}, {"config", config_json(c)}, {"results", std::move(results)}};
  auto artifacts = out.written();
  artifacts.push_back("manifest.json");
  std::sort(artifacts.begin(), artifacts.end());
  m["artifacts"] = artifacts;
  out.write("manifest.json", m.dump(2) + "\n");
}

std::string model_file(Channel c) { return std::string(channel_name(c)) + ".mlp"; }

std::array<MlpModel, 4> load_models(const std::string& dir) {
  std::array<MlpModel, 4> models;
  for (Channel c : kAllChannels)
    models[static_cast<std::size_t>(c)] = load_model(read_file((fs::path(dir) / model_file(c)).string()));
  return models;
}

std::string history_csv(const TrainHistory& h) {
  std::string s = "epoch,train_loss,validation_loss\n";
  for (std::size_t e = 0; e < h.train_losses.size(); ++e) {
    s += std::to_string(e + 1) + "," + detail_number(h.train_losses[e]) + "," +
         detail_number(h.validation_losses[e]) + "\n";
  }
  return s;
}

// ---- charts ----

std::string forecast_chart(const ForecastSet& f, const OhlcSeries& actual, Channel c) {
  ChartSpec spec;
  spec.title = std::string("Forecast vs actual: ") + std::string(channel_name(c));
  spec.dates = f.dates;
  auto y = actual.channel(c);
  y.resize(std::min(y.size(), f.size()));
  if (!y.empty()) spec.series.push_back({"actual", y, "#1f77b4"});
  spec.series.push_back({"predicted", f.channel(c), "#ff7f0e"});
  return emit_svg_chart(spec);
}

std::string equity_chart(const EquityCurve& e) {
  ChartSpec spec;
  spec.title = "Equity curve";
  spec.dates = e.dates;
  spec.series.push_back({"equity", e.equity, "#2ca02c"});
  return emit_svg_chart(spec);
}

std::string trades_chart(const OhlcSeries& s, const std::vector<TradeRecord>& trades) {
  ChartSpec spec;
  spec.title = "Trades on close";
  spec.dates = s.dates();
  spec.series.push_back({"close", s.channel(Channel::Close), "#1f77b4"});
  for (const auto& t : trades) {
    const auto a = *s.index_of(t.entry_date), b = *s.index_of(t.exit_date);
    spec.markers.push_back({a, s[a].close, true});
    spec.markers.push_back({b, s[b].close, false});
  }
  return emit_svg_chart(spec);
}

// ---- commands ----

void cmd_ingest(const RunConfig& c) {
  CsvDiagnostics diag;
  const auto s = load_series(c, &diag);
  Output out(c.out);
  out.write("bars.csv", serialize_ohlc_csv(s));
  std::string txt = "symbol=" + s.symbol() + "\nbars=" + std::to_string(s.size()) + "\n";
  if (!s.empty()) txt += "first_date=" + to_iso(s.front().date) + "\nlast_date=" + to_iso(s.back().date) + "\n";
  txt += "flat_bars=" + std::to_string(diag.flat_bars.size()) + "\n";
  txt += "skipped_lines=" + std::to_string(diag.skipped_lines.size()) + "\n";
  out.write("ingest.txt", txt);
  write_manifest(out, "ingest", c,
                 {{"bars", s.size()}, {"flat_bars", diag.flat_bars.size()}, {"skipped_lines", diag.skipped_lines}});
}

void cmd_analyze(const RunConfig& c) {
  const auto s = load_series(c);
  const auto close = s.channel(Channel::Close);
  Output out(c.out);
  const auto adf = adf_test(close);
  std::string txt;
  txt += "test_statistic=" + detail_number(adf.test_statistic) + "\n";
  txt += "p_value=" + detail_number(adf.p_value) + "\n";
  txt += "lags_used=" + std::to_string(adf.lags_used) + "\n";
  txt += "n_observations=" + std::to_string(adf.n_observations) + "\n";
  txt += "critical_1pct=" + detail_number(adf.critical_values.one_pct) + "\n";
  txt += "critical_5pct=" + detail_number(adf.critical_values.five_pct) + "\n";
  txt += "critical_10pct=" + detail_number(adf.critical_values.ten_pct) + "\n";
  out.write("adf.txt", txt);
  const std::size_t lag = std::min(c.max_lag, close.size() - 1);
  out.write("acf.csv", correlogram_csv(acf(close, lag)));
  out.write("pacf.csv", correlogram_csv(pacf(close, lag)));
  const auto r = simple_returns(s, Channel::Close);
  out.write("kde.csv", kde_csv(kde_density(r.values)));
  const auto z = standardize_returns(r);
  std::string rc = "date,return,standardized\n";
  for (std::size_t i = 0; i < r.values.size(); ++i)
    rc += to_iso(s[i + 1].date) + "," + detail_number(r.values[i]) + "," + detail_number(z.values[i]) + "\n";
  out.write("returns.csv", rc);
  const auto vol = rolling_volatility(r, c.vol_window);
  std::string vc = "date,volatility\n";
  for (std::size_t i = 0; i < vol.size(); ++i)
    vc += to_iso(s[i + c.vol_window].date) + "," + detail_number(vol[i]) + "\n";
  out.write("volatility.csv", vc);
  write_manifest(out, "analyze", c,
                 {{"adf",
                   {{"test_statistic", adf.test_statistic},
                    {"p_value", adf.p_value},
                    {"lags_used", adf.lags_used},
                    {"critical_values",
                     {adf.critical_values.one_pct, adf.critical_values.five_pct, adf.critical_values.ten_pct}}}}});
}

void cmd_arima(const RunConfig& c) {
  const auto s = load_series(c);
  const auto split = split_series(s, c.validation_len);
  const auto train = split.train.channel(Channel::Close);
  Output out(c.out);
  const auto search = auto_arima_search(train);
  std::string trace = "order,aic,converged\n";
  for (const auto& step : search.trace)
    trace += "\"" + to_string(step.order) + "\"," + detail_number(step.aic) + "," + (step.converged ? "1" : "0") + "\n";
  out.write("arima_trace.csv", trace);
  out.write("arima_summary.txt", arima_summary(search.best));
  const std::size_t h = std::min(c.horizon, split.validation.size());
  const auto fc = forecast(search.best, h);
  std::string fcsv = "date,close\n";
  for (std::size_t i = 0; i < h; ++i) fcsv += to_iso(split.validation[i].date) + "," + detail_number(fc.mean_path[i]) + "\n";
  out.write("arima_forecast.csv", fcsv);
  auto actual = split.validation.channel(Channel::Close);
  actual.resize(h);
  const auto err = compute_error_metrics(actual, fc.mean_path);
  std::string etxt = "mse=" + detail_number(err.mse) + "\nrmse=" + detail_number(err.rmse) +
                     "\nmae=" + detail_number(err.mae) + "\nmape=" + detail_number(err.mape) +
                     "\nevs=" + detail_number(err.evs) + "\n";
  out.write("arima_errors.txt", etxt);
  ChartSpec spec;
  spec.title = "ARIMA " + to_string(search.best.order) + " forecast vs actual close";
  spec.dates = split.validation.dates();
  spec.dates.resize(h);
  spec.series.push_back({"actual", actual, "#1f77b4"});
  spec.series.push_back({"arima", fc.mean_path, "#ff7f0e"});
  out.write("arima_forecast.svg", emit_svg_chart(spec));
  write_manifest(out, "arima", c,
                 {{"order", to_string(search.best.order)},
                  {"d", search.d},
                  {"aic", search.best.aic},
                  {"errors", error_json(err)}});
}

std::array<MlpModel, 4> train_and_save(const RunConfig& c, const OhlcSeries& train, Output& out, json& results) {
  auto trained = train_channel_models(train, mlp_config(c));
  std::array<MlpModel, 4> models;
  json hist = json::object();
  for (auto& cm : trained) {
    const auto name = std::string(channel_name(cm.channel));
    out.write("models/" + model_file(cm.channel), save_model(cm.model));
    out.write("train_history_" + name + ".csv", history_csv(cm.history));
    hist[name] = {{"best_epoch", cm.history.best_epoch},
                  {"stopped_epoch", cm.history.stopped_epoch},
                  {"best_validation_loss", cm.history.best_validation_loss}};
    models[static_cast<std::size_t>(cm.channel)] = std::move(cm.model);
  }
  results["training"] = hist;
  return models;
}

void cmd_train(const RunConfig& c) {
  const auto s = load_series(c);
  const auto split = split_series(s, c.validation_len);
  Output out(c.out);
  json results = json::object();
  train_and_save(c, split.train, out, results);
  write_manifest(out, "train", c, results);
}

ForecastSet run_forecast(const RunConfig& c, const std::array<MlpModel, 4>& models, const SeriesSplit& split) {
  std::vector<MlpPredictor> preds;
  for (const auto& m : models) preds.emplace_back(m);
  std::array<const OneStepPredictor*, 4> ptrs{&preds[0], &preds[1], &preds[2], &preds[3]};
  return walk_forward_forecast(ptrs, split.train, split.validation, c.horizon,
                               c.mode == "teacher" ? ForecastMode::TeacherForced : ForecastMode::Recursive);
}

json write_forecast(Output& out, const ForecastSet& f, const OhlcSeries& validation) {
  out.write("forecast.csv", forecast_csv(f));
  for (Channel ch : kAllChannels)
    out.write("forecast_" + std::string(channel_name(ch)) + ".svg", forecast_chart(f, validation, ch));
  json j = json::object();
  if (f.size() < 2) {
    j["skipped"] = "error metrics need at least 2 forecast bars";
  } else if (validation.size() >= f.size()) {
    const auto errs = evaluate_forecast(f, validation);
    out.write("errors.csv", error_report_csv(errs));
    for (Channel ch : kAllChannels) j[std::string(channel_name(ch))] = error_json(errs[static_cast<std::size_t>(ch)]);
  }
  return j;
}

void cmd_forecast(const RunConfig& c) {
  if (c.models.empty()) throw Error(Errc::InvalidArgument, "--models is required for forecast");
  const auto s = load_series(c);
  const auto split = split_series(s, c.validation_len);
  const auto models = load_models(c.models);
  Output out(c.out);
  const auto f = run_forecast(c, models, split);
  json results{{"errors", write_forecast(out, f, split.validation)}};
  write_manifest(out, "forecast", c, results);
}

BacktestConfig backtest_config(const RunConfig& c) {
  BacktestConfig b;
  b.budget = c.budget;
  b.sizing = *parse_sizing(c.sizing);
  b.commission_pct = c.commission_pct;
  b.slippage_pct = c.slippage_pct;
  return b;
}

json run_backtest(const RunConfig& c, Output& out, const OhlcSeries& train, const OhlcSeries& validation,
                  const ForecastSet* forecast) {
  std::vector<TradeIntent> intents;
  json j = json::object();
  if (!c.trades_file.empty()) {
    intents = parse_trade_intents(read_file(c.trades_file));
    j["trade_source"] = "trades_file";
  } else if (forecast) {
    StrategyRuleSet rules;
    rules.tema_period = c.tema_period;
    j["trade_source"] = "forecast_signals";
    if (forecast->size() < 3 * (rules.tema_period - 1)) {
      // Too short for the TEMA warm-up: no signals, hence no trades.
      j["signals_skipped"] = "forecast shorter than the TEMA warm-up";
    } else {
      const auto ev = evaluate_rules_detailed(*forecast, rules, train);
      out.write("signals.csv", signals_csv(ev.signals));
      out.write("indicators.csv", indicator_csv(ev));
      intents = signals_to_trades(ev.signals);
    }
  } else {
    throw Error(Errc::InvalidArgument, "backtest needs --trades-file or --forecast");
  }
  const auto rep = apply_trades(validation, intents, backtest_config(c));
  out.write("backtest_report.txt", backtest_report_text(rep));
  out.write("trades.csv", trades_csv(rep.trades));
  out.write("equity.csv", equity_csv(rep.equity));
  out.write("equity.svg", equity_chart(rep.equity));
  out.write("trades.svg", trades_chart(validation, rep.trades));
  j["backtest"] = report_json(rep);
  return j;
}

void cmd_backtest(const RunConfig& c) {
  const auto s = load_series(c);
  const auto split = split_series(s, c.validation_len);
  Output out(c.out);
  std::optional<ForecastSet> f;
  if (c.trades_file.empty() && !c.forecast_file.empty()) f = parse_forecast_csv(read_file(c.forecast_file));
  auto results = run_backtest(c, out, split.train, split.validation, f ? &*f : nullptr);
  write_manifest(out, "backtest", c, results);
}

void cmd_pipeline(const RunConfig& c) {
  const auto s = load_series(c);
  const auto split = split_series(s, c.validation_len);
  Output out(c.out);
  try {
    json results = json::object();
    std::array<MlpModel, 4> models;
    if (!c.models.empty()) {
      models = load_models(c.models);
      results["models"] = "loaded";
    } else if (c.trades_file.empty()) {
      models = train_and_save(c, split.train, out, results);
    }
    std::optional<ForecastSet> f;
    if (c.trades_file.empty() || !c.models.empty()) {
      f = run_forecast(c, models, split);
      results["errors"] = write_forecast(out, *f, split.validation);
    }
    auto bt = run_backtest(c, out, split.train, split.validation, f ? &*f : nullptr);
    results.update(bt);
    write_manifest(out, "pipeline", c, results);
  } catch (const std::exception& e) {
    std::string marker = std::string("error=") + e.what() + "\n";
    for (const auto& w : out.written()) marker += "written=" + w + "\n";
    out.write("INCOMPLETE", marker);
    throw;
  }
}

// ---- options ----

void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& sub) {
  const auto j = json::parse(read_file(path));
  // Keys are the manifest's config names; an explicitly passed flag wins.
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (!j.contains(key)) return;
    bool given = false;
    try {
      given = sub.get_option(std::string("--") + flag)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
    }
    if (!given) j.at(key).get_to(field);
  };
  take("input", "input", c.input);
  take("symbol", "symbol", c.symbol);
  take("out", "out", c.out);
  take("validation_len", "validation", c.validation_len);
  take("window", "window", c.window);
  take("horizon", "horizon", c.horizon);
  take("tema_period", "tema-period", c.tema_period);
  take("budget", "budget", c.budget);
  take("seed", "seed", c.seed);
  take("sizing", "sizing", c.sizing);
  take("mode", "mode", c.mode);
  take("models", "models", c.models);
  take("trades_file", "trades-file", c.trades_file);
  take("forecast_file", "forecast", c.forecast_file);
  take("hidden", "hidden", c.hidden);
  take("epochs", "epochs", c.epochs);
  take("patience", "patience", c.patience);
  take("dropout", "dropout", c.dropout);
  take("commission_pct", "commission", c.commission_pct);
  take("slippage_pct", "slippage", c.slippage_pct);
  take("max_lag", "max-lag", c.max_lag);
  take("vol_window", "vol-window", c.vol_window);
}

void add_common(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--input", c.input, "OHLC CSV file");
  sub->add_option("--symbol", c.symbol, "Symbol name (default: input file stem)");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--config", config_path, "JSON config file (flags override it; env TRADENET_CONFIG)");
  sub->add_option("--validation", c.validation_len, "Validation bars at the end of the series");
  sub->add_flag("--skip-malformed", c.skip_malformed, "Skip malformed CSV rows instead of failing");
}

void add_model_opts(CLI::App* sub, RunConfig& c) {
  sub->add_option("--window", c.window, "Lag window");
  sub->add_option("--seed", c.seed, "Base seed (channel k uses seed + k)");
  sub->add_option("--hidden", c.hidden, "Hidden layer sizes")->delimiter(',');
  sub->add_option("--epochs", c.epochs, "Maximum training epochs");
  sub->add_option("--patience", c.patience, "Early-stopping patience");
  sub->add_option("--dropout", c.dropout, "Dropout rate");
}

void add_forecast_opts(CLI::App* sub, RunConfig& c) {
  sub->add_option("--horizon", c.horizon, "Forecast horizon in trading days");
  sub->add_option("--mode", c.mode, "teacher or recursive")->check(CLI::IsMember({"teacher", "recursive"}));
  sub->add_option("--models", c.models, "Directory with saved channel models");
}

void add_backtest_opts(CLI::App* sub, RunConfig& c) {
  sub->add_option("--budget", c.budget, "Starting budget");
  sub->add_option("--sizing", c.sizing, "one_share or compounded")->check(CLI::IsMember({"one_share", "compounded"}));
  sub->add_option("--commission", c.commission_pct, "Commission percent per side");
  sub->add_option("--slippage", c.slippage_pct, "Slippage percent per side");
  sub->add_option("--tema-period", c.tema_period, "TEMA period");
  sub->add_option("--trades-file", c.trades_file, "CSV of entry_date,exit_date to backtest");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tradenet: forecasting and backtesting toolkit"};
  app.require_subcommand(1);
  RunConfig c;
  std::string config_path;

  auto* ingest = app.add_subcommand("ingest", "Parse and validate an OHLC CSV");
  add_common(ingest, c, config_path);
  auto* analyze = app.add_subcommand("analyze", "ADF, ACF/PACF, KDE, returns and volatility");
  add_common(analyze, c, config_path);
  analyze->add_option("--max-lag", c.max_lag, "Correlogram lags");
  analyze->add_option("--vol-window", c.vol_window, "Rolling volatility window");
  auto* arima = app.add_subcommand("arima", "Stepwise ARIMA baseline on the close");
  add_common(arima, c, config_path);
  arima->add_option("--horizon", c.horizon, "Forecast horizon");
  auto* train = app.add_subcommand("train", "Train the four channel models");
  add_common(train, c, config_path);
  add_model_opts(train, c);
  auto* fcast = app.add_subcommand("forecast", "Walk-forward forecast with saved models");
  add_common(fcast, c, config_path);
  add_forecast_opts(fcast, c);
  auto* backtest = app.add_subcommand("backtest", "Backtest trades or forecast signals on the validation slice");
  add_common(backtest, c, config_path);
  add_backtest_opts(backtest, c);
  backtest->add_option("--forecast", c.forecast_file, "Forecast CSV to derive TEMA signals from");
  auto* pipeline = app.add_subcommand("pipeline", "Train, forecast, signal and backtest in one run");
  add_common(pipeline, c, config_path);
  add_model_opts(pipeline, c);
  add_forecast_opts(pipeline, c);
  add_backtest_opts(pipeline, c);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (config_path.empty())
      if (const char* env = std::getenv("TRADENET_CONFIG")) config_path = env;
    if (!config_path.empty()) apply_config_file(config_path, c, *sub);
    check_config(c);
    const std::string name = sub->get_name();
    if (name == "ingest") cmd_ingest(c);
    else if (name == "analyze") cmd_analyze(c);
    else if (name == "arima") cmd_arima(c);
    else if (name == "train") cmd_train(c);
    else if (name == "forecast") cmd_forecast(c);
    else if (name == "backtest") cmd_backtest(c);
    else if (name == "pipeline") cmd_pipeline(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
