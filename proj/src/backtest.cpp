#include "tradenet/backtest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "text.hpp"
#include "tradenet/error.hpp"

namespace tradenet {

std::string_view sizing_name(Sizing sizing) noexcept {
  return sizing == Sizing::Compounded ? "compounded" : "one_share";
}

std::optional<Sizing> parse_sizing(std::string_view name) {
  if (name == "one_share") return Sizing::OneShare;
  if (name == "compounded") return Sizing::Compounded;
  return std::nullopt;
}

double RatioValue::require(std::string_view which) const {
  if (!defined()) throw Error(Errc::UndefinedRatio, std::string(which) + ": " + undefined_reason);
  return value;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RatioValue undefined(std::string reason) { return {kNaN, std::move(reason)}; }

std::size_t index_or_throw(const OhlcSeries& series, const Date& d) {
  auto i = series.index_of(d);
  if (!i) throw Error(Errc::UnknownDate, to_iso(d) + " is not a bar in " + series.symbol());
  return *i;
}

}  // namespace

double max_drawdown(std::span<const double> equity) {
  if (equity.empty()) throw Error(Errc::EmptySeries, "equity curve is empty");
  double peak = equity[0], mdd = 0.0;
  for (double v : equity) {
    peak = std::max(peak, v);
    if (peak > 0.0) mdd = std::max(mdd, (peak - v) / peak);
  }
  return mdd;
}

RiskRatios risk_ratios(std::span<const double> equity, std::size_t periods_per_year) {
  if (equity.size() < 3) throw Error(Errc::SeriesTooShort, "risk ratios need at least 3 equity points");
  if (periods_per_year < 1) throw Error(Errc::InvalidArgument, "periods_per_year must be >= 1");
  for (double v : equity)
    if (!(v > 0.0)) throw Error(Errc::NumericalInstability, "equity must stay positive for returns");

  std::vector<double> r(equity.size() - 1);
  for (std::size_t i = 1; i < equity.size(); ++i) r[i - 1] = equity[i] / equity[i - 1] - 1.0;
  const auto n = static_cast<double>(r.size());
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
  double ss = 0.0, downside = 0.0;
  bool any_negative = false;
  for (double x : r) {
    ss += (x - mean) * (x - mean);
    if (x < 0.0) {
      downside += x * x;
      any_negative = true;
    }
  }
  const double std_dev = std::sqrt(ss / (n - 1.0));
  const double down_dev = std::sqrt(downside / n);
  const double annual = std::sqrt(static_cast<double>(periods_per_year));

  RiskRatios out;
  // Equal returns still leave rounding-level spread; treat it as zero.
  const bool flat = std_dev <= 1e-12 * std::fabs(mean);
  out.sharpe = !flat ? RatioValue{mean / std_dev * annual, {}} : undefined("zero return deviation");
  out.sortino = any_negative ? RatioValue{mean / down_dev * annual, {}} : undefined("no negative returns");
  const double mdd = max_drawdown(equity);
  if (mdd > 0.0) {
    const double growth = equity.back() / equity.front();
    const double cagr = std::pow(growth, static_cast<double>(periods_per_year) / n) - 1.0;
    out.calmar = {cagr / mdd, {}};
  } else {
    out.calmar = undefined("zero drawdown");
  }
  return out;
}

Expectancy expectancy_ratio(std::span<const TradeRecord> trades) {
  if (trades.empty()) throw Error(Errc::NoTrades, "expectancy needs at least one trade");
  double win_sum = 0.0, loss_sum = 0.0;
  std::size_t wins = 0;
  for (const auto& t : trades) {
    if (t.return_pct > 0.0) {
      win_sum += t.return_pct;
      ++wins;
    } else {
      loss_sum += t.return_pct;
    }
  }
  const std::size_t losses = trades.size() - wins;
  Expectancy e;
  e.win_rate = static_cast<double>(wins) / static_cast<double>(trades.size());
  e.mean_win = wins ? win_sum / static_cast<double>(wins) : 0.0;
  e.mean_loss = losses ? loss_sum / static_cast<double>(losses) : 0.0;
  e.expectancy = e.win_rate * e.mean_win - (1.0 - e.win_rate) * std::fabs(e.mean_loss);
  return e;
}

double buy_and_hold(const OhlcSeries& series) {
  if (series.size() < 2) throw Error(Errc::SeriesTooShort, "buy and hold needs at least 2 bars");
  return (series.back().close - series.front().close) / series.front().close * 100.0;
}

BacktestReport apply_trades(const OhlcSeries& series, std::span<const TradeIntent> intents,
                            const BacktestConfig& config) {
  if (!(config.budget > 0.0)) throw Error(Errc::NegativeBudget, "budget must be positive");
  if (series.empty()) throw Error(Errc::EmptySeries, "no bars to trade on");
  if (config.commission_pct < 0.0 || config.slippage_pct < 0.0) {
    throw Error(Errc::InvalidArgument, "costs must be non-negative");
  }

  // Bar index -> intent index, validated for order and overlap.
  std::map<std::size_t, std::size_t> entries, exits;
  std::size_t last_exit = 0;
  for (std::size_t k = 0; k < intents.size(); ++k) {
    const std::size_t a = index_or_throw(series, intents[k].entry_date);
    const std::size_t b = index_or_throw(series, intents[k].exit_date);
    if (b <= a) throw Error(Errc::InvalidArgument, "trade exits on or before its entry: " + to_iso(intents[k].entry_date));
    if (k > 0 && a < last_exit) throw Error(Errc::InvalidArgument, "trades overlap at " + to_iso(intents[k].entry_date));
    entries[a] = k;
    exits[b] = k;
    last_exit = b;
  }

  const double slip = config.slippage_pct / 100.0;
  const double comm = config.commission_pct / 100.0;
  BacktestReport rep;
  rep.budget = config.budget;
  rep.equity.dates = series.dates();
  rep.equity.equity.resize(series.size());

  double cash = config.budget, qty = 0.0;
  TradeRecord open;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double close = series[i].close;
    if (exits.count(i)) {
      open.exit_date = series[i].date;
      open.exit_price = close * (1.0 - slip) * (1.0 - comm);
      open.profit = (open.exit_price - open.entry_price) * open.quantity;
      open.return_pct = (open.exit_price / open.entry_price - 1.0) * 100.0;
      cash += open.quantity * open.exit_price;
      qty = 0.0;
      rep.trades.push_back(open);
    }
    if (entries.count(i)) {
      open = TradeRecord{};
      open.entry_date = series[i].date;
      open.entry_price = close * (1.0 + slip) * (1.0 + comm);
      open.quantity = config.sizing == Sizing::OneShare ? 1.0 : cash / open.entry_price;
      cash -= open.quantity * open.entry_price;
      qty = open.quantity;
    }
    rep.equity.equity[i] = cash + qty * close;
  }
  rep.equity.equity[0] = config.budget;

  for (const auto& t : rep.trades) rep.total_profit += t.profit;
  rep.total_return_pct = (rep.equity.equity.back() - config.budget) / config.budget * 100.0;
  rep.max_drawdown = max_drawdown(rep.equity.equity);

  if (!rep.trades.empty()) {
    const auto e = expectancy_ratio(rep.trades);
    rep.win_rate = e.win_rate;
    rep.expectancy = e.expectancy;
    rep.mean_win = e.mean_win;
    rep.mean_loss = e.mean_loss;
    double best = -std::numeric_limits<double>::infinity(), worst = -best, sum = 0.0;
    for (const auto& t : rep.trades) {
      best = std::max(best, t.return_pct);
      worst = std::min(worst, t.return_pct);
      sum += t.return_pct;
    }
    rep.best_trade_pct = best;
    rep.worst_trade_pct = worst;
    rep.avg_trade_pct = sum / static_cast<double>(rep.trades.size());
  }

  try {
    const auto ratios = risk_ratios(rep.equity.equity, config.periods_per_year);
    rep.sharpe = ratios.sharpe;
    rep.sortino = ratios.sortino;
    rep.calmar = ratios.calmar;
  } catch (const Error& e) {
    rep.sharpe = rep.sortino = rep.calmar = undefined(e.what());
  }
  rep.buy_hold_return_pct = series.size() >= 2 ? buy_and_hold(series) : 0.0;
  return rep;
}

namespace {

void put(std::string& out, std::string_view key, double v) {
  out += key;
  out += '=';
  detail::append_number(out, v);
  out += '\n';
}

void put_ratio(std::string& out, std::string_view key, const RatioValue& r) {
  out += key;
  out += '=';
  if (r.defined()) {
    detail::append_number(out, r.value);
    out += '\n';
  } else {
    out += "undefined\n";
    out += key;
    out += "_reason=" + r.undefined_reason + "\n";
  }
}

}  // namespace

std::string backtest_report_text(const BacktestReport& r) {
  std::string out;
  out += "trades=" + std::to_string(r.trades.size()) + "\n";
  put(out, "budget", r.budget);
  put(out, "total_profit", r.total_profit);
  put(out, "total_return_pct", r.total_return_pct);
  put(out, "win_rate", r.win_rate);
  put(out, "expectancy", r.expectancy);
  put(out, "mean_win", r.mean_win);
  put(out, "mean_loss", r.mean_loss);
  put_ratio(out, "sharpe", r.sharpe);
  put_ratio(out, "sortino", r.sortino);
  put_ratio(out, "calmar", r.calmar);
  put(out, "max_drawdown", r.max_drawdown);
  put(out, "best_trade_pct", r.best_trade_pct);
  put(out, "worst_trade_pct", r.worst_trade_pct);
  put(out, "avg_trade_pct", r.avg_trade_pct);
  put(out, "buy_hold_return_pct", r.buy_hold_return_pct);
  return out;
}

std::string trades_csv(std::span<const TradeRecord> trades) {
  std::string out = "entry_date,entry_price,exit_date,exit_price,profit,return_pct\n";
  for (const auto& t : trades) {
    out += to_iso(t.entry_date) + ",";
    detail::append_number(out, t.entry_price);
    out += "," + to_iso(t.exit_date) + ",";
    detail::append_number(out, t.exit_price);
    out += ',';
    detail::append_number(out, t.profit);
    out += ',';
    detail::append_number(out, t.return_pct);
    out += '\n';
  }
  return out;
}

std::string equity_csv(const EquityCurve& curve) {
  std::string out = "date,equity\n";
  for (std::size_t i = 0; i < curve.dates.size(); ++i) {
    out += to_iso(curve.dates[i]) + ",";
    detail::append_number(out, curve.equity[i]);
    out += '\n';
  }
  return out;
}

std::vector<TradeIntent> parse_trade_intents(std::string_view text) {
  std::vector<TradeIntent> out;
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
      header = false;
      continue;
    }
    const auto c1 = line.find(',');
    if (c1 == std::string_view::npos) throw MalformedRowError(line_no, "expected entry_date,exit_date");
    const auto rest = line.substr(c1 + 1);
    const auto entry = parse_iso_date(line.substr(0, c1));
    const auto exit = parse_iso_date(rest.substr(0, rest.find(',')));
    if (!entry || !exit) throw MalformedRowError(line_no, "bad date");
    out.push_back({*entry, *exit});
  }
  return out;
}

}  // namespace tradenet
