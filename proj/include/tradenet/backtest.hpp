#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradenet/date.hpp"
#include "tradenet/market_data.hpp"
#include "tradenet/strategy.hpp"

namespace tradenet {

struct TradeRecord {
  Date entry_date{};
  Date exit_date{};
  double entry_price = 0.0;  // effective buy price, costs included
  double exit_price = 0.0;   // effective sell price, costs included
  double quantity = 0.0;
  double profit = 0.0;       // (exit_price - entry_price) * quantity
  double return_pct = 0.0;   // (exit_price / entry_price - 1) * 100
};

struct EquityCurve {
  std::vector<Date> dates;
  std::vector<double> equity;  // marked at each close, equity[0] = budget
};

enum class Sizing { OneShare, Compounded };

std::string_view sizing_name(Sizing sizing) noexcept;
std::optional<Sizing> parse_sizing(std::string_view name);

struct BacktestConfig {
  double budget = 100.0;
  Sizing sizing = Sizing::OneShare;
  double commission_pct = 0.0;  // percent of traded value, charged per side
  double slippage_pct = 0.0;    // percent of the close, against the trader
  std::size_t periods_per_year = 252;
};

// A ratio that may be undefined (zero denominator). value is NaN then.
struct RatioValue {
  double value = 0.0;
  std::string undefined_reason;

  bool defined() const noexcept { return undefined_reason.empty(); }
  // Throws Error(UndefinedRatio) when undefined.
  double require(std::string_view which) const;
};

struct RiskRatios {
  RatioValue sharpe;
  RatioValue sortino;
  RatioValue calmar;
};

struct Expectancy {
  double expectancy = 0.0;  // percentage points
  double win_rate = 0.0;
  double mean_win = 0.0;
  double mean_loss = 0.0;
};

struct BacktestReport {
  std::vector<TradeRecord> trades;
  EquityCurve equity;
  double budget = 0.0;
  double total_profit = 0.0;
  double total_return_pct = 0.0;
  double win_rate = 0.0;
  double expectancy = 0.0;
  double mean_win = 0.0;
  double mean_loss = 0.0;
  RatioValue sharpe;
  RatioValue sortino;
  RatioValue calmar;
  double max_drawdown = 0.0;
  double best_trade_pct = 0.0;
  double worst_trade_pct = 0.0;
  double avg_trade_pct = 0.0;
  double buy_hold_return_pct = 0.0;
};

// Fills at the close of each intent date. Buys pay close*(1+slip)*(1+comm),
// sells receive close*(1-slip)*(1-comm). Throws UnknownDate, NegativeBudget,
// and InvalidArgument for unordered or overlapping intents.
BacktestReport apply_trades(const OhlcSeries& series, std::span<const TradeIntent> intents,
                            const BacktestConfig& config = {});

// max over t of (peak_so_far - equity[t]) / peak_so_far. Throws EmptySeries.
double max_drawdown(std::span<const double> equity);

// Daily simple returns of the curve. Sharpe uses the sample std, Sortino the
// downside deviation sqrt(sum_{r<0} r^2 / N), Calmar the compound annual
// growth rate over MDD. Throws SeriesTooShort below 3 points.
RiskRatios risk_ratios(std::span<const double> equity, std::size_t periods_per_year = 252);

// Break-even trades count as losses. Throws NoTrades.
Expectancy expectancy_ratio(std::span<const TradeRecord> trades);

// Close-to-close percent change over the series. Throws SeriesTooShort.
double buy_and_hold(const OhlcSeries& series);

std::string backtest_report_text(const BacktestReport& report);
std::string trades_csv(std::span<const TradeRecord> trades);
std::string equity_csv(const EquityCurve& curve);

// Reads `entry_date,exit_date` rows (header required; extra columns ignored).
std::vector<TradeIntent> parse_trade_intents(std::string_view text);

}  // namespace tradenet
