#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradenet/date.hpp"
#include "tradenet/forecasting.hpp"
#include "tradenet/market_data.hpp"

namespace tradenet {

struct IndicatorSeries {
  std::size_t period = 0;
  std::vector<double> values;  // aligned with the input
  std::size_t warmup_len = 0;  // leading values dominated by the seed
};

// Seeded with the first value, alpha = 2/(period+1), warmup_len = period - 1.
IndicatorSeries ema(std::span<const double> values, std::size_t period);

// 3*E1 - 3*E2 + E3 with E2 = ema(E1), E3 = ema(E2); warmup_len = 3*(period - 1).
IndicatorSeries tema(std::span<const double> values, std::size_t period);

enum class SignalKind { None, Enter, Exit };

std::string_view signal_name(SignalKind kind) noexcept;

struct Signal {
  Date date{};
  SignalKind kind = SignalKind::None;

  bool operator==(const Signal&) const = default;
};

struct StrategyRuleSet {
  std::size_t tema_period = 3;
  std::size_t history_bars = 5;  // actual bars prepended before the forecast to seed TEMA
};

// (low or high) and (close or open), each flag being "price vs TEMA" on that channel.
constexpr bool rule_body(bool low, bool high, bool close, bool open) noexcept {
  return (low || high) && (close || open);
}

// Prices and TEMAs indexed by Channel. Strict comparisons; enter and exit
// on the same bar cancel out.
SignalKind classify_bar(const std::array<double, 4>& price, const std::array<double, 4>& tema_value);

struct RuleEvaluation {
  std::vector<Date> dates;                // history bars followed by forecast bars
  std::array<IndicatorSeries, 4> tema;    // over `dates`
  std::size_t first_forecast = 0;         // index of the first forecast bar in `dates`
  std::vector<Signal> signals;            // one per forecast date
};

// TEMA per predicted channel over the last rules.history_bars bars of
// `history` followed by the forecast. Warm-up bars produce no signal.
// Throws InsufficientBars when the forecast is shorter than the warm-up.
RuleEvaluation evaluate_rules_detailed(const ForecastSet& forecast, const StrategyRuleSet& rules,
                                       const OhlcSeries& history);
std::vector<Signal> evaluate_rules(const ForecastSet& forecast, const StrategyRuleSet& rules,
                                   const OhlcSeries& history);

// Same rules applied to an observed series (no history prefix).
std::vector<Signal> evaluate_rules_on_series(const OhlcSeries& series, const StrategyRuleSet& rules);

struct TradeIntent {
  Date entry_date{};
  Date exit_date{};

  bool operator==(const TradeIntent&) const = default;
};

// Long-only state machine: enter opens, exit closes, repeats are ignored. An
// open position is closed on the last signal date (dropped if it was opened
// on that same date).
std::vector<TradeIntent> signals_to_trades(std::span<const Signal> signals);

std::string signals_csv(std::span<const Signal> signals);
std::string indicator_csv(const RuleEvaluation& evaluation);

}  // namespace tradenet
