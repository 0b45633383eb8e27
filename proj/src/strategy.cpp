#include "tradenet/strategy.hpp"

#include <algorithm>

#include "text.hpp"
#include "tradenet/error.hpp"

namespace tradenet {

namespace {

void check_indicator_input(std::span<const double> values, std::size_t period) {
  if (values.empty()) throw Error(Errc::EmptySeries, "indicator input is empty");
  if (period < 1) throw Error(Errc::InvalidPeriod, "period must be >= 1");
}

std::vector<double> ema_values(std::span<const double> values, std::size_t period) {
  const double alpha = 2.0 / (static_cast<double>(period) + 1.0);
  std::vector<double> out(values.size());
  out[0] = values[0];
  for (std::size_t t = 1; t < values.size(); ++t) out[t] = out[t - 1] + alpha * (values[t] - out[t - 1]);
  return out;
}

}  // namespace

IndicatorSeries ema(std::span<const double> values, std::size_t period) {
  check_indicator_input(values, period);
  return {period, ema_values(values, period), std::min(period - 1, values.size())};
}

IndicatorSeries tema(std::span<const double> values, std::size_t period) {
  check_indicator_input(values, period);
  const auto e1 = ema_values(values, period);
  const auto e2 = ema_values(e1, period);
  const auto e3 = ema_values(e2, period);
  IndicatorSeries out{period, std::vector<double>(values.size()), std::min(3 * (period - 1), values.size())};
  for (std::size_t t = 0; t < values.size(); ++t) out.values[t] = 3.0 * e1[t] - 3.0 * e2[t] + e3[t];
  return out;
}

std::string_view signal_name(SignalKind kind) noexcept {
  switch (kind) {
    case SignalKind::Enter: return "enter";
    case SignalKind::Exit: return "exit";
    case SignalKind::None: break;
  }
  return "none";
}

SignalKind classify_bar(const std::array<double, 4>& x, const std::array<double, 4>& t) {
  constexpr auto O = static_cast<std::size_t>(Channel::Open);
  constexpr auto H = static_cast<std::size_t>(Channel::High);
  constexpr auto L = static_cast<std::size_t>(Channel::Low);
  constexpr auto C = static_cast<std::size_t>(Channel::Close);
  const bool enter = rule_body(x[L] < t[L], x[H] < t[H], x[C] < t[C], x[O] < t[O]);
  const bool exit = rule_body(x[L] > t[L], x[H] > t[H], x[C] > t[C], x[O] > t[O]);
  if (enter == exit) return SignalKind::None;
  return enter ? SignalKind::Enter : SignalKind::Exit;
}

namespace {

// Channels indexed by Channel over `dates`; signals for indices >= first.
void run_rules(RuleEvaluation& ev, const std::array<std::vector<double>, 4>& prices, std::size_t period) {
  for (std::size_t c = 0; c < 4; ++c) ev.tema[c] = tema(prices[c], period);
  const std::size_t warmup = ev.tema[0].warmup_len;
  for (std::size_t i = ev.first_forecast; i < ev.dates.size(); ++i) {
    Signal s{ev.dates[i], SignalKind::None};
    if (i >= warmup) {
      std::array<double, 4> x{}, t{};
      for (std::size_t c = 0; c < 4; ++c) {
        x[c] = prices[c][i];
        t[c] = ev.tema[c].values[i];
      }
      s.kind = classify_bar(x, t);
    }
    ev.signals.push_back(s);
  }
}

void check_rules(const StrategyRuleSet& rules) {
  if (rules.tema_period < 2) throw Error(Errc::InvalidPeriod, "tema_period must be >= 2");
}

}  // namespace

RuleEvaluation evaluate_rules_detailed(const ForecastSet& forecast, const StrategyRuleSet& rules,
                                       const OhlcSeries& history) {
  check_rules(rules);
  const std::size_t warmup = 3 * (rules.tema_period - 1);
  if (forecast.size() < warmup) {
    throw Error(Errc::InsufficientBars, "forecast has " + std::to_string(forecast.size()) +
                                            " bars, TEMA warm-up needs " + std::to_string(warmup));
  }
  const std::size_t prefix = std::min(rules.history_bars, history.size());
  RuleEvaluation ev;
  std::array<std::vector<double>, 4> prices;
  for (std::size_t i = history.size() - prefix; i < history.size(); ++i) {
    ev.dates.push_back(history[i].date);
    for (Channel c : kAllChannels) prices[static_cast<std::size_t>(c)].push_back(history[i].value(c));
  }
  ev.first_forecast = prefix;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    ev.dates.push_back(forecast.dates[i]);
    for (Channel c : kAllChannels) prices[static_cast<std::size_t>(c)].push_back(forecast.channel(c)[i]);
  }
  run_rules(ev, prices, rules.tema_period);
  return ev;
}

std::vector<Signal> evaluate_rules(const ForecastSet& forecast, const StrategyRuleSet& rules,
                                   const OhlcSeries& history) {
  return evaluate_rules_detailed(forecast, rules, history).signals;
}

std::vector<Signal> evaluate_rules_on_series(const OhlcSeries& series, const StrategyRuleSet& rules) {
  check_rules(rules);
  const std::size_t warmup = 3 * (rules.tema_period - 1);
  if (series.size() < warmup) throw Error(Errc::InsufficientBars, "series shorter than TEMA warm-up");
  RuleEvaluation ev;
  ev.dates = series.dates();
  std::array<std::vector<double>, 4> prices;
  for (Channel c : kAllChannels) prices[static_cast<std::size_t>(c)] = series.channel(c);
  run_rules(ev, prices, rules.tema_period);
  return ev.signals;
}

std::vector<TradeIntent> signals_to_trades(std::span<const Signal> signals) {
  std::vector<TradeIntent> trades;
  bool open = false;
  Date entry{};
  for (const auto& s : signals) {
    if (!open && s.kind == SignalKind::Enter) {
      open = true;
      entry = s.date;
    } else if (open && s.kind == SignalKind::Exit) {
      trades.push_back({entry, s.date});
      open = false;
    }
  }
  if (open && !signals.empty() && signals.back().date != entry) trades.push_back({entry, signals.back().date});
  return trades;
}

std::string signals_csv(std::span<const Signal> signals) {
  std::string out = "date,kind\n";
  for (const auto& s : signals) out += to_iso(s.date) + "," + std::string(signal_name(s.kind)) + "\n";
  return out;
}

std::string indicator_csv(const RuleEvaluation& ev) {
  std::string out = "date,tema_open,tema_high,tema_low,tema_close,warmup\n";
  for (std::size_t i = 0; i < ev.dates.size(); ++i) {
    out += to_iso(ev.dates[i]);
    for (const auto& t : ev.tema) {
      out += ',';
      detail::append_number(out, t.values[i]);
    }
    out += i < ev.tema[0].warmup_len ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace tradenet
