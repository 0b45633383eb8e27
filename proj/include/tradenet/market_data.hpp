#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradenet/date.hpp"

namespace tradenet {

enum class Channel { Open, High, Low, Close };

inline constexpr std::array<Channel, 4> kAllChannels{Channel::Open, Channel::High, Channel::Low,
                                                     Channel::Close};

std::string_view channel_name(Channel channel) noexcept;
std::optional<Channel> parse_channel(std::string_view name);

struct OhlcBar {
  Date date{};
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::optional<double> adj_close;
  std::optional<double> volume;

  double value(Channel channel) const noexcept;

  // low == high: a bar with no intrabar movement (e.g. a halted session).
  bool is_flat() const noexcept { return low == high; }

  friend bool operator==(const OhlcBar&, const OhlcBar&) = default;
};

// Empty string when the bar satisfies low > 0, low <= high and open/close in
// [low, high]; otherwise a description of the first violated constraint.
std::string validate_bar(const OhlcBar& bar);

// Dated OHLC history with strictly increasing dates.
class OhlcSeries {
 public:
  OhlcSeries() = default;
  // Throws Error(InvalidArgument) if bars violate the bar constraints or are
  // not strictly increasing in date.
  OhlcSeries(std::string symbol, std::vector<OhlcBar> bars);

  const std::string& symbol() const noexcept { return symbol_; }
  std::span<const OhlcBar> bars() const noexcept { return bars_; }
  std::size_t size() const noexcept { return bars_.size(); }
  bool empty() const noexcept { return bars_.empty(); }
  const OhlcBar& operator[](std::size_t i) const { return bars_[i]; }
  const OhlcBar& front() const { return bars_.front(); }
  const OhlcBar& back() const { return bars_.back(); }

  std::vector<double> channel(Channel channel) const;
  std::vector<Date> dates() const;
  std::optional<std::size_t> index_of(const Date& date) const;
  OhlcSeries slice(std::size_t first, std::size_t count) const;

  // Number of bars accepted with low == high.
  std::size_t flat_bar_count() const noexcept;

  friend bool operator==(const OhlcSeries&, const OhlcSeries&) = default;

 private:
  std::string symbol_;
  std::vector<OhlcBar> bars_;
};

struct CsvOptions {
  // Drop rows whose price fields fail to parse instead of failing the load.
  bool skip_malformed = false;
};

struct CsvDiagnostics {
  std::vector<std::size_t> skipped_lines;
  std::vector<Date> flat_bars;
};

// Parses `Date,Open,High,Low,Close[,Adj Close][,Volume]` (extra columns are
// ignored, header names are matched case-insensitively). Output is sorted by
// ascending date.
OhlcSeries parse_ohlc_csv(std::string_view text, std::string symbol, const CsvOptions& options = {},
                          CsvDiagnostics* diagnostics = nullptr);

OhlcSeries read_ohlc_csv(const std::string& path, std::string symbol,
                         const CsvOptions& options = {}, CsvDiagnostics* diagnostics = nullptr);

// Shortest round-trip decimal form for every price, so parse(serialize(s)) == s.
std::string serialize_ohlc_csv(const OhlcSeries& series);

struct SeriesSplit {
  OhlcSeries train;
  OhlcSeries validation;
};

SeriesSplit split_series(const OhlcSeries& series, std::size_t validation_len);

struct ReturnSeries {
  std::vector<double> values;
  std::size_t step = 1;
  Channel channel = Channel::Close;
};

// values[i] = (z[i + step] - z[i]) / z[i]
ReturnSeries simple_returns(const OhlcSeries& series, Channel channel, std::size_t step = 1);
ReturnSeries simple_returns(std::span<const double> prices, std::size_t step = 1,
                            Channel channel = Channel::Close);

// (R - mean) / sample_std
ReturnSeries standardize_returns(const ReturnSeries& returns);

// Sample standard deviation of each trailing window of `window` returns.
std::vector<double> rolling_volatility(const ReturnSeries& returns, std::size_t window);

}  // namespace tradenet
