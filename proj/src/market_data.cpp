#include "tradenet/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tradenet/error.hpp"

namespace tradenet {

std::string_view channel_name(Channel channel) noexcept {
  switch (channel) {
    case Channel::Open: return "open";
    case Channel::High: return "high";
    case Channel::Low: return "low";
    case Channel::Close: return "close";
  }
  return "close";
}

std::optional<Channel> parse_channel(std::string_view name) {
  for (Channel c : kAllChannels) {
    if (channel_name(c) == name) return c;
  }
  return std::nullopt;
}

double OhlcBar::value(Channel channel) const noexcept {
  switch (channel) {
    case Channel::Open: return open;
    case Channel::High: return high;
    case Channel::Low: return low;
    case Channel::Close: return close;
  }
  return close;
}

std::string validate_bar(const OhlcBar& bar) {
  if (!std::isfinite(bar.open) || !std::isfinite(bar.high) || !std::isfinite(bar.low) ||
      !std::isfinite(bar.close)) {
    return "non-finite price";
  }
  if (!(bar.low > 0.0)) return "low must be positive";
  if (bar.low > bar.high) return "low exceeds high";
  if (bar.open < bar.low || bar.open > bar.high) return "open outside [low, high]";
  if (bar.close < bar.low || bar.close > bar.high) return "close outside [low, high]";
  if (bar.volume && *bar.volume < 0.0) return "negative volume";
  return {};
}

OhlcSeries::OhlcSeries(std::string symbol, std::vector<OhlcBar> bars)
    : symbol_(std::move(symbol)), bars_(std::move(bars)) {
  for (std::size_t i = 0; i < bars_.size(); ++i) {
    if (auto why = validate_bar(bars_[i]); !why.empty()) {
      throw Error(Errc::InvalidArgument, to_iso(bars_[i].date) + ": " + why);
    }
    if (i > 0 && !(bars_[i - 1].date < bars_[i].date)) {
      throw Error(Errc::InvalidArgument, "dates not strictly increasing at " + to_iso(bars_[i].date));
    }
  }
}

std::vector<double> OhlcSeries::channel(Channel channel) const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const auto& bar : bars_) out.push_back(bar.value(channel));
  return out;
}

std::vector<Date> OhlcSeries::dates() const {
  std::vector<Date> out;
  out.reserve(bars_.size());
  for (const auto& bar : bars_) out.push_back(bar.date);
  return out;
}

std::optional<std::size_t> OhlcSeries::index_of(const Date& date) const {
  auto it = std::lower_bound(bars_.begin(), bars_.end(), date,
                             [](const OhlcBar& bar, const Date& d) { return bar.date < d; });
  if (it == bars_.end() || it->date != date) return std::nullopt;
  return static_cast<std::size_t>(it - bars_.begin());
}

OhlcSeries OhlcSeries::slice(std::size_t first, std::size_t count) const {
  if (first > bars_.size() || count > bars_.size() - first) {
    throw Error(Errc::InvalidArgument, "slice out of range");
  }
  OhlcSeries out;
  out.symbol_ = symbol_;
  out.bars_.assign(bars_.begin() + static_cast<std::ptrdiff_t>(first),
                   bars_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

std::size_t OhlcSeries::flat_bar_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(bars_.begin(), bars_.end(), [](const OhlcBar& b) { return b.is_flat(); }));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

void append_number(std::string& out, double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

}  // namespace

OhlcSeries parse_ohlc_csv(std::string_view text, std::string symbol, const CsvOptions& options,
                          CsvDiagnostics* diagnostics) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  std::string_view header_line;
  if (!next_line(header_line)) throw Error(Errc::EmptySeries, "no header row");
  if (header_line.size() >= 3 && static_cast<unsigned char>(header_line[0]) == 0xEF) {
    header_line.remove_prefix(3);  // UTF-8 BOM
  }

  std::unordered_map<std::string, std::size_t> columns;
  auto header = split_fields(header_line);
  for (std::size_t i = 0; i < header.size(); ++i) columns.emplace(lower(header[i]), i);

  auto require = [&](const char* name) {
    auto it = columns.find(name);
    if (it == columns.end()) throw Error(Errc::MissingColumn, name);
    return it->second;
  };
  auto optional_col = [&](const char* name) -> std::optional<std::size_t> {
    auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  };
  const std::size_t c_date = require("date");
  const std::size_t c_open = require("open");
  const std::size_t c_high = require("high");
  const std::size_t c_low = require("low");
  const std::size_t c_close = require("close");
  const auto c_adj = optional_col("adj close");
  const auto c_vol = optional_col("volume");

  std::vector<OhlcBar> bars;
  std::string_view line;
  while (next_line(line)) {
    auto fields = split_fields(line);
    auto reject = [&](const std::string& why) {
      if (options.skip_malformed) {
        if (diagnostics) diagnostics->skipped_lines.push_back(line_no);
        return;
      }
      throw MalformedRowError(line_no, why);
    };
    auto field = [&](std::size_t col) -> std::string_view {
      return col < fields.size() ? fields[col] : std::string_view{};
    };

    OhlcBar bar;
    auto date = parse_iso_date(field(c_date));
    if (!date) {
      reject("unparseable date '" + std::string(field(c_date)) + "'");
      continue;
    }
    bar.date = *date;
    auto o = parse_number(field(c_open));
    auto h = parse_number(field(c_high));
    auto l = parse_number(field(c_low));
    auto c = parse_number(field(c_close));
    if (!o || !h || !l || !c) {
      reject("unparseable price field");
      continue;
    }
    bar.open = *o;
    bar.high = *h;
    bar.low = *l;
    bar.close = *c;
    if (c_adj) bar.adj_close = parse_number(field(*c_adj));
    if (c_vol) bar.volume = parse_number(field(*c_vol));
    if (auto why = validate_bar(bar); !why.empty()) {
      reject(why);
      continue;
    }
    if (diagnostics && bar.is_flat()) diagnostics->flat_bars.push_back(bar.date);
    bars.push_back(bar);
  }

  if (bars.empty()) throw Error(Errc::EmptySeries, "no data rows");

  std::stable_sort(bars.begin(), bars.end(),
                   [](const OhlcBar& a, const OhlcBar& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < bars.size(); ++i) {
    if (bars[i].date == bars[i - 1].date) throw Error(Errc::DuplicateDate, to_iso(bars[i].date));
  }
  return OhlcSeries(std::move(symbol), std::move(bars));
}

OhlcSeries read_ohlc_csv(const std::string& path, std::string symbol, const CsvOptions& options,
                         CsvDiagnostics* diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ohlc_csv(buffer.str(), std::move(symbol), options, diagnostics);
}

std::string serialize_ohlc_csv(const OhlcSeries& series) {
  std::string out = "Date,Open,High,Low,Close,Adj Close,Volume\n";
  for (const auto& bar : series.bars()) {
    out += to_iso(bar.date);
    for (double v : {bar.open, bar.high, bar.low, bar.close}) {
      out += ',';
      append_number(out, v);
    }
    out += ',';
    if (bar.adj_close) append_number(out, *bar.adj_close);
    out += ',';
    if (bar.volume) append_number(out, *bar.volume);
    out += '\n';
  }
  return out;
}

SeriesSplit split_series(const OhlcSeries& series, std::size_t validation_len) {
  if (validation_len == 0 || validation_len >= series.size()) {
    throw Error(Errc::InvalidSplit, "validation_len " + std::to_string(validation_len) +
                                        " out of range for length " + std::to_string(series.size()));
  }
  const std::size_t train_len = series.size() - validation_len;
  return {series.slice(0, train_len), series.slice(train_len, validation_len)};
}

ReturnSeries simple_returns(std::span<const double> prices, std::size_t step, Channel channel) {
  if (step < 1 || prices.size() <= step) {
    throw Error(Errc::SeriesTooShort, "need more than " + std::to_string(step) + " prices");
  }
  ReturnSeries out;
  out.step = step;
  out.channel = channel;
  out.values.reserve(prices.size() - step);
  for (std::size_t i = 0; i + step < prices.size(); ++i) {
    out.values.push_back((prices[i + step] - prices[i]) / prices[i]);
  }
  return out;
}

ReturnSeries simple_returns(const OhlcSeries& series, Channel channel, std::size_t step) {
  auto prices = series.channel(channel);
  return simple_returns(prices, step, channel);
}

namespace {

struct Moments {
  double mean;
  double sample_std;
};

// Two-pass moments computed on values shifted by the first element, which
// keeps constant inputs at exactly zero spread.
Moments moments(std::span<const double> v) {
  const double shift = v.front();
  double sum = 0.0;
  for (double x : v) sum += x - shift;
  const double shifted_mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    const double d = (x - shift) - shifted_mean;
    ss += d * d;
  }
  return {shift + shifted_mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

ReturnSeries standardize_returns(const ReturnSeries& returns) {
  if (returns.values.size() < 2) throw Error(Errc::SeriesTooShort, "need at least 2 returns");
  const auto m = moments(returns.values);
  if (!(m.sample_std > 0.0)) throw Error(Errc::ZeroVariance, "returns have zero variance");
  ReturnSeries out = returns;
  for (double& v : out.values) v = (v - m.mean) / m.sample_std;
  return out;
}

std::vector<double> rolling_volatility(const ReturnSeries& returns, std::size_t window) {
  if (window < 2) throw Error(Errc::InvalidArgument, "window must be >= 2");
  if (returns.values.size() < window) {
    throw Error(Errc::WindowTooLarge, "window " + std::to_string(window) + " exceeds length " +
                                          std::to_string(returns.values.size()));
  }
  std::span<const double> v = returns.values;
  std::vector<double> out;
  out.reserve(v.size() - window + 1);
  for (std::size_t end = window; end <= v.size(); ++end) {
    out.push_back(moments(v.subspan(end - window, window)).sample_std);
  }
  return out;
}

}  // namespace tradenet
