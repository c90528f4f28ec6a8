/*
 * Copyright 2026 The kip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "kip/logio.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <stdexcept>

namespace kip {

LineReader::LineReader(std::istream& in, std::size_t block)
    : in_(in), buf_(block) {}

bool LineReader::refill() {
  if (eof_) return false;
  if (begin_ > 0) {
    std::memmove(buf_.data(), buf_.data() + begin_, end_ - begin_);
    end_ -= begin_;
    begin_ = 0;
  }
  if (end_ == buf_.size()) buf_.resize(buf_.size() * 2);
  in_.read(buf_.data() + end_, static_cast<std::streamsize>(buf_.size() - end_));
  std::streamsize got = in_.gcount();
  if (in_.bad()) throw std::runtime_error("I/O error while reading input");
  end_ += static_cast<std::size_t>(got);
  if (!in_) eof_ = true;
  return got > 0;
}

bool LineReader::next(std::string_view& line, bool& had_newline) {
  std::size_t scanned = begin_;
  while (true) {
    const char* start = buf_.data() + scanned;
    const void* nl = std::memchr(start, '\n', end_ - scanned);
    if (nl != nullptr) {
      std::size_t pos = static_cast<std::size_t>(static_cast<const char*>(nl) - buf_.data());
      line = std::string_view(buf_.data() + begin_, pos - begin_);
      begin_ = pos + 1;
      had_newline = true;
      return true;
    }
    std::size_t consumed = end_ - begin_;
    if (!refill()) {
      if (begin_ < end_) {
        line = std::string_view(buf_.data() + begin_, end_ - begin_);
        begin_ = end_;
        had_newline = false;
        return true;
      }
      return false;
    }
    scanned = begin_ + consumed;
  }
}

namespace {

bool parse_digits(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.fff][Z|+00:00]
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' ||
      (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!parse_digits(s.substr(0, 4), year) || !parse_digits(s.substr(5, 2), month) ||
      !parse_digits(s.substr(8, 2), day) || !parse_digits(s.substr(11, 2), hour) ||
      !parse_digits(s.substr(14, 2), minute) ||
      !parse_digits(s.substr(17, 2), second)) {
    return std::nullopt;
  }
  std::string_view rest = s.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 1) return std::nullopt;
    rest.remove_prefix(i);
  }
  if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) {
    return std::nullopt;
  }
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  std::int64_t days = sys_days(ymd).time_since_epoch().count();
  return days * 86400 + hour * 3600 + minute * 60 + second;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.size() >= 19 && text[4] == '-') return parse_iso8601(text);
  std::string_view digits = text;
  std::size_t dot = text.find('.');
  if (dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(),
                                     [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    digits = text.substr(0, dot);
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
    return std::nullopt;
  }
  // floor for negative fractional instants
  if (dot != std::string_view::npos && value < 0 &&
      text.find_first_not_of("0", dot + 1) != std::string_view::npos) {
    --value;
  }
  return value;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  std::int64_t days = epoch_seconds >= 0 ? epoch_seconds / 86400
                                         : -((-epoch_seconds + 86399) / 86400);
  std::int64_t rem = epoch_seconds - days * 86400;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

std::optional<LogEvent> parse_log_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos) return std::nullopt;
  std::string_view address = line.substr(tab + 1);
  std::size_t next = address.find('\t');
  if (next != std::string_view::npos) address = address.substr(0, next);
  auto t = parse_timestamp(line.substr(0, tab));
  if (!t) return std::nullopt;
  auto a = try_parse_address(address);
  if (!a) return std::nullopt;
  return LogEvent{*a, *t};
}

LogStats read_log(std::istream& in, const TimeGrid& grid,
                  const std::function<void(const LogEvent&)>& sink) {
  LogStats stats;
  LineReader reader(in);
  std::string_view line;
  bool had_newline = false;
  while (reader.next(line, had_newline)) {
    ++stats.lines;
    auto event = parse_log_line(line);
    if (!event) {
      ++stats.malformed;
      continue;
    }
    if (!grid.in_window(event->time)) {
      ++stats.out_of_window;
      continue;
    }
    ++stats.parsed;
    sink(*event);
  }
  return stats;
}

std::vector<LogEvent> parse_log(std::istream& in, const TimeGrid& grid,
                                LogStats* stats) {
  std::vector<LogEvent> events;
  LogStats s = read_log(in, grid, [&](const LogEvent& e) { events.push_back(e); });
  if (stats != nullptr) *stats = s;
  return events;
}

std::optional<TimeGrid> derive_grid(std::istream& in,
                                    std::int64_t interval_seconds) {
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  LineReader reader(in);
  std::string_view line;
  bool had_newline = false;
  while (reader.next(line, had_newline)) {
    if (auto e = parse_log_line(line)) {
      lo = std::min(lo, e->time);
      hi = std::max(hi, e->time);
    }
  }
  if (lo > hi) return std::nullopt;
  auto floor_to = [interval_seconds](std::int64_t t) {
    std::int64_t q = t / interval_seconds;
    if (t % interval_seconds < 0) --q;
    return q * interval_seconds;
  };
  std::int64_t start = floor_to(lo);
  std::int64_t intervals = (floor_to(hi) - start) / interval_seconds + 1;
  return TimeGrid(start, interval_seconds, static_cast<int>(intervals));
}

}  // namespace kip
