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
#ifndef KIP_LOGIO_H_
#define KIP_LOGIO_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kip/activity.h"
#include "kip/address.h"

namespace kip {

using LogEvent = ActivityEvent;

struct LogStats {
  std::uint64_t lines = 0;
  std::uint64_t parsed = 0;
  std::uint64_t malformed = 0;
  std::uint64_t out_of_window = 0;
};

// Block-buffered line splitter. Lines exclude the '\n'; `had_newline`
// reports whether one terminated the line.
class LineReader {
 public:
  explicit LineReader(std::istream& in, std::size_t block = 1 << 20);
  bool next(std::string_view& line, bool& had_newline);

 private:
  bool refill();

  std::istream& in_;
  std::vector<char> buf_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;
};

// Integer epoch seconds (fraction truncated) or ISO-8601 UTC such as
// "2017-03-25T08:30:00Z".
std::optional<std::int64_t> parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t epoch_seconds);

// Splits "<timestamp>\t<address>[\t...]". nullopt when malformed.
std::optional<LogEvent> parse_log_line(std::string_view line);

// Streams in-window events to `sink`. Throws std::runtime_error if the
// stream goes bad before end of input.
LogStats read_log(std::istream& in, const TimeGrid& grid,
                  const std::function<void(const LogEvent&)>& sink);

std::vector<LogEvent> parse_log(std::istream& in, const TimeGrid& grid,
                                LogStats* stats = nullptr);

// Smallest grid aligned to `interval_seconds` covering every parseable
// timestamp in the stream; nullopt for a stream without any.
std::optional<TimeGrid> derive_grid(std::istream& in,
                                    std::int64_t interval_seconds);

}  // namespace kip

#endif  // KIP_LOGIO_H_
