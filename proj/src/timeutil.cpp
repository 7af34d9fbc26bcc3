// Copyright 2026 The dataval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dataval/timeutil.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "dataval/errors.hpp"

namespace dataval {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  bool take(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  /// Reads between min and max digits.
  std::optional<int> digits(std::size_t min, std::size_t max) {
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && pos_ - begin < max && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ - begin < min) return std::nullopt;
    int value = 0;
    std::from_chars(text_.data() + begin, text_.data() + pos_, value);
    return value;
  }

  void skip_spaces() {
    while (peek() == ' ') ++pos_;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<Timestamp> compose(int y, int mo, int d, int h, int mi, int s) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  Cursor c(trim(text));
  auto y = c.digits(4, 4);
  if (!y || !c.take('-')) return std::nullopt;
  auto mo = c.digits(2, 2);
  if (!mo || !c.take('-')) return std::nullopt;
  auto d = c.digits(2, 2);
  if (!d) return std::nullopt;
  if (c.done()) return compose(*y, *mo, *d, 0, 0, 0);
  if (!c.take('T') && !c.take(' ')) return std::nullopt;
  auto h = c.digits(2, 2);
  if (!h || !c.take(':')) return std::nullopt;
  auto mi = c.digits(2, 2);
  if (!mi) return std::nullopt;
  int s = 0;
  if (c.take(':')) {
    auto sec = c.digits(2, 2);
    if (!sec) return std::nullopt;
    s = *sec;
    if (c.take('.') && !c.digits(1, 9)) return std::nullopt;
  }
  auto t = compose(*y, *mo, *d, *h, *mi, s);
  if (!t) return std::nullopt;
  if (c.done() || c.take('Z')) return c.done() ? t : std::nullopt;
  const char sign = c.peek();
  if (sign != '+' && sign != '-') return std::nullopt;
  c.take(sign);
  auto oh = c.digits(2, 2);
  if (!oh) return std::nullopt;
  c.take(':');
  auto om = c.digits(2, 2);
  if (!om || !c.done()) return std::nullopt;
  const std::chrono::seconds offset{(*oh * 60 + *om) * 60};
  return sign == '+' ? *t - offset : *t + offset;
}

std::optional<Timestamp> parse_us_timestamp(std::string_view text) {
  Cursor c(trim(text));
  auto mo = c.digits(1, 2);
  if (!mo || !c.take('/')) return std::nullopt;
  auto d = c.digits(1, 2);
  if (!d || !c.take('/')) return std::nullopt;
  auto y = c.digits(4, 4);
  if (!y || !c.take(' ')) return std::nullopt;
  auto h = c.digits(1, 2);
  if (!h || !c.take(':')) return std::nullopt;
  auto mi = c.digits(2, 2);
  if (!mi) return std::nullopt;
  int s = 0;
  if (c.take(':')) {
    auto sec = c.digits(2, 2);
    if (!sec) return std::nullopt;
    s = *sec;
  }
  c.skip_spaces();
  bool pm = false;
  if (c.take('P') || c.take('p')) {
    pm = true;
  } else if (!(c.take('A') || c.take('a'))) {
    return std::nullopt;
  }
  if (!(c.take('M') || c.take('m')) || !c.done()) return std::nullopt;
  if (*h < 1 || *h > 12) return std::nullopt;
  const int hour = (*h % 12) + (pm ? 12 : 0);
  return compose(*y, *mo, *d, hour, *mi, s);
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

Timestamp require_timestamp(std::string_view text, std::string_view what) {
  auto t = parse_iso8601(text);
  if (!t) throw ConfigError(std::string(what) + ": cannot parse timestamp '" + std::string(text) + "'");
  return *t;
}

}  // namespace dataval
