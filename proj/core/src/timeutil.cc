// Copyright 2026 The tapestore authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tapestore/timeutil.h"

#include <cstdio>
#include <ctime>

namespace tapestore {

namespace {

struct Civil {
  int year;
  int month;  // 1..12
  int day;    // 1..31
  int hour;
  int minute;
  int second;
};

bool IsLeapYear(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int DaysInMonth(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && IsLeapYear(y)) return 29;
  return kDays[m - 1];
}

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t DaysFromCivil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Civil CivilFromSeconds(UtcSeconds t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  const std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  Civil c;
  c.year = static_cast<int>(y + (m <= 2));
  c.month = static_cast<int>(m);
  c.day = static_cast<int>(d);
  c.hour = static_cast<int>(rem / 3600);
  c.minute = static_cast<int>((rem / 60) % 60);
  c.second = static_cast<int>(rem % 60);
  return c;
}

bool ParseDigits(std::string_view s, std::size_t pos, std::size_t count,
                 int* out) {
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  *out = v;
  return true;
}

bool ValidClock(int hour, int minute, int second) {
  return hour >= 0 && hour <= 23 && minute >= 0 && minute <= 59 &&
         second >= 0 && second <= 59;
}

bool ValidDate(int year, int month, int day) {
  return month >= 1 && month <= 12 && day >= 1 &&
         day <= DaysInMonth(year, month);
}

UtcSeconds Assemble(int year, int month, int day, int hour, int minute,
                    int second) {
  return DaysFromCivil(year, month, day) * 86400 + hour * 3600 + minute * 60 +
         second;
}

}  // namespace

std::string FormatIso(UtcSeconds t) {
  const Civil c = CivilFromSeconds(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year,
                c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

std::string FormatArcDate(UtcSeconds t) {
  const Civil c = CivilFromSeconds(t);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02d%02d%02d%02d", c.year, c.month,
                c.day, c.hour, c.minute, c.second);
  return buf;
}

std::optional<UtcSeconds> ParseIso(std::string_view s) {
  // YYYY-MM-DDThh:mm:ssZ
  if (s.size() != 20) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z') {
    return std::nullopt;
  }
  int year, month, day, hour, minute, second;
  if (!ParseDigits(s, 0, 4, &year) || !ParseDigits(s, 5, 2, &month) ||
      !ParseDigits(s, 8, 2, &day) || !ParseDigits(s, 11, 2, &hour) ||
      !ParseDigits(s, 14, 2, &minute) || !ParseDigits(s, 17, 2, &second)) {
    return std::nullopt;
  }
  if (!ValidDate(year, month, day) || !ValidClock(hour, minute, second)) {
    return std::nullopt;
  }
  return Assemble(year, month, day, hour, minute, second);
}

std::optional<UtcSeconds> ParseArcDate(std::string_view s) {
  // YYYYMMDDHHMMSS
  if (s.size() != 14) return std::nullopt;
  int year, month, day, hour, minute, second;
  if (!ParseDigits(s, 0, 4, &year) || !ParseDigits(s, 4, 2, &month) ||
      !ParseDigits(s, 6, 2, &day) || !ParseDigits(s, 8, 2, &hour) ||
      !ParseDigits(s, 10, 2, &minute) || !ParseDigits(s, 12, 2, &second)) {
    return std::nullopt;
  }
  if (!ValidDate(year, month, day) || !ValidClock(hour, minute, second)) {
    return std::nullopt;
  }
  return Assemble(year, month, day, hour, minute, second);
}

std::optional<UtcSeconds> ParseIsoDate(std::string_view s) {
  // YYYY-MM-DD
  if (s.size() != 10) return std::nullopt;
  if (s[4] != '-' || s[7] != '-') return std::nullopt;
  int year, month, day;
  if (!ParseDigits(s, 0, 4, &year) || !ParseDigits(s, 5, 2, &month) ||
      !ParseDigits(s, 8, 2, &day)) {
    return std::nullopt;
  }
  if (!ValidDate(year, month, day)) return std::nullopt;
  return Assemble(year, month, day, 0, 0, 0);
}

UtcSeconds NowUtcSeconds() {
  return static_cast<UtcSeconds>(std::time(nullptr));
}

}  // namespace tapestore
