// Copyright 2026 The tempent Authors.
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

#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tempent/error.hpp"

namespace tempent {

using Date = std::chrono::year_month_day;
using Days = std::chrono::sys_days;

enum class Granularity { kDay, kWeek, kMonth, kYear };

inline std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kDay: return "day";
    case Granularity::kWeek: return "week";
    case Granularity::kMonth: return "month";
    case Granularity::kYear: return "year";
  }
  return "?";
}

inline std::optional<Granularity> parse_granularity(std::string_view name) {
  if (name == "day") return Granularity::kDay;
  if (name == "week") return Granularity::kWeek;
  if (name == "month") return Granularity::kMonth;
  if (name == "year") return Granularity::kYear;
  return std::nullopt;
}

// A labeled half-open interval [start, end) of one granularity.
struct TimeSlice {
  Granularity granularity;
  std::string label;
  Days start;
  Days end;

  bool contains(Date d) const {
    Days day{d};
    return start <= day && day < end;
  }
  friend bool operator==(const TimeSlice &, const TimeSlice &) = default;
};

namespace detail {

// Labels are restricted to four-digit years.
inline constexpr int kMinYear = 1;
inline constexpr int kMaxYear = 9999;

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

inline int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

inline std::string pad(int value, int width) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

// ISO-8601 weekday: Monday = 1 ... Sunday = 7.
inline unsigned iso_weekday(Days d) {
  return std::chrono::weekday{d}.iso_encoding();
}

inline Days iso_week_monday(Days d) {
  return d - std::chrono::days{iso_weekday(d) - 1};
}

// Returns (ISO year, ISO week) of a day. The ISO year is the year that
// contains the Thursday of the day's week.
inline std::pair<int, unsigned> iso_week_of(Days d) {
  Days thursday = iso_week_monday(d) + std::chrono::days{3};
  Date thu{thursday};
  int iso_year = static_cast<int>(thu.year());
  Days jan1{std::chrono::year{iso_year} / std::chrono::January / 1};
  auto week = static_cast<unsigned>((thursday - jan1).count() / 7 + 1);
  return {iso_year, week};
}

inline Days iso_week_start(int iso_year, unsigned week) {
  Days jan4{std::chrono::year{iso_year} / std::chrono::January / 4};
  return iso_week_monday(jan4) + std::chrono::days{7 * (week - 1)};
}

inline unsigned iso_weeks_in_year(int iso_year) {
  // December 28 always falls in the last ISO week of its year.
  Days dec28{std::chrono::year{iso_year} / std::chrono::December / 28};
  return iso_week_of(dec28).second;
}

}  // namespace detail

// Parses a strict "YYYY-MM-DD" calendar date.
inline std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
  if (!detail::all_digits(y) || !detail::all_digits(m) ||
      !detail::all_digits(d)) {
    return std::nullopt;
  }
  Date date{std::chrono::year{detail::to_int(y)},
            std::chrono::month{static_cast<unsigned>(detail::to_int(m))},
            std::chrono::day{static_cast<unsigned>(detail::to_int(d))}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(Date d) {
  return detail::pad(static_cast<int>(d.year()), 4) + "-" +
         detail::pad(static_cast<int>(static_cast<unsigned>(d.month())), 2) +
         "-" + detail::pad(static_cast<int>(static_cast<unsigned>(d.day())), 2);
}

// Builds the slice of granularity `g` that contains `date`.
inline TimeSlice make_slice(Date date, Granularity g) {
  using namespace std::chrono;
  Days day{date};
  const int y = static_cast<int>(date.year());
  switch (g) {
    case Granularity::kDay:
      return {g, format_date(date), day, day + days{1}};
    case Granularity::kWeek: {
      auto [iso_year, week] = detail::iso_week_of(day);
      Days start = detail::iso_week_start(iso_year, week);
      return {g,
              detail::pad(iso_year, 4) + "-W" +
                  detail::pad(static_cast<int>(week), 2),
              start, start + days{7}};
    }
    case Granularity::kMonth: {
      year_month ym{date.year(), date.month()};
      Days start{ym / 1};
      Days end{(ym + months{1}) / 1};
      return {g,
              detail::pad(y, 4) + "-" +
                  detail::pad(static_cast<int>(
                                  static_cast<unsigned>(date.month())),
                              2),
              start, end};
    }
    case Granularity::kYear: {
      Days start{date.year() / January / 1};
      Days end{(date.year() + years{1}) / January / 1};
      return {g, detail::pad(y, 4), start, end};
    }
  }
  throw Error(Errc::kInvalidArgument, "unknown granularity");
}

inline std::string slice_of(Date date, Granularity g) {
  return make_slice(date, g).label;
}

// Parses any canonical label ("YYYY", "YYYY-MM", "YYYY-Www", "YYYY-MM-DD").
// The granularity is implied by the label's shape.
inline TimeSlice parse_slice_label(std::string_view label) {
  using namespace std::chrono;
  auto fail = [&]() -> TimeSlice {
    throw Error(Errc::kInvalidLabel,
                "not a canonical slice label: '" + std::string(label) + "'");
  };
  if (label.size() < 4 || !detail::all_digits(label.substr(0, 4))) fail();
  const int y = detail::to_int(label.substr(0, 4));
  if (y < detail::kMinYear) fail();

  if (label.size() == 4) {
    return make_slice(year{y} / January / 1, Granularity::kYear);
  }
  if (label.size() == 7 && label[4] == '-' &&
      detail::all_digits(label.substr(5, 2))) {
    const int m = detail::to_int(label.substr(5, 2));
    if (m < 1 || m > 12) fail();
    return make_slice(year{y} / month{static_cast<unsigned>(m)} / 1,
                      Granularity::kMonth);
  }
  if (label.size() == 8 && label.substr(4, 2) == "-W" &&
      detail::all_digits(label.substr(6, 2))) {
    const int w = detail::to_int(label.substr(6, 2));
    if (w < 1 || static_cast<unsigned>(w) > detail::iso_weeks_in_year(y)) {
      fail();
    }
    Days start = detail::iso_week_start(y, static_cast<unsigned>(w));
    return make_slice(Date{start}, Granularity::kWeek);
  }
  if (label.size() == 10) {
    auto d = parse_date(label);
    if (!d) fail();
    return make_slice(*d, Granularity::kDay);
  }
  return fail();
}

// Labels of the slices immediately before and after `label`, of the same
// granularity. Existence of models for them is not checked.
inline std::pair<std::string, std::string> neighbor_slices(
    std::string_view label) {
  using namespace std::chrono;
  TimeSlice slice = parse_slice_label(label);
  Date before{slice.start - days{1}};
  Date after{slice.end};
  auto in_range = [](Date d) {
    const int y = static_cast<int>(d.year());
    return y >= detail::kMinYear && y <= detail::kMaxYear;
  };
  if (!in_range(before) || !in_range(after)) {
    throw Error(Errc::kInvalidLabel,
                "neighbors of '" + std::string(label) + "' are out of range");
  }
  return {slice_of(before, slice.granularity),
          slice_of(after, slice.granularity)};
}

}  // namespace tempent
