#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intan {

/// A Gregorian calendar month. Ordering is lexicographic on (year, month).
struct CalendarMonth {
  int year = 1970;
  int month = 1;

  constexpr CalendarMonth() = default;
  constexpr CalendarMonth(int y, int m) : year(y), month(m) {}

  /// Months since year 0, January. Adding months is integer addition on this index.
  constexpr long index() const noexcept { return static_cast<long>(year) * 12 + (month - 1); }

  static constexpr CalendarMonth from_index(long idx) noexcept {
    long y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
    return {static_cast<int>(y), static_cast<int>(idx - y * 12) + 1};
  }

  constexpr CalendarMonth plus(long n) const noexcept { return from_index(index() + n); }

  constexpr bool valid() const noexcept { return month >= 1 && month <= 12; }

  constexpr auto operator<=>(const CalendarMonth&) const = default;

  /// "YYYY-MM"
  std::string str() const;
  /// Parses "YYYY-MM"; throws Error(InvalidConfig) on malformed input.
  static CalendarMonth parse(std::string_view text);
};

/// Inclusive month range.
struct MonthWindow {
  CalendarMonth start;
  CalendarMonth end;

  constexpr long size() const noexcept {
    return end.index() < start.index() ? 0 : end.index() - start.index() + 1;
  }
  constexpr bool contains(CalendarMonth m) const noexcept { return start <= m && m <= end; }
  constexpr bool contains(const MonthWindow& w) const noexcept {
    return contains(w.start) && contains(w.end);
  }
  constexpr bool overlaps(const MonthWindow& w) const noexcept {
    return !(w.end < start || end < w.start);
  }
  std::vector<CalendarMonth> months() const;
  constexpr auto operator<=>(const MonthWindow&) const = default;

  /// "YYYY-MM..YYYY-MM"
  std::string str() const;
  static MonthWindow parse(std::string_view text);
};

/// Months of `window` that do not fall in `excluded`, in ascending order.
std::vector<CalendarMonth> months_excluding(const MonthWindow& window,
                                            const std::optional<MonthWindow>& excluded);

}  // namespace intan
