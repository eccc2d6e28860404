#include "intan/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "intan/error.hpp"

namespace intan {

namespace {

int parse_component(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::InvalidConfig, "malformed month '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::string CalendarMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

CalendarMonth CalendarMonth::parse(std::string_view text) {
  auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig, "malformed month '" + std::string(text) + "'");
  }
  CalendarMonth m{parse_component(text.substr(0, dash), text),
                  parse_component(text.substr(dash + 1), text)};
  if (!m.valid()) {
    throw Error(ErrorCode::InvalidConfig, "month out of range in '" + std::string(text) + "'");
  }
  return m;
}

std::vector<CalendarMonth> MonthWindow::months() const {
  std::vector<CalendarMonth> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (long i = start.index(); i <= end.index(); ++i) out.push_back(CalendarMonth::from_index(i));
  return out;
}

std::string MonthWindow::str() const { return start.str() + ".." + end.str(); }

MonthWindow MonthWindow::parse(std::string_view text) {
  auto sep = text.find("..");
  if (sep == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig, "malformed window '" + std::string(text) + "'");
  }
  MonthWindow w{CalendarMonth::parse(text.substr(0, sep)), CalendarMonth::parse(text.substr(sep + 2))};
  if (w.end < w.start) {
    throw Error(ErrorCode::InvalidConfig, "window ends before it starts: '" + std::string(text) + "'");
  }
  return w;
}

std::vector<CalendarMonth> months_excluding(const MonthWindow& window,
                                            const std::optional<MonthWindow>& excluded) {
  std::vector<CalendarMonth> out;
  for (auto m : window.months()) {
    if (!excluded || !excluded->contains(m)) out.push_back(m);
  }
  return out;
}

}  // namespace intan
