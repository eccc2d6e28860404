#include "intan/keyvalue.hpp"

#include <set>

#include "intan/csv.hpp"

namespace intan {

std::vector<KeyValue> parse_key_values(std::string_view text, ErrorCode code) {
  std::vector<KeyValue> out;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = csv::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(code, "line " + std::to_string(line_no) + ": expected key = value");
    }
    KeyValue kv{std::string(csv::trim(line.substr(0, eq))), std::string(csv::trim(line.substr(eq + 1))), line_no};
    if (kv.key.empty()) throw Error(code, "line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(kv.key).second) throw Error(code, "line " + std::to_string(line_no) + ": repeated key " + kv.key);
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<double> parse_number_list(std::string_view value, std::string_view key, ErrorCode code) {
  std::vector<double> out;
  for (const auto& item : csv::split(value, ',')) {
    auto v = csv::parse_double(csv::trim(item));
    if (!v) throw Error(code, std::string(key) + ": '" + item + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

}  // namespace intan
