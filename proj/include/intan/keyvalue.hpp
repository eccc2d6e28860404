#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "intan/error.hpp"

namespace intan {

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Parses `key = value` lines. Blank lines and lines starting with '#' are skipped; keys and
/// values are trimmed. A line without '=' or a repeated key throws `code`.
std::vector<KeyValue> parse_key_values(std::string_view text, ErrorCode code);

/// Comma-separated numbers; throws `code` mentioning `key` on malformed input.
std::vector<double> parse_number_list(std::string_view value, std::string_view key, ErrorCode code);

}  // namespace intan
