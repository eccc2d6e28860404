#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace intan {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
/// SHA-256 of a file's bytes; throws FileUnreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace intan
