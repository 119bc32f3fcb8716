#pragma once

#include <string>
#include <string_view>

namespace cuefuse {

/// Lowercase hex SHA-256 of `data`.
[[nodiscard]] std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes. Throws IoError.
[[nodiscard]] std::string file_sha256_hex(const std::string& path);

}  // namespace cuefuse
