#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace idsfx {

// Versioned JSON files: the document text, a newline, then a line
// "crc32:xxxxxxxx" holding the CRC-32 of the document bytes.
inline constexpr std::string_view kFormatVersion = "1.0";

std::uint32_t crc32_of(std::string_view bytes);
std::string hex32(std::uint32_t value);

std::string seal_json(const nlohmann::ordered_json& doc);
// Verifies the checksum, parses, and checks that "format_version" has the
// supported major version. IntegrityError on a bad or missing checksum,
// VersionError on a different major version.
nlohmann::ordered_json unseal_json(std::string_view text, std::string_view what);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace idsfx
