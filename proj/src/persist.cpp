#include "idsfx/persist.hpp"

#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "idsfx/error.hpp"

namespace idsfx {

namespace {

constexpr std::string_view kCrcPrefix = "crc32:";

int major_of(std::string_view version) {
    const auto dot = version.find('.');
    const auto head = version.substr(0, dot);
    if (head.empty() || head.find_first_not_of("0123456789") != std::string_view::npos) {
        return -1;
    }
    return std::stoi(std::string(head));
}

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large buffers in pieces.
    const char* p = bytes.data();
    std::size_t left = bytes.size();
    while (left > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(p), chunk);
        p += chunk;
        left -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t value) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", value);
    return buf;
}

std::string seal_json(const nlohmann::ordered_json& doc) {
    std::string text = doc.dump();
    const std::string crc = hex32(crc32_of(text));
    text += '\n';
    text += kCrcPrefix;
    text += crc;
    text += '\n';
    return text;
}

nlohmann::ordered_json unseal_json(std::string_view text, std::string_view what) {
    const std::string name(what);
    if (text.empty()) throw IntegrityError(name + ": file is empty");
    std::string_view body = text;
    if (body.back() == '\n') body.remove_suffix(1);
    const auto nl = body.rfind('\n');
    if (nl == std::string_view::npos || body.substr(nl + 1, kCrcPrefix.size()) != kCrcPrefix) {
        throw IntegrityError(name + ": checksum line missing (file truncated?)");
    }
    const std::string_view stored = body.substr(nl + 1 + kCrcPrefix.size());
    const std::string_view doc = body.substr(0, nl);
    const std::string actual = hex32(crc32_of(doc));
    if (stored != actual) {
        throw IntegrityError(name + ": checksum mismatch (stored " + std::string(stored) +
                             ", computed " + actual + ")");
    }
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(doc);
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(name + ": malformed document: " + e.what());
    }
    if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_string()) {
        throw IntegrityError(name + ": no format_version field");
    }
    const auto version = j["format_version"].get<std::string>();
    if (major_of(version) != major_of(kFormatVersion)) {
        throw VersionError(name + ": format version " + version + " is not readable by this " +
                           "build (supports " + std::string(kFormatVersion) +
                           "); upgrade idsfx or re-create the file");
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError("failed writing " + path.string() + ": " + std::strerror(errno));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

}  // namespace idsfx
