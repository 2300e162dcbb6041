#include "skewcert/text_format.hpp"

#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace skewcert::textfmt {

std::string hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_double(std::string_view s) {
    const std::string tmp(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) throw FormatError("bad number '" + tmp + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view s) {
    const std::string tmp(s);
    if (tmp.empty() || tmp.find_first_not_of("0123456789") != std::string::npos) {
        throw FormatError("bad unsigned integer '" + tmp + "'");
    }
    errno = 0;
    const unsigned long long v = std::strtoull(tmp.c_str(), nullptr, 10);
    if (errno == ERANGE) throw FormatError("integer out of range '" + tmp + "'");
    return v;
}

std::uint32_t crc32(std::string_view bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in slices.
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t len = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), static_cast<uInt>(len));
        pos += len;
    }
    return static_cast<std::uint32_t>(crc);
}

std::string seal(std::string body) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "crc32 %08x\n", crc32(body));
    body += buf;
    return body;
}

std::vector<std::string> unseal(std::string_view text) {
    if (text.size() < 2 || text.back() != '\n') throw FormatError("truncated file (no trailing newline)");
    const std::size_t last_start = text.rfind('\n', text.size() - 2);
    const std::size_t body_len = last_start == std::string_view::npos ? 0 : last_start + 1;
    const std::string_view trailer = text.substr(body_len, text.size() - body_len - 1);
    const auto parts = split_ws(trailer);
    if (parts.size() != 2 || parts[0] != "crc32") throw FormatError("missing crc32 trailer");
    const std::string want(parts[1]);
    char* end = nullptr;
    const unsigned long stored = std::strtoul(want.c_str(), &end, 16);
    if (want.size() != 8 || end != want.c_str() + want.size()) throw FormatError("malformed crc32 trailer");
    const std::string_view body = text.substr(0, body_len);
    if (crc32(body) != stored) throw FormatError("checksum mismatch");

    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < body.size()) {
        const std::size_t nl = body.find('\n', pos);
        lines.emplace_back(body.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace skewcert::textfmt
