#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skewcert/box.hpp"

namespace skewcert {

/// Malformed, truncated, corrupted or wrong-version artifact file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace textfmt {

/// C99 hexadecimal float ("%a"); parses back bit for bit.
std::string hex(double x);
double parse_double(std::string_view s);
std::uint64_t parse_uint(std::string_view s);

std::uint32_t crc32(std::string_view bytes);

/// Appends "crc32 <8 hex digits>\n" covering everything before it.
std::string seal(std::string body);

/// Checks and strips the trailing crc32 line; returns the body lines.
std::vector<std::string> unseal(std::string_view text);

std::vector<std::string_view> split_ws(std::string_view line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace textfmt
}  // namespace skewcert
