#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skewcert/skew_map.hpp"

namespace skewcert {

/// Parses "1.4+0.75i", "-0.5", "2i", "-i", "1e-3-2e-2i". Throws std::invalid_argument.
Complex parse_complex(std::string_view text);

/// Parses "a=..,b=..,c=..,e=.." (missing coefficients are zero).
SkewMap parse_map_spec(std::string_view text);

// Coefficient file:
//   SKEWMAP v1
//   a <re> <im>          hex floats; likewise b, c, e
//   crc32 <8 hex digits>
std::string serialize_map(const SkewMap& m);
/// Accepts the coefficient file above or a bare map spec.
SkewMap parse_map_file(std::string_view text);

/// Entry point of the command-line tool; returns the process exit code:
/// 0 done (or verified), 2 not verified at resolution, 1 usage or IO error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skewcert
