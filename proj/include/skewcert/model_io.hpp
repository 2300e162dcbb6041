#pragma once

#include <string>

#include "skewcert/boxgraph.hpp"
#include "skewcert/text_format.hpp"

namespace skewcert {

// Line-oriented model format:
//
//   BCRM v1
//   kind base|fibered
//   map <a.re> <a.im> <b.re> <b.im> <c.re> <c.im> <e.re> <e.im>
//   zgrid <half-width> <level>
//   wgrid <half-width> <level>          (fibered only)
//   delta <delta>
//   timestamp <unsigned>
//   dropped <unsigned>
//   components <count>
//   component <id> <V> <E>
//   v <z-cell> [<w-cell>]               V lines, ascending
//   e <k> <j>                           E lines, local vertex indices
//   crc32 <8 hex digits>
//
// Every real number is a hex float, so a load reproduces the model bit for bit.

std::string serialize_model(const ChainModel& model);
/// Throws FormatError on version mismatch, malformed content or bad checksum.
ChainModel parse_model(std::string_view text);

void save_model(const ChainModel& model, const std::string& path);
ChainModel load_model(const std::string& path);

}  // namespace skewcert
