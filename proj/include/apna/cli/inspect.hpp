#pragma once

// Field dumps of wire objects, one "offset  name  value" line per field.

#include <string>
#include <string_view>

#include "apna/bytes.hpp"

namespace apna::cli {

enum class InspectKind { Header, EphId, Cert, Gre };

/// Throws Error{ParseError} for an unknown kind name.
InspectKind parse_inspect_kind(std::string_view name);

/// Throws Error{ParseError} with the offset of the problem, e.g. "truncated
/// header: 20 of 56 bytes, 36 missing at offset 20".
std::string inspect(InspectKind kind, ByteView bytes);
std::string inspect_json(InspectKind kind, ByteView bytes);

}  // namespace apna::cli
