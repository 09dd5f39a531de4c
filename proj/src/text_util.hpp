#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ontoreveal::text_util {

std::string trim(std::string_view text);

/// UTF-8 encoding of a Unicode scalar value; nullopt for surrogates or
/// values beyond U+10FFFF.
std::optional<std::string> encode_utf8(std::uint32_t code_point);

/// Number of code points, counting every byte that is not a continuation byte.
std::size_t count_scalars(std::string_view text);

/// Single character rendered for an error message ("\x07" for controls).
std::string printable(unsigned char c);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace ontoreveal::text_util
