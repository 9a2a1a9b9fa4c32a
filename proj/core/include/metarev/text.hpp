#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace metarev::text {

std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

/// Lowercases and collapses runs of whitespace, '_' and '-' into single
/// spaces, so "Strong_positive", "strong-POSITIVE" and "Strong positive"
/// all normalize to "strong positive".
std::string normalize_label(std::string_view s);

/// Number of Unicode scalar values in a UTF-8 string. Bytes that are not
/// valid continuation leads count as one scalar each, so the result is
/// total even on malformed input.
std::size_t utf8_length(std::string_view s);

/// Byte offset of the code point with index `cp_index` (clamped to the end
/// of the string when past it).
std::size_t utf8_byte_offset(std::string_view s, std::size_t cp_index);

/// Substring addressed in code points, [cp_start, cp_end).
std::string utf8_substr(std::string_view s, std::size_t cp_start, std::size_t cp_end);

}  // namespace metarev::text
