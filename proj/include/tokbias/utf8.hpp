#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokbias::utf8 {

/// True when `bytes` is well-formed UTF-8 (no overlongs, surrogates or
/// truncated sequences).
bool is_valid(std::string_view bytes) noexcept;

/// Number of code points, or nullopt if `bytes` is not valid UTF-8.
std::optional<std::size_t> char_count(std::string_view bytes) noexcept;

/// Decodes to code points. Precondition: is_valid(bytes).
std::vector<char32_t> code_points(std::string_view bytes);

/// Splits into one view per code point. Precondition: is_valid(bytes).
std::vector<std::string_view> split_chars(std::string_view bytes);

void append(std::string& out, char32_t cp);

/// `\xHH` (uppercase) for every byte that is not part of a valid UTF-8
/// sequence; valid sequences are copied through.
std::string escape_invalid(std::string_view bytes);

}  // namespace tokbias::utf8
