#include "tokbias/utf8.hpp"

#include <unicode/utf8.h>

#include <cstdint>
#include <cstdio>

namespace tokbias::utf8 {
namespace {

// Returns the length of the sequence starting at `i`, or 0 if invalid.
std::size_t sequence_length(std::string_view bytes, std::size_t i) noexcept {
  const auto* s = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto n = static_cast<std::int32_t>(bytes.size());
  auto pos = static_cast<std::int32_t>(i);
  const auto start = pos;
  UChar32 c = 0;
  U8_NEXT(s, pos, n, c);
  if (c < 0) return 0;
  return static_cast<std::size_t>(pos - start);
}

}  // namespace

bool is_valid(std::string_view bytes) noexcept {
  for (std::size_t i = 0; i < bytes.size();) {
    const auto len = sequence_length(bytes, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::optional<std::size_t> char_count(std::string_view bytes) noexcept {
  std::size_t count = 0;
  for (std::size_t i = 0; i < bytes.size(); ++count) {
    const auto len = sequence_length(bytes, i);
    if (len == 0) return std::nullopt;
    i += len;
  }
  return count;
}

std::vector<char32_t> code_points(std::string_view bytes) {
  std::vector<char32_t> out;
  out.reserve(bytes.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto n = static_cast<std::int32_t>(bytes.size());
  for (std::int32_t pos = 0; pos < n;) {
    UChar32 c = 0;
    U8_NEXT(s, pos, n, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::vector<std::string_view> split_chars(std::string_view bytes) {
  std::vector<std::string_view> out;
  out.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size();) {
    auto len = sequence_length(bytes, i);
    if (len == 0) len = 1;
    out.push_back(bytes.substr(i, len));
    i += len;
  }
  return out;
}

void append(std::string& out, char32_t cp) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string escape_invalid(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size();) {
    const auto len = sequence_length(bytes, i);
    if (len == 0) {
      char hex[5];
      std::snprintf(hex, sizeof hex, "\\x%02X", static_cast<unsigned char>(bytes[i]));
      out += hex;
      ++i;
    } else {
      out.append(bytes.substr(i, len));
      i += len;
    }
  }
  return out;
}

}  // namespace tokbias::utf8
