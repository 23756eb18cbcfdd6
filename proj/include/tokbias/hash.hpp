#pragma once

#include <string>
#include <string_view>

namespace tokbias {

/// First 16 hex digits of SHA-256(data). Stable across platforms and runs.
std::string stable_hash(std::string_view data);

}  // namespace tokbias
