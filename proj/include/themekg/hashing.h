#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace themekg {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

uint64_t fnv1a64(std::string_view data);

// SplitMix64 step; advances state and returns the next output.
uint64_t splitmix64(uint64_t &state);

}  // namespace themekg
