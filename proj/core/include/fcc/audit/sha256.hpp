#pragma once

#include <string>
#include <string_view>

namespace fcc::audit {

/// SHA-256 of `data`, lower-case hex (64 chars).
std::string sha256_hex(std::string_view data);

inline const std::string kGenesisHash(64, '0');

}  // namespace fcc::audit
