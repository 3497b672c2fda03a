#pragma once

#include <string>
#include <string_view>

namespace fcc {

/// `0x` followed by exactly `hex_digits` hexadecimal characters (any case).
bool is_prefixed_hex(std::string_view text, std::size_t hex_digits);

inline bool is_wallet_address(std::string_view text) { return is_prefixed_hex(text, 40); }
inline bool is_tx_hash(std::string_view text) { return is_prefixed_hex(text, 64); }

std::string to_lower(std::string_view text);
std::string to_upper(std::string_view text);

/// Lower-case hex rendering of raw bytes.
std::string hex_encode(std::string_view bytes);

}  // namespace fcc
