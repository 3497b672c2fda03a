#include "fcc/audit/sha256.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "fcc/common/error.hpp"
#include "fcc/common/hex.hpp"

namespace fcc::audit {

namespace {

// Fetched once; the implicit fetch behind EVP_sha256() costs more than
// hashing a short record.
const EVP_MD* sha256_md() {
  static const std::unique_ptr<EVP_MD, decltype(&EVP_MD_free)> md(EVP_MD_fetch(nullptr, "SHA256", nullptr),
                                                                 &EVP_MD_free);
  if (!md) throw Error(ErrorCode::IoError, "sha256 unavailable");
  return md.get();
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, sha256_md(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "sha256 digest failed");
  }
  return hex_encode(std::string_view(reinterpret_cast<const char*>(digest.data()), length));
}

}  // namespace fcc::audit
