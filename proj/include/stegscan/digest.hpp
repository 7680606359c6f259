#pragma once

#include <array>
#include <memory>
#include <string>

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include "stegscan/bytes.hpp"

namespace stegscan {

struct DigestSet {
  std::string md5;
  std::string sha1;
  std::string sha256;

  bool operator==(const DigestSet&) const = default;
};

namespace detail {

inline std::string hex_lower(const unsigned char* data, std::size_t len) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 15]);
  }
  return out;
}

inline std::string evp_digest(const EVP_MD* md, ByteView input) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1)
    throw InternalError("digest computation failed");
  return hex_lower(out.data(), len);
}

}  // namespace detail

// Pays the one-time crypto library and provider load up front. Optional:
// the first digest call does the same thing implicitly.
inline void init_digests() {
  OPENSSL_init_crypto(OPENSSL_INIT_LOAD_CONFIG, nullptr);
  for (const EVP_MD* md : {EVP_md5(), EVP_sha1(), EVP_sha256()}) detail::evp_digest(md, {});
}

inline std::string md5_hex(ByteView input) { return detail::evp_digest(EVP_md5(), input); }

inline DigestSet compute_digests(ByteView input) {
  return {detail::evp_digest(EVP_md5(), input), detail::evp_digest(EVP_sha1(), input),
          detail::evp_digest(EVP_sha256(), input)};
}

}  // namespace stegscan
