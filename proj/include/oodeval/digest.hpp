// Copyright 2026 The oodeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// SHA-256 digests for report provenance. Requires linking OpenSSL::Crypto.

#ifndef OODEVAL_DIGEST_HPP_
#define OODEVAL_DIGEST_HPP_

#include <openssl/evp.h>

#include <filesystem>
#include <string>
#include <string_view>

#include "oodeval/io.hpp"
#include "oodeval/types.hpp"

namespace oodeval {

inline std::string Sha256Hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

inline std::string FileSha256(const std::filesystem::path& path) {
  return Sha256Hex(internal::ReadFile(path));
}

}  // namespace oodeval

#endif  // OODEVAL_DIGEST_HPP_
