// Copyright 2026 The connshift Authors.
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

#ifndef CONNSHIFT_HASH_H_
#define CONNSHIFT_HASH_H_

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace connshift {

// FNV-1a, used for on-disk fingerprints that must not depend on the
// standard library implementation.
class Fnv1a64 {
 public:
  Fnv1a64& Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  // Field separator so that ("ab","c") and ("a","bc") hash differently.
  Fnv1a64& Field(std::string_view bytes) {
    Update(bytes);
    return Update(std::string_view("\x1f", 1));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string HexDigest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace connshift

#endif  // CONNSHIFT_HASH_H_
