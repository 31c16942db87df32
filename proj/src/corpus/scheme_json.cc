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


#include "connshift/corpus/scheme_json.h"

#include "connshift/error.h"
#include "connshift/hash.h"

namespace connshift::corpus {

nlohmann::json SchemeToJson(const LabelScheme& scheme) {
  return {{"name", scheme.name()},
          {"level", std::string(ToString(scheme.level()))},
          {"labels", scheme.labels()},
          {"parent_map", scheme.parent_map()},
          {"fingerprint", HexDigest(scheme.Fingerprint())}};
}

LabelScheme SchemeFromJson(const nlohmann::json& j) {
  try {
    return LabelScheme(
        j.at("name").get<std::string>(),
        SchemeLevelFromString(j.at("level").get<std::string>()),
        j.at("labels").get<std::vector<std::string>>(),
        j.value("parent_map", std::map<std::string, std::string>{}));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed label scheme: " + std::string(e.what()));
  }
}

}  // namespace connshift::corpus
