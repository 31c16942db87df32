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


#ifndef CONNSHIFT_CORPUS_SCHEME_JSON_H_
#define CONNSHIFT_CORPUS_SCHEME_JSON_H_

#include <json.hpp>

#include "connshift/corpus/types.h"

namespace connshift::corpus {

nlohmann::json SchemeToJson(const LabelScheme& scheme);
// Throws DataError on a malformed object.
LabelScheme SchemeFromJson(const nlohmann::json& j);

}  // namespace connshift::corpus

#endif  // CONNSHIFT_CORPUS_SCHEME_JSON_H_
