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


#include "connshift/nn/checkpoint.h"

#include <cstdint>
#include <fstream>

#include "connshift/error.h"

namespace connshift::nn {
namespace {

constexpr char kMagic[] = "CONNSHIFT-CHECKPOINT";

std::ifstream OpenForRead(const std::filesystem::path& path,
                          nlohmann::json& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) {
    throw DataError(path.string() + " is not a connshift checkpoint");
  }
  std::uint64_t size = 0;
  in.read(reinterpret_cast<char*>(&size), sizeof(size));
  std::string text(size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(size));
  if (!in) throw DataError("truncated checkpoint header in " + path.string());
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt checkpoint header: " + std::string(e.what()));
  }
  if (header.value("version", 0) != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version in " + path.string());
  }
  return in;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, nlohmann::json header,
                    std::span<const Parameter* const> params) {
  header["version"] = kCheckpointVersion;
  nlohmann::json tensors = nlohmann::json::array();
  for (const Parameter* p : params) {
    tensors.push_back(
        {{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  }
  header["tensors"] = std::move(tensors);
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << kMagic << '\n';
  const std::uint64_t size = text.size();
  out.write(reinterpret_cast<const char*>(&size), sizeof(size));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Parameter* p : params) {
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

nlohmann::json ReadCheckpointHeader(const std::filesystem::path& path) {
  nlohmann::json header;
  OpenForRead(path, header);
  return header;
}

nlohmann::json LoadCheckpoint(const std::filesystem::path& path,
                              std::span<Parameter* const> params) {
  nlohmann::json header;
  std::ifstream in = OpenForRead(path, header);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != params.size()) {
    throw DataError("checkpoint has " + std::to_string(tensors.size()) +
                    " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    const auto& t = tensors[i];
    if (t.at("name").get<std::string>() != p.name ||
        t.at("rows").get<Eigen::Index>() != p.value.rows() ||
        t.at("cols").get<Eigen::Index>() != p.value.cols()) {
      throw DataError("checkpoint tensor " + t.at("name").get<std::string>() +
                      " does not match model tensor " + p.name);
    }
    in.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    p.ZeroGrad();
    p.adam_m.resize(0, 0);
    p.adam_v.resize(0, 0);
  }
  if (!in) throw DataError("truncated checkpoint " + path.string());
  return header;
}

}  // namespace connshift::nn
