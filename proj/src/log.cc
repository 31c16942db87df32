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

#include "connshift/log.h"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <utility>

namespace connshift {
namespace {

std::mutex& SinkMutex() {
  static std::mutex mu;
  return mu;
}

void DefaultSink(LogLevel level, std::string_view message) {
  if (level == LogLevel::kWarning) {
    std::cerr << "[warning] " << message << '\n';
  } else if (std::getenv("CONNSHIFT_VERBOSE") != nullptr) {
    std::cerr << "[info] " << message << '\n';
  }
}

LogSink& Sink() {
  static LogSink sink = DefaultSink;
  return sink;
}

void Emit(LogLevel level, std::string_view message) {
  std::lock_guard<std::mutex> lock(SinkMutex());
  if (Sink()) Sink()(level, message);
}

}  // namespace

LogSink SetLogSink(LogSink sink) {
  std::lock_guard<std::mutex> lock(SinkMutex());
  return std::exchange(Sink(), sink ? std::move(sink) : LogSink(DefaultSink));
}

void LogInfo(std::string_view message) { Emit(LogLevel::kInfo, message); }

void LogWarning(std::string_view message) {
  Emit(LogLevel::kWarning, message);
}

}  // namespace connshift
