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

#ifndef CONNSHIFT_ERROR_H_
#define CONNSHIFT_ERROR_H_

#include <stdexcept>
#include <string>

namespace connshift {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing files, unreadable directories, short writes.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a documented invariant (bad rows, missing
// connectives where one is required, out-of-range indices).
class DataError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or incomplete configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. predicting with an untrained model.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A statistic that is undefined for the given input (zero variance, n = 0).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace connshift

#endif  // CONNSHIFT_ERROR_H_
