// Copyright 2026 The compvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace compvec {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kConfig,     // bad parameters or settings
  kData,       // malformed input files, parse/encoding problems, lookups
  kDivergence  // non-finite values during training
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::kConfig, w) {}
};

/// Precondition on a numeric range (k > D, n > min(N, D), alpha outside [0,1]...).
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error(ErrorKind::kConfig, w) {}
};

struct DataError : Error {
  explicit DataError(const std::string& w) : Error(ErrorKind::kData, w) {}
};

struct ParseError : DataError {
  ParseError(const std::string& source, std::size_t line, const std::string& w)
      : DataError(source + ":" + std::to_string(line) + ": " + w), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct EncodingError : DataError {
  using DataError::DataError;
};

struct FormatError : DataError {
  using DataError::DataError;
};

struct LookupError : DataError {
  using DataError::DataError;
};

/// Feature-width or composite-layout mismatch between fitted and applied data.
struct LayoutError : DataError {
  using DataError::DataError;
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& w) : Error(ErrorKind::kDivergence, w) {}
};

}  // namespace compvec
