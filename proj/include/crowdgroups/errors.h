// Copyright 2026 The Crowdgroups Authors.
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

#ifndef CROWDGROUPS_ERRORS_H_
#define CROWDGROUPS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace crowdgroups {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based, or 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input whose content is inconsistent (duplicate samples, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or run setup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace crowdgroups

#endif  // CROWDGROUPS_ERRORS_H_
