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

// Minimal TOML-style `key = value` reader used for configs and dataset
// descriptors. `[section]` headers prefix the following keys with
// "section.". Values may be bare or double-quoted; '#' starts a comment.

#ifndef CROWDGROUPS_KEYVALUE_H_
#define CROWDGROUPS_KEYVALUE_H_

#include <map>
#include <optional>
#include <string>

namespace crowdgroups {

class KeyValues {
 public:
  static KeyValues Parse(const std::string& text,
                         const std::string& source = "<text>");
  static KeyValues Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;
  // Typed getters throw ConfigError when the value does not parse.
  std::optional<double> GetDouble(const std::string& key) const;
  std::optional<long long> GetInt(const std::string& key) const;
  std::optional<bool> GetBool(const std::string& key) const;

  void Set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
  }
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::string source_ = "<text>";
  std::map<std::string, std::string> values_;
};

}  // namespace crowdgroups

#endif  // CROWDGROUPS_KEYVALUE_H_
