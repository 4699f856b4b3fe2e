// Copyright 2026 The Redaction Lab Authors. All Rights Reserved.
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

// Manifest reading: JSON parameter blocks with strict key checking.

#ifndef REDLAB_TOOLS_MANIFEST_HPP
#define REDLAB_TOOLS_MANIFEST_HPP

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace redlab::cli {

using Json = nlohmann::json;

/// Schema violation; mapped to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed reader over one parameter block. Every key must be consumed;
/// finish() rejects leftovers so typos fail before any work starts.
class Block {
 public:
  Block(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_null() && !j_.is_object()) {
      throw ConfigError("block '" + name_ + "' must be an object");
    }
  }

  double number(const std::string& key, double fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail(key, "a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t min) {
    const Json* v = find(key);
    std::int64_t out = fallback;
    if (v != nullptr) {
      if (!v->is_number_integer()) fail(key, "an integer");
      out = v->get<std::int64_t>();
    }
    if (out < min) fail(key, "an integer >= " + std::to_string(min));
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(key, "true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback,
                   const std::vector<std::string>& allowed = {}) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(key, "a string");
    const auto s = v->get<std::string>();
    if (!allowed.empty()) {
      bool ok = false;
      std::string list;
      for (const auto& a : allowed) {
        ok = ok || a == s;
        list += (list.empty() ? "" : "|") + a;
      }
      if (!ok) fail(key, "one of " + list);
    }
    return s;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) fail(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) fail(key, "an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) fail(key, "an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) fail(key, "an array of integers");
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }

  void finish() const {
    if (!j_.is_object()) return;
    for (const auto& [k, _] : j_.items()) {
      if (!used_.contains(k)) throw ConfigError("unknown key '" + name_ + "." + k + "'");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("'" + name_ + "." + key + "' must be " + what);
  }

 private:
  const Json* find(const std::string& key) {
    used_.insert(key);
    if (!j_.is_object()) return nullptr;
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& j_;
  std::string name_;
  std::set<std::string> used_;
};

}  // namespace redlab::cli

#endif  // REDLAB_TOOLS_MANIFEST_HPP
