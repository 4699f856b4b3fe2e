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

#ifndef REDLAB_CSV_HPP
#define REDLAB_CSV_HPP

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace redlab {

/// Minimal CSV emitter. Doubles are printed with %.17g so files round-trip
/// and are byte-stable for identical inputs.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header)
      : os_(os), columns_(header.size()) {
    bool first = true;
    for (auto h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... values) {
    static_assert(sizeof...(Ts) > 0);
    bool first = true;
    ((write_cell(values, first)), ...);
    os_ << '\n';
  }

  std::size_t columns() const { return columns_; }

  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  template <class T>
  void write_cell(const T& v, bool& first) {
    if (!first) os_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      os_ << format(static_cast<double>(v));
    } else {
      os_ << v;
    }
  }

  std::ostream& os_;
  std::size_t columns_;
};

}  // namespace redlab

#endif  // REDLAB_CSV_HPP
