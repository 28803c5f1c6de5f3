// Copyright 2026 The qread Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QREAD_TEXT_FORMAT_H
#define QREAD_TEXT_FORMAT_H

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qread {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

using Value = std::variant<std::string, std::int64_t, std::uint64_t, double, bool>;

std::string format_value(const Value& v);

/// A result table: header plus records, written as CSV or a JSON array.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;

    void add(std::vector<Value> row);
};

/// Ordered metric -> value pairs.
using Summary = std::vector<std::pair<std::string, Value>>;

std::string to_csv(const Table& table);
std::string to_json(const Table& table);
std::string to_csv(const Summary& summary);
std::string to_json(const Summary& summary);

}  // namespace qread

#endif  // QREAD_TEXT_FORMAT_H
