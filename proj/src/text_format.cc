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

#include "qread/text_format.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace qread {

std::string format_real(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

std::string format_value(const Value& v) {
    struct Visitor {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(std::uint64_t u) const { return std::to_string(u); }
        std::string operator()(double d) const { return format_real(d); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{}, v);
}

void Table::add(std::vector<Value> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("Table::add: record width does not match the header");
    }
    rows.push_back(std::move(row));
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

nlohmann::ordered_json json_value(const Value& v) {
    struct Visitor {
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(std::uint64_t u) const { return u; }
        nlohmann::ordered_json operator()(double d) const {
            // JSON has no inf/nan; carry them as strings.
            if (!std::isfinite(d)) {
                return format_real(d);
            }
            return d;
        }
        nlohmann::ordered_json operator()(bool b) const { return b; }
    };
    return std::visit(Visitor{}, v);
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + csv_field(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + csv_field(format_value(row[i]));
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[table.columns[i]] = json_value(row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(1) + "\n";
}

std::string to_csv(const Summary& summary) {
    std::string out = "metric,value\n";
    for (const auto& [name, value] : summary) {
        out += csv_field(name) + "," + csv_field(format_value(value)) + "\n";
    }
    return out;
}

std::string to_json(const Summary& summary) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [name, value] : summary) {
        obj[name] = json_value(value);
    }
    return obj.dump(2) + "\n";
}

}  // namespace qread
