// Copyright 2026 The klab Authors
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

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace klab {

using Json = nlohmann::ordered_json;

enum class OutputFormat { Json, Csv };

using Cell = std::variant<std::int64_t, double, std::string>;

struct Report {
  std::string command;
  Json config = Json::object();
  Json summary = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// "<project version>+<git describe>".
std::string artifact_version();

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

/// JSON: one object with version, command, config, summary and rows keyed by column.
/// CSV: '#'-prefixed version and config lines, then a header and the rows.
void emit_report(const Report& report, OutputFormat format, std::ostream& out);

}  // namespace klab
