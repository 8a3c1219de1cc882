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

#include "klab/report.hpp"

#include <charconv>
#include <cmath>

#include "klab/error.hpp"

#ifndef KLAB_VERSION
#define KLAB_VERSION "0.0.0"
#endif
#ifndef KLAB_GIT_DESCRIBE
#define KLAB_GIT_DESCRIBE "unknown"
#endif

namespace klab {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell_text(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::get<std::string>(cell);
}

Json cell_json(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* d = std::get_if<double>(&cell)) return std::isfinite(*d) ? Json(*d) : Json(format_double(*d));
  return std::get<std::string>(cell);
}

}  // namespace

std::string artifact_version() { return std::string(KLAB_VERSION) + "+" + KLAB_GIT_DESCRIBE; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, result.ptr);
}

void emit_report(const Report& report, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Json) {
    Json doc;
    doc["artifact"] = "klab";
    doc["version"] = artifact_version();
    doc["command"] = report.command;
    doc["config"] = report.config;
    doc["summary"] = report.summary;
    Json rows = Json::array();
    for (const auto& row : report.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < report.columns.size() && i < row.size(); ++i) {
        obj[report.columns[i]] = cell_json(row[i]);
      }
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
  } else {
    out << "# klab " << artifact_version() << '\n';
    out << "# command " << report.command << '\n';
    out << "# config " << report.config.dump() << '\n';
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
      out << (i ? "," : "") << csv_escape(report.columns[i]);
    }
    out << '\n';
    for (const auto& row : report.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "failed to write report");
}

}  // namespace klab
