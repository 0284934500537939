// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "henn/errors.hpp"

namespace henn::detail {

// 17 significant digits: enough for exact double round-trips.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text, std::size_t line) {
  std::string tmp(text);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0') {
    throw MalformedRow("bad numeric field '" + tmp + "'", line);
  }
  return v;
}

inline long parse_long(std::string_view text, std::size_t line) {
  std::string tmp(text);
  char* end = nullptr;
  long v = std::strtol(tmp.c_str(), &end, 10);
  if (end == tmp.c_str() || *end != '\0') {
    throw MalformedRow("bad integer field '" + tmp + "'", line);
  }
  return v;
}

inline std::vector<std::string_view> split_csv_row(std::string_view row) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = row.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(row.substr(start));
      break;
    }
    fields.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace henn::detail
