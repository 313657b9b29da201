#pragma once

#include <string>
#include <string_view>

namespace tagsight {

// RFC 4180 quoting, only when the field needs it.
inline std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace tagsight
